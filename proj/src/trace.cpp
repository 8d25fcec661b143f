#include "kstar/trace.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace kstar {

namespace {

using GL = boost::math::quadrature::gauss<double, 20>;

JetScalarD exp_jet(const JetScalarD& x)
{
    CDouble x0 = x.value();
    JetScalarD r = x - JetScalarD(x0);
    JetScalarD sum(1), power(1);
    for (int m = 1; m <= x.cutoff(); ++m) {
        power = power * r * JetScalarD(CDouble(1.0 / m));
        if (power.is_zero())
            break;
        sum += power;
    }
    return sum * JetScalarD(std::exp(x0));
}

struct Node {
    CDouble z;
    double w;
};

std::vector<Node> polar_rule(CDouble center, double radius, int panels, int angles)
{
    std::vector<Node> nodes;
    const double pi = std::acos(-1.0);
    // panel edges cluster toward the rim, where the bump derivatives peak
    auto edge = [&](int p) { return radius * std::sin(0.5 * pi * p / panels); };
    for (int p = 0; p < panels; ++p) {
        double mid = 0.5 * (edge(p) + edge(p + 1)), half = 0.5 * (edge(p + 1) - edge(p));
        for (size_t i = 0; i < GL::abscissa().size(); ++i) {
            for (int sign : {-1, 1}) {
                double r = mid + sign * half * GL::abscissa()[i];
                double wr = half * GL::weights()[i] * r;
                for (int t = 0; t < angles; ++t) {
                    double th = 2 * pi * t / angles;
                    nodes.push_back({center + std::polar(r, th), wr * 2 * pi / angles});
                }
            }
        }
    }
    return nodes;
}

struct Sums {
    std::vector<double> re, im, abs;
    explicit Sums(int size) : re(size), im(size), abs(size) {}
};

// Index k for tau, K + 1 + k for tr.
Sums integrate(const PotentialModel& model, const BumpFunction& f1, const BumpFunction& f2, int K,
               const std::vector<Node>& nodes)
{
    Sums s(2 * (K + 1));
    for (const Node& node : nodes) {
        if (!f1.inside(node.z) || !f2.inside(node.z))
            continue;
        StarAlgebraD alg = make_star_algebra_d(model, {node.z}, K);
        int B = 2 * K;
        auto g1 = lift(K, f1.jet_at(node.z, B));
        auto g2 = lift(K, f2.jet_at(node.z, B));
        auto tau = alg.bullet_values(g1, g2) - alg.bullet_values(g2, g1);
        // e (f1 * f2) = (f1 e) . (f2 e)
        auto e1 = g1 * alg.unit(), e2 = g2 * alg.unit();
        auto tr = alg.bullet_values(e1, e2) - alg.bullet_values(e2, e1);
        double vol = node.w * alg.context().H[0][0].value().real();
        for (int k = 0; k <= K; ++k) {
            for (int which = 0; which < 2; ++which) {
                CDouble g = (which == 0 ? tau : tr)[k];
                int idx = which * (K + 1) + k;
                s.re[idx] += vol * g.real();
                s.im[idx] += vol * g.imag();
                s.abs[idx] += vol * std::abs(g);
            }
        }
    }
    return s;
}

}  // namespace

JetScalarD BumpFunction::jet_at(CDouble z, int cutoff) const
{
    if (!inside(z))
        return JetScalarD(1, cutoff);
    CDouble a = z - center;
    double r2 = radius * radius;
    JetScalarD s(1, cutoff);
    s.add_term(mono::pack({0, 0}), std::norm(a) / r2);
    s.add_term(mono::pack({1, 0}), std::conj(a) / r2);
    s.add_term(mono::pack({0, 1}), a / r2);
    s.add_term(mono::pack({1, 1}), CDouble(1.0 / r2));
    JetScalarD bump = exp_jet(-(JetScalarD(1) - s).inverse());
    TruncatedJet<CDouble> pj = poly.jet_at(std::vector<CDouble>{z}, cutoff);
    JetScalarD p(1, cutoff);
    for (auto& [k, c] : pj.terms())
        p.add_term(k, c);
    return bump * p;
}

std::vector<TraceDefect> trace_defects(const PotentialModel& model, const BumpFunction& f1, const BumpFunction& f2,
                                       int K, const QuadratureSpec& spec)
{
    if (model.dim() != 1)
        throw std::invalid_argument("trace checks are implemented for n = 1 only");
    if (f1.poly.n() != 1 || f2.poly.n() != 1)
        throw std::invalid_argument("trace test functions must be polynomials in z, conj(z)");
    if (spec.panels < 1 || spec.angles < 1)
        throw std::invalid_argument("quadrature needs at least one panel and one angle");
    Sums coarse = integrate(model, f1, f2, K, polar_rule(f1.center, f1.radius, spec.panels, spec.angles));
    Sums fine = integrate(model, f1, f2, K, polar_rule(f1.center, f1.radius, 2 * spec.panels, 2 * spec.angles));
    std::vector<TraceDefect> out;
    for (int which = 0; which < 2; ++which) {
        for (int k = 0; k <= K; ++k) {
            int idx = which * (K + 1) + k;
            TraceDefect d;
            d.k = k;
            d.kind = which == 0 ? TraceKind::Tau : TraceKind::Tr;
            d.integral = std::hypot(fine.re[idx], fine.im[idx]);
            d.scale = fine.abs[idx];
            if (d.scale > 0) {
                d.defect = d.integral / d.scale;
                d.error = std::hypot(fine.re[idx] - coarse.re[idx], fine.im[idx] - coarse.im[idx]) / d.scale;
            }
            out.push_back(d);
        }
    }
    return out;
}

double trace_defect(const PotentialModel& model, const BumpFunction& f1, const BumpFunction& f2, int k,
                    TraceKind kind, const QuadratureSpec& spec)
{
    for (const TraceDefect& d : trace_defects(model, f1, f2, k, spec))
        if (d.k == k && d.kind == kind)
            return d.defect;
    throw std::logic_error("trace_defect: order not computed");
}

}  // namespace kstar
