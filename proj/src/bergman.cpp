#include "kstar/bergman.hpp"

namespace kstar {

OintContext<CRational> oint_context(const Context& ctx, int K)
{
    if (ctx.n != 1)
        throw std::invalid_argument("contour integrals are implemented for n = 1 only");
    OintContext<CRational> oc;
    oc.K = K;
    oc.order = ctx.order();
    if (oc.order < oc.required_order())
        throw std::out_of_range("contour integral to hbar^" + std::to_string(K) + " needs Phi jets of order " +
                                std::to_string(oc.required_order()) + ", context has " + std::to_string(oc.order));
    for (auto& [k, c] : ctx.phi) {
        std::vector<int> e = mono::unpack(k, 2);
        if (e[0] >= 1 && e[1] >= 1)
            oc.phi[{e[0], e[1]}] = c;
    }
    return oc;
}

OintContext<JetScalar> oint_context(const PotentialModel& model, const Point& point, int K, int depth, bool wbar)
{
    if (model.dim() != 1)
        throw std::invalid_argument("contour integrals are implemented for n = 1 only");
    if (!model.closed_form())
        throw std::invalid_argument("a moving base point needs a closed-form potential");
    if (depth < 0)
        throw std::invalid_argument("negative jet depth");
    OintContext<JetScalar> oc;
    oc.K = K;
    oc.depth = depth;
    oc.wbar = wbar;
    oc.order = oc.required_order();
    TruncatedJet<CRational> T = model.potential_jet(point, oc.order + depth);
    for (int a = 0; a <= oc.order; ++a) {
        for (int b = 0; a + b <= oc.order; ++b) {
            JetScalar v(1, depth);
            for (int c = 0; c <= depth; ++c) {
                for (int d = 0; c + d <= depth && (wbar || d == 0); ++d) {
                    if (a + c == 0 || b + d == 0)
                        continue;  // anchored gauge: no pure Taylor terms
                    CRational t = T.coeff(mono::pack({a + c, b + d}));
                    if (t.is_zero())
                        continue;
                    Rat w = factorial(a + c) * factorial(b + d) / (factorial(c) * factorial(d));
                    v.add_term(mono::pack({c, d}), t * CRational(w));
                }
            }
            if (!v.is_zero())
                oc.phi[{a, b}] = v;
        }
    }
    return oc;
}

std::vector<CRational> laplace_integral(const Context& ctx, const TruncatedJet<CRational>& f, int K)
{
    if (ctx.n != 1 || f.n() != 1)
        throw std::invalid_argument("laplace_integral: n = 1 only");
    LaplaceEngine<CRational> eng(ctx, K);
    OperatorSeries<CRational> op = eng.operator_series();
    std::vector<CRational> out(K + 1, CRational(0));
    for (int k = 0; k <= K; ++k) {
        for (auto& [ji, c] : op.C[k]) {
            Key key = mono::concat(ji.second, 1, ji.first);
            if (mono::degree(key) > f.cutoff())
                throw std::out_of_range("laplace_integral: integrand jet too short");
            CRational d = f.coeff(key);
            if (!d.is_zero())
                out[k] += c * d * CRational(mono::factorial(key, 2));
        }
    }
    return out;
}

std::vector<CRational> contour_integral(const Context& ctx, const TruncatedJet<CRational>& f, int K)
{
    OintContext<CRational> oc = oint_context(ctx, K);
    if (f.cutoff() < oc.weight())
        throw std::out_of_range("contour_integral: integrand needs jets of order " + std::to_string(oc.weight()));
    LaurentSeries<CRational> g{embed_jet<CRational>(function_jet(f), 0, oc.pole_cap())};
    return oint_eval(oc, g);
}

Projector::Projector(const PotentialModel& model, const Point& point, int K, int depth, bool wbar)
    : point_(point), ctx_(oint_context(model, point, K, depth, wbar))
{
    int Ku = K + ctx_.wbar_depth(), B = ctx_.weight() + depth;
    StarAlgebraQ alg(build_jet_context(model, point, 2 * Ku + 2, B, true, true), Ku, B);
    for (int l = 0; l <= Ku; ++l) {
        JetScalar e = alg.unit()[l];
        if (e.cutoff() == JetScalar::exact)
            e = e.truncated(B - 2 * l);
        row_.push_back(embed_jet<JetScalar>(e, depth, ctx_.pole_cap(), true, wbar));
    }
}

std::vector<JetScalar> Projector::apply(const HbarSeries<JetScalar>& f) const
{
    const int W = ctx_.weight(), N = ctx_.pole_cap();
    LaurentSeries<JetScalar> fl;
    for (int q = 0; q < N; ++q) {
        if (q > f.order() || f[q].is_zero()) {
            fl.emplace_back(LaurentJet<JetScalar>::unbounded, N);
            continue;
        }
        int c = f[q].cutoff();
        if (c != JetScalar::exact && c < required_cutoff(q))
            throw std::out_of_range("projector argument at hbar^" + std::to_string(q) + " is known to order " +
                                    std::to_string(c) + ", needs " + std::to_string(required_cutoff(q)));
        fl.push_back(embed_jet<JetScalar>(f[q], ctx_.depth, N, false, ctx_.wbar));
    }
    LaurentSeries<JetScalar> g(N, LaurentJet<JetScalar>(W, N));
    for (int q = 0; q < N; ++q)
        for (int l = 0; l <= q; ++l)
            if (!fl[q - l].is_zero())
                g[q] += (row_[l] * fl[q - l]).truncated(W - 2 * q);
    return oint_eval(ctx_, g);
}

std::vector<JetScalar> Projector::apply(const Polynomial& f) const
{
    if (f.n() != 1)
        throw std::invalid_argument("projector: functions of (z, conj(z)) only");
    return apply(lift(ctx_.K, function_jet(f, point_)));
}

std::vector<JetScalar> projector_apply(const PotentialModel& model, const Point& point, const Polynomial& f, int K,
                                       int depth, bool wbar)
{
    return Projector(model, point, K, depth, wbar).apply(f);
}

bool is_holomorphic_jet(const JetScalar& f)
{
    for (auto& [k, c] : f.terms())
        if (mono::get(k, 1) != 0)
            return false;
    return true;
}

ProjectorCheck projector_check(const PotentialModel& model, const Point& point, const Polynomial& f, int K)
{
    Projector outer(model, point, K, 0);
    Projector inner(model, point, K, 2 * K + 1, false);
    std::vector<JetScalar> g = inner.apply(f);
    ProjectorCheck r;
    r.holomorphic = true;
    for (const JetScalar& v : Projector(model, point, K, 2).apply(f))
        r.holomorphic = r.holomorphic && is_holomorphic_jet(v);
    HbarSeries<JetScalar> gs(K);
    for (int k = 0; k <= K; ++k) {
        r.once.push_back(g[k].value());
        gs[k] = g[k];
    }
    for (const JetScalar& v : outer.apply(gs))
        r.twice.push_back(v.value());
    r.idempotent = true;
    for (int k = 0; k <= K; ++k) {
        if (r.once[k] != r.twice[k]) {
            r.idempotent = false;
            r.first_mismatch = k;
            break;
        }
    }
    return r;
}

ToeplitzCheck toeplitz_compose_check(const PotentialModel& model, const Point& point, const Polynomial& fhat1,
                                     const Polynomial& fhat2, const Polynomial& g, int K)
{
    Projector outer(model, point, K, 0);
    Projector inner(model, point, K, 2 * K + 1, false);
    std::vector<JetScalar> G = inner.apply(lift(K, function_jet(fhat2 * g, point)));
    JetScalar f1 = function_jet(fhat1, point);
    HbarSeries<JetScalar> h(K);
    for (int k = 0; k <= K; ++k)
        h[k] = f1 * G[k];

    int B = 2 * K + 1;
    StarAlgebraQ alg(build_jet_context(model, point, 2 * K + 2, B, true, true), K, B);
    HbarSeries<JetScalar> symbol =
        alg.hat_star(lift(K, function_jet(fhat1, point)), lift(K, function_jet(fhat2, point)));
    JetScalar gj = function_jet(g, point);
    HbarSeries<JetScalar> fg(K);
    for (int k = 0; k <= K; ++k)
        fg[k] = symbol[k] * gj;

    ToeplitzCheck r;
    for (const JetScalar& v : outer.apply(h))
        r.composed.push_back(v.value());
    for (const JetScalar& v : outer.apply(fg))
        r.direct.push_back(v.value());
    r.equal = true;
    for (int k = 0; k <= K; ++k) {
        if (r.composed[k] != r.direct[k]) {
            r.equal = false;
            r.first_mismatch = k;
            break;
        }
    }
    return r;
}

}  // namespace kstar
