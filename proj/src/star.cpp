#include "kstar/star.hpp"

namespace kstar {

EngineKind parse_engine(const std::string& name)
{
    if (name == "oracle")
        return EngineKind::Oracle;
    if (name == "graphs")
        return EngineKind::Graphs;
    throw std::invalid_argument("unknown engine '" + name + "' (expected oracle or graphs)");
}

const char* engine_name(EngineKind e)
{
    return e == EngineKind::Graphs ? "graphs" : "oracle";
}

StarAlgebraQ make_star_algebra(const PotentialModel& model, const Point& point, int K, EngineKind engine)
{
    int M = 2 * K + 2, B = 2 * K;
    return StarAlgebraQ(build_jet_context(model, point, M, B, true, true), K, B, engine);
}

OperatorSeries<JetScalar> bullet_operator_jets(const PotentialModel& model, const Point& point, int K, bool keep_w,
                                               bool keep_wbar, EngineKind engine)
{
    int M = 2 * K + 2, B = 2 * K;
    JetModeContext ctx = build_jet_context(model, point, M, B, keep_w, keep_wbar);
    if (engine == EngineKind::Graphs)
        return graph_operator_series(ctx, K);
    return LaplaceEngine<JetScalar>(ctx, K, B).operator_series();
}

StarAlgebraD make_star_algebra_d(const PotentialModel& model, const std::vector<CDouble>& point, int K)
{
    int M = 2 * K + 2, B = 2 * K;
    return StarAlgebraD(build_jet_context_d(model, point, M, B, true, true), K, B);
}

JetScalar function_jet(const Polynomial& f, const Point& point)
{
    TruncatedJet<CRational> j = f.jet_at(point, std::max(f.degree(), 0));
    JetScalar r(f.n(), JetScalar::exact);
    for (auto& [k, c] : j.terms())
        r.add_term(k, c);
    return r;
}

JetScalar function_jet(const TruncatedJet<CRational>& f)
{
    JetScalar r(f.n(), f.cutoff());
    for (auto& [k, c] : f.terms())
        r.add_term(k, c);
    return r;
}

TruncatedJet<CRational> as_truncated_jet(const JetScalar& f, int n)
{
    if (f.cutoff() == JetScalar::exact)
        throw std::invalid_argument("as_truncated_jet: untruncated jet scalar");
    TruncatedJet<CRational> j(n, f.cutoff());
    for (auto& [k, c] : f.terms())
        j.set(k, c);
    return j;
}

UnitElement unit_element(const PotentialModel& model, const Point& point, int K, int depth, EngineKind engine)
{
    if (depth < 0)
        throw std::invalid_argument("negative jet depth");
    int M = 2 * K + 2, B = 2 * K + depth;
    StarAlgebraQ alg(build_jet_context(model, point, M, B, true, true), K, B, engine);
    UnitElement u;
    u.n = model.dim();
    u.K = K;
    for (int l = 0; l <= K; ++l) {
        JetScalar e = alg.unit()[l];
        int known = B - 2 * l;
        if (e.cutoff() == JetScalar::exact)
            e = e.truncated(known);
        u.e.push_back(as_truncated_jet(e, u.n));
    }
    return u;
}

namespace {

HbarSeries<JetScalar> lifted(const StarAlgebraQ& alg, const Polynomial& f, const Point& point)
{
    return lift(alg.order(), function_jet(f, point));
}

}  // namespace

HbarSeries<CRational> normalized_star(const PotentialModel& model, const Point& point, const Polynomial& f1,
                                      const Polynomial& f2, int K, EngineKind engine)
{
    StarAlgebraQ alg = make_star_algebra(model, point, K, engine);
    return series_values(alg.star(lifted(alg, f1, point), lifted(alg, f2, point)));
}

HbarSeries<CRational> i_map(const PotentialModel& model, const Point& point, const Polynomial& fhat, int K)
{
    StarAlgebraQ alg = make_star_algebra(model, point, K);
    return series_values(alg.i_map(lifted(alg, fhat, point)));
}

HbarSeries<CRational> i_inverse(const PotentialModel& model, const Point& point, const Polynomial& f, int K)
{
    StarAlgebraQ alg = make_star_algebra(model, point, K);
    return series_values(alg.i_inverse(lifted(alg, f, point)));
}

HbarSeries<CRational> hat_star(const PotentialModel& model, const Point& point, const Polynomial& fhat1,
                               const Polynomial& fhat2, int K)
{
    StarAlgebraQ alg = make_star_algebra(model, point, K);
    return series_values(alg.hat_star(lifted(alg, fhat1, point), lifted(alg, fhat2, point)));
}

CRational poisson_bracket(const Context& ctx, const TruncatedJet<CRational>& f1, const TruncatedJet<CRational>& f2)
{
    int n = ctx.n;
    if (f1.n() != n || f2.n() != n)
        throw std::invalid_argument("poisson_bracket: jet dimension does not match the context");
    CRational sum(0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Key di = mono::unit(i), dj = mono::unit(n + j);
            sum += ctx.Hinv[i][j] * (f1.coeff(di) * f2.coeff(dj) - f1.coeff(dj) * f2.coeff(di));
        }
    }
    return sum * CRational(Rat(0), Rat(-2));
}

}  // namespace kstar
