#include "kstar/suites.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "kstar/bergman.hpp"
#include "kstar/graphs.hpp"
#include "kstar/laplace.hpp"
#include "kstar/rational_json.hpp"

namespace kstar {

using ojson = nlohmann::ordered_json;

ModelPtr parse_model(const std::string& spec, int n)
{
    if (n < 1)
        throw std::invalid_argument("dimension must be at least 1");
    if (spec == "flat")
        return make_flat(n);
    if (spec == "fubini-study" || spec == "hyperbolic") {
        if (n != 1)
            throw std::invalid_argument(spec + " is one-dimensional; drop --dim");
        return spec == "hyperbolic" ? make_hyperbolic() : make_fubini_study();
    }
    const std::string prefix = "perturbation:";
    if (spec.rfind(prefix, 0) == 0)
        return make_perturbation(parse_polynomial(spec.substr(prefix.size()), n));
    if (std::filesystem::is_regular_file(spec)) {
        std::ifstream in(spec);
        std::stringstream text;
        text << in.rdbuf();
        return load_jet_table(text.str());
    }
    throw std::invalid_argument("unknown model '" + spec +
                                "' (expected flat, fubini-study, hyperbolic, perturbation:<polynomial> or a jet-table "
                                "file)");
}

int first_difference(const std::vector<CRational>& a, const std::vector<CRational>& b)
{
    size_t m = std::max(a.size(), b.size());
    for (size_t k = 0; k < m; ++k) {
        CRational x = k < a.size() ? a[k] : CRational(0), y = k < b.size() ? b[k] : CRational(0);
        if (x != y)
            return int(k);
    }
    return -1;
}

std::vector<CRational> coefficients(const HbarSeries<CRational>& s)
{
    std::vector<CRational> v;
    for (int k = 0; k <= s.order(); ++k)
        v.push_back(s[k]);
    return v;
}

EngineComparison compare_engines(const Context& ctx, const TruncatedJet<CRational>& f1,
                                 const TruncatedJet<CRational>& f2, int K)
{
    EngineComparison c;
    c.oracle = bullet_oracle(ctx, f1, f2, K);
    c.graphs = bullet_via_graphs(ctx, f1, f2, K);
    c.first_difference = first_difference(coefficients(c.oracle), coefficients(c.graphs));
    return c;
}

ojson SuiteReport::to_json() const
{
    ojson j;
    j["suite"] = suite;
    j["order"] = K;
    j["trials"] = trials;
    j["passed"] = passed;
    j["ok"] = ok();
    if (!counterexample.empty())
        j["counterexample"] = counterexample;
    j["checks"] = checks;
    return j;
}

namespace {

std::string series_str(const std::vector<CRational>& v)
{
    std::string s;
    for (size_t k = 0; k < v.size(); ++k)
        s += (k ? ", " : "") + v[k].str();
    return "[" + s + "]";
}

class Recorder {
public:
    Recorder(const std::string& name, int K) { r_.suite = name; r_.K = K; }

    void check(bool ok, ojson rec, const std::function<std::string()>& why)
    {
        ++r_.trials;
        rec["ok"] = ok;
        if (ok)
            ++r_.passed;
        else if (r_.counterexample.empty())
            r_.counterexample = why();
        r_.checks.push_back(std::move(rec));
    }
    // lhs == rhs coefficientwise
    void compare(const std::string& what, ojson rec, const std::vector<CRational>& lhs,
                 const std::vector<CRational>& rhs)
    {
        int d = first_difference(lhs, rhs);
        rec["check"] = what;
        if (d >= 0)
            rec["first_difference"] = d;
        check(d < 0, rec, [&] {
            return rec_context(rec) + what + ": hbar^" + std::to_string(d) + " coefficient differs, " +
                   series_str(lhs) + " vs " + series_str(rhs);
        });
    }
    SuiteReport take() { return std::move(r_); }

    static std::string rec_context(const ojson& rec)
    {
        std::string s;
        for (auto& [k, v] : rec.items())
            if (k != "check" && k != "ok")
                s += k + "=" + (v.is_string() ? v.get<std::string>() : v.dump()) + " ";
        return s.empty() ? s : "[" + s.substr(0, s.size() - 1) + "] ";
    }

private:
    SuiteReport r_;
};

int pick(int v, int dflt) { return v >= 0 ? v : dflt; }

ojson case_json(int trial, const PotentialModel& m, const Point& p)
{
    ojson j;
    j["trial"] = trial;
    j["model"] = m.describe();
    j["point"] = point_str(p);
    return j;
}

std::vector<CRational> values_of(const HbarSeries<JetScalar>& s) { return coefficients(series_values(s)); }

// Cases: either the configured model (at the configured or a random point) or
// random perturbations.
RandomCase next_case(const SuiteConfig& cfg, int n, Rng& rng)
{
    if (cfg.model.empty())
        return random_case(n, rng, cfg.random);
    RandomCase c;
    c.model = parse_model(cfg.model, cfg.n);
    c.point = cfg.point.empty() ? random_point(c.model->dim(), rng) : cfg.point;
    return c;
}

int case_dim(const SuiteConfig& cfg, int trial)
{
    if (!cfg.model.empty())
        return cfg.n;
    return trial % 2 == 0 ? 1 : 2;
}

// The outer product of (f1 . f2) . f3 differentiates its left factor in
// wbar only, and f1 . (f2 . f3) its right factor in w only, so each inner
// product is computed with one-directional jets.
SuiteReport suite_associativity(const SuiteConfig& cfg)
{
    int K = pick(cfg.K, 3), trials = pick(cfg.trials, 20);
    Recorder rec("associativity", K);
    Rng rng(cfg.seed);
    for (int t = 0; t < trials; ++t) {
        int n = case_dim(cfg, t);
        RandomCase c = next_case(cfg, n, rng);
        n = c.model->dim();
        std::vector<HbarSeries<JetScalar>> f;
        for (int i = 0; i < 3; ++i)
            f.push_back(lift(K, function_jet(random_polynomial(n, 0, 2, rng, cfg.random), c.point)));
        ojson base = case_json(t, *c.model, c.point);
        auto op_wbar = bullet_operator_jets(*c.model, c.point, K, false, true, cfg.engine);
        auto op_w = bullet_operator_jets(*c.model, c.point, K, true, false, cfg.engine);
        rec.compare("bullet", base, coefficients(bullet_point_values(op_w, bullet_jets(op_wbar, f[0], f[1]), f[2])),
                    coefficients(bullet_point_values(op_w, f[0], bullet_jets(op_w, f[1], f[2]))));
        if (n == 1) {
            StarAlgebraQ alg = make_star_algebra(*c.model, c.point, K, cfg.engine);
            rec.compare("star", base, coefficients(alg.star_values(alg.star(f[0], f[1]), f[2])),
                        coefficients(alg.star_values(f[0], alg.star(f[1], f[2]))));
        }
    }
    return rec.take();
}

// conj(e^(l)) = e^(l) with y and ybar swapped
bool is_real_jet(const JetScalar& e) { return e.conj() == e; }

SuiteReport suite_unit(const SuiteConfig& cfg)
{
    int K = pick(cfg.K, 2), per_model = pick(cfg.trials, 10);
    Recorder rec("unit", K);
    Rng rng(cfg.seed);
    std::vector<RandomCase> cases;
    if (!cfg.model.empty()) {
        cases.push_back(next_case(cfg, cfg.n, rng));
    } else {
        for (const char* name : {"flat", "fubini-study", "hyperbolic"}) {
            RandomCase c;
            c.model = parse_model(name, 1);
            c.point = random_point(1, rng);
            cases.push_back(c);
        }
        for (int i = 0; i < 5; ++i)
            cases.push_back(random_case(i % 2 == 0 ? 1 : 2, rng, cfg.random));
    }
    int t = 0;
    for (const RandomCase& c : cases) {
        int n = c.model->dim();
        StarAlgebraQ alg = make_star_algebra(*c.model, c.point, K, cfg.engine);
        const auto& e = alg.unit();
        ojson base = case_json(t, *c.model, c.point);
        rec.compare("e^(1) = -A", base, {e[1].truncated(0).value()}, {-alg.context().A.value()});
        ojson jrec = base;
        jrec["check"] = "e^(1) = -A as a jet";
        bool same = (e[1] + alg.context().A).truncated(2 * K - 2).is_zero();
        rec.check(same, jrec, [&] { return Recorder::rec_context(base) + "e^(1) + A is not zero as a jet"; });
        bool real = true;
        for (int l = 0; l <= K; ++l)
            real = real && is_real_jet(e[l]);
        ojson rrec = base;
        rrec["check"] = "e real";
        rec.check(real, rrec, [&] { return Recorder::rec_context(base) + "the unit is not real"; });
        for (int i = 0; i < per_model; ++i, ++t) {
            HbarSeries<JetScalar> f = lift(K, function_jet(random_polynomial(n, 0, 3, rng, cfg.random), c.point));
            ojson r = case_json(t, *c.model, c.point);
            rec.compare("e . f = f", r, values_of(alg.bullet(e, f)), values_of(f));
            rec.compare("f . e = f", r, values_of(alg.bullet(f, e)), values_of(f));
        }
    }
    if (cfg.model.empty()) {
        for (int n : {1, 2}) {
            int Kf = std::max(K, 4);
            StarAlgebraQ alg = make_star_algebra(*make_flat(n), Point(n, CRational(0)), Kf, cfg.engine);
            std::vector<CRational> one(Kf + 1, CRational(0));
            one[0] = CRational(1);
            ojson r;
            r["model"] = "flat";
            r["dim"] = n;
            r["order"] = Kf;
            std::vector<CRational> got;
            bool exact = true;
            for (int l = 0; l <= Kf; ++l) {
                got.push_back(alg.unit()[l].value());
                exact = exact && alg.unit()[l] == JetScalar(l == 0 ? 1 : 0);
            }
            rec.compare("flat e = 1", r, got, one);
            rec.check(exact, r, [&] { return std::string("flat unit has nonconstant jets"); });
        }
    }
    return rec.take();
}

SuiteReport suite_conjugation(const SuiteConfig& cfg)
{
    int K = pick(cfg.K, 3), trials = pick(cfg.trials, 20);
    Recorder rec("conjugation", K);
    Rng rng(cfg.seed);
    for (int t = 0; t < trials; ++t) {
        int n = case_dim(cfg, t);
        RandomCase c = next_case(cfg, n, rng);
        n = c.model->dim();
        Context ctx = build_context(*c.model, c.point, 2 * K + 2);
        Polynomial f1 = random_polynomial(n, 0, 3, rng, cfg.random), f2 = random_polynomial(n, 0, 3, rng, cfg.random);
        auto conj_series = [](std::vector<CRational> v) {
            for (auto& x : v)
                x = x.conj();
            return v;
        };
        ojson base = case_json(t, *c.model, c.point);
        rec.compare("conj(f1 . f2) = conj(f2) . conj(f1)", base,
                    conj_series(coefficients(bullet_oracle(ctx, f1.jet_at(c.point, 2 * K), f2.jet_at(c.point, 2 * K), K))),
                    coefficients(bullet_oracle(ctx, f2.conj().jet_at(c.point, 2 * K), f1.conj().jet_at(c.point, 2 * K), K)));
        if (n == 1 && c.model->closed_form()) {
            StarAlgebraQ alg = make_star_algebra(*c.model, c.point, K, cfg.engine);
            auto F = [&](const Polynomial& p) { return lift(K, function_jet(p, c.point)); };
            rec.compare("conj(f1 * f2) = conj(f2) * conj(f1)", base, conj_series(values_of(alg.star(F(f1), F(f2)))),
                        values_of(alg.star(F(f2.conj()), F(f1.conj()))));
        }
    }
    return rec.take();
}

SuiteReport suite_poisson(const SuiteConfig& cfg)
{
    int K = pick(cfg.K, 1), trials = pick(cfg.trials, 20);
    if (K < 1)
        throw std::invalid_argument("the poisson suite needs order >= 1");
    Recorder rec("poisson", K);
    Rng rng(cfg.seed);
    const CRational half_over_i(Rat(0), ratio(-1, 2));  // 1/(2i)
    for (int t = 0; t < trials; ++t) {
        int n = case_dim(cfg, t);
        RandomCase c = next_case(cfg, n, rng);
        n = c.model->dim();
        Context ctx = build_context(*c.model, c.point, 2 * K + 2);
        Polynomial f1 = random_polynomial(n, 0, 3, rng, cfg.random), f2 = random_polynomial(n, 0, 3, rng, cfg.random);
        auto j1 = f1.jet_at(c.point, 2 * K), j2 = f2.jet_at(c.point, 2 * K);
        CRational expected = half_over_i * poisson_bracket(ctx, j1, j2);
        ojson base = case_json(t, *c.model, c.point);
        CRational got = bullet_oracle(ctx, j1, j2, K)[1] - bullet_oracle(ctx, j2, j1, K)[1];
        rec.compare("bullet antisymmetrization", base, {got}, {expected});
        if (c.model->closed_form()) {
            StarAlgebraQ alg = make_star_algebra(*c.model, c.point, K, cfg.engine);
            auto F1 = lift(K, function_jet(f1, c.point)), F2 = lift(K, function_jet(f2, c.point));
            CRational s = alg.star(F1, F2)[1].value() - alg.star(F2, F1)[1].value();
            rec.compare("star antisymmetrization", base, {s}, {expected});
        }
    }
    return rec.take();
}

SuiteReport suite_separation(const SuiteConfig& cfg)
{
    int K = pick(cfg.K, 3), trials = pick(cfg.trials, 20);
    Recorder rec("separation", K);
    Rng rng(cfg.seed);
    for (int t = 0; t < trials; ++t) {
        RandomCase c = next_case(cfg, 1, rng);
        int n = c.model->dim();
        StarAlgebraQ alg = make_star_algebra(*c.model, c.point, K, cfg.engine);
        Polynomial a = random_holomorphic(n, 3, rng, cfg.random);
        Polynomial b = random_holomorphic(n, 3, rng, cfg.random).conj();
        Polynomial f = random_polynomial(n, 0, 3, rng, cfg.random);
        auto F = [&](const Polynomial& p) { return lift(K, function_jet(p, c.point)); };
        ojson base = case_json(t, *c.model, c.point);
        rec.compare("a * f = a f", base, values_of(alg.star(F(a), F(f))), values_of(F(a * f)));
        rec.compare("f * conj(b) = f conj(b)", base, values_of(alg.star(F(f), F(b))), values_of(F(f * b)));
    }
    return rec.take();
}

SuiteReport suite_logdet(const SuiteConfig& cfg)
{
    int trials = pick(cfg.trials, 20), K = pick(cfg.K, 2);
    Recorder rec("logdet", K);
    Rng rng(cfg.seed);
    int M = 2 * K + 2;
    for (int t = 0; t < trials; ++t) {
        int n = case_dim(cfg, t);
        Context ctx;
        ojson base;
        if (t % 4 < 2 && cfg.model.empty()) {
            ctx = random_context(n, M, rng, cfg.random);
            base["trial"] = t;
            base["model"] = "random jet table";
            base["dim"] = n;
        } else {
            RandomCase c = next_case(cfg, n, rng);
            ctx = build_context(*c.model, c.point, M);
            base = case_json(t, *c.model, c.point);
        }
        std::string failure = logdet_identity_failure(ctx);
        rec.check(failure.empty(), base, [&] { return Recorder::rec_context(base) + failure; });
        // a corrupted Psi table must be caught
        Context bad = ctx;
        for (auto& [k, v] : bad.psi) {
            if (mono::degree(k) == 1) {
                v += CRational(1);
                break;
            }
        }
        ojson neg = base;
        neg["check"] = "corrupted table rejected";
        rec.check(!logdet_identity_failure(bad).empty(), neg,
                  [&] { return Recorder::rec_context(base) + "corrupted Psi table passed the log-det check"; });
    }
    return rec.take();
}

SuiteReport suite_functoriality(const SuiteConfig& cfg)
{
    int K = pick(cfg.K, 2), trials = pick(cfg.trials, 10);
    Recorder rec("functoriality", K);
    Rng rng(cfg.seed);
    int M = 2 * K + 2;
    for (int t = 0; t < trials; ++t) {
        ModelPtr model = cfg.model.empty() ? random_perturbation(1, 4, rng, cfg.random) : parse_model(cfg.model, 1);
        if (model->dim() != 1)
            throw std::invalid_argument("functoriality is checked for n = 1");
        Point z0, target;
        CRational cc, slope;
        for (;;) {
            z0 = random_point(1, rng);
            cc = CRational(random_rational(rng, cfg.random));
            if (cc.is_zero())
                continue;
            target = {z0[0] + cc * z0[0] * z0[0]};
            slope = CRational(1) + CRational(2) * cc * z0[0];
            TruncatedJet<CRational> jet = model->potential_jet(target, 2);
            if (!slope.is_zero() && positive_definite({{jet.coeff(mono::pack({1, 1}))}}))
                break;
        }
        TruncatedJet<CRational> delta(1, M);
        delta.set(mono::pack({1, 0}), slope);
        delta.set(mono::pack({2, 0}), cc);
        Context ctx = build_context(*model, target, M);
        Polynomial f1 = random_polynomial(1, 0, 3, rng, cfg.random), f2 = random_polynomial(1, 0, 3, rng, cfg.random);
        auto j1 = f1.jet_at(target, M), j2 = f2.jet_at(target, M);
        Transported pulled = transport_jets(delta, z0, ctx, {j1, j2});
        ojson base = case_json(t, *model, z0);
        base["c"] = cc.str();
        rec.compare("bullet after transport", base, coefficients(bullet_oracle(ctx, j1, j2, K)),
                    coefficients(bullet_oracle(pulled.ctx, pulled.fjets[0], pulled.fjets[1], K)));
    }
    return rec.take();
}

SuiteReport suite_appendix(const SuiteConfig& cfg)
{
    int K = pick(cfg.K, 3), trials = pick(cfg.trials, 20);
    Recorder rec("appendix-identity", K);
    Rng rng(cfg.seed);
    Point origin{CRational(0)};
    auto one = [&](const Context& ctx, int order, const Polynomial& f, ojson base) {
        auto jet = f.jet_at(origin, 2 * order + 1);
        rec.compare("laplace = contour", base, laplace_integral(ctx, jet, order), contour_integral(ctx, jet, order));
        OintContext<CRational> oc = oint_context(ctx, order);
        int bad = a_relation_failure(oc, a_coefficients(oc, order + 1));
        base["check"] = "A-series relation";
        rec.check(bad < 0, base, [&] {
            return Recorder::rec_context(base) + "A-series relation fails at hbar^" + std::to_string(bad);
        });
    };
    for (int t = 0; t < trials; ++t) {
        Context ctx;
        ojson base;
        base["trial"] = t;
        if (cfg.model.empty()) {
            ctx = random_context(1, 2 * K + 3, rng, cfg.random);
            base["model"] = "random jet table";
        } else {
            ModelPtr m = parse_model(cfg.model, 1);
            Point p = cfg.point.empty() ? origin : cfg.point;
            ctx = build_context(*m, p, 2 * K + 3);
            base["model"] = m->describe();
            base["point"] = point_str(p);
        }
        one(ctx, K, random_polynomial(1, 0, 4, rng, cfg.random), base);
    }
    if (cfg.model.empty()) {
        int Kf = K + 1;
        Context flat = build_context(*make_flat(1), origin, 2 * Kf + 3);
        for (int t = 0; t < 5; ++t) {
            ojson base;
            base["trial"] = t;
            base["model"] = "flat";
            base["order"] = Kf;
            one(flat, Kf, random_polynomial(1, 0, 2 * Kf, rng, cfg.random), base);
        }
    }
    return rec.take();
}

SuiteReport suite_projector(const SuiteConfig& cfg)
{
    int K = pick(cfg.K, 2), trials = pick(cfg.trials, 5);
    Recorder rec("projector", K);
    Rng rng(cfg.seed);
    std::vector<std::string> models = cfg.model.empty() ? std::vector<std::string>{"flat", "fubini-study"}
                                                        : std::vector<std::string>{cfg.model};
    int t = 0;
    for (const std::string& name : models) {
        ModelPtr m = parse_model(name, 1);
        for (int i = 0; i < trials; ++i, ++t) {
            Point p = !cfg.point.empty() ? cfg.point : i == 0 ? Point{CRational(0)} : random_point(1, rng);
            Polynomial f = random_polynomial(1, 0, 3, rng, cfg.random);
            ojson base = case_json(t, *m, p);
            ProjectorCheck pc = projector_check(*m, p, f, K);
            ojson h = base;
            h["check"] = "holomorphic";
            rec.check(pc.holomorphic, h, [&] {
                return Recorder::rec_context(base) + "P(" + f.str() + ") has antiholomorphic components";
            });
            rec.compare("P^2 = P", base, pc.twice, pc.once);
            // P reproduces holomorphic functions
            Polynomial a = random_holomorphic(1, 3, rng, cfg.random);
            std::vector<JetScalar> pa = Projector(*m, p, K, 3, false).apply(a);
            JetScalar aj = function_jet(a, p).truncated(3);
            bool same = pa[0] == aj;
            for (int k = 1; k <= K; ++k)
                same = same && pa[k].is_zero();
            ojson r = base;
            r["check"] = "P(a) = a";
            rec.check(same, r, [&] { return Recorder::rec_context(base) + "P(" + a.str() + ") != " + a.str(); });
        }
    }
    return rec.take();
}

SuiteReport suite_toeplitz(const SuiteConfig& cfg)
{
    int K = pick(cfg.K, 2), trials = pick(cfg.trials, 10);
    Recorder rec("toeplitz", K);
    Rng rng(cfg.seed);
    for (int t = 0; t < trials; ++t) {
        RandomCase c = next_case(cfg, 1, rng);
        Polynomial f1 = random_polynomial(1, 0, 2, rng, cfg.random), f2 = random_polynomial(1, 0, 2, rng, cfg.random);
        Polynomial g = random_holomorphic(1, 2, rng, cfg.random);
        ToeplitzCheck tc = toeplitz_compose_check(*c.model, c.point, f1, f2, g, K);
        rec.compare("F1 F2 g = F g", case_json(t, *c.model, c.point), tc.composed, tc.direct);
    }
    return rec.take();
}

SuiteReport suite_trace(const SuiteConfig& cfg)
{
    int K = pick(cfg.K, 3);
    Recorder rec("trace", K);
    std::string name = cfg.model.empty() ? "flat" : cfg.model;
    ModelPtr m = parse_model(name, 1);
    double tol = name == "flat" ? 1e-8 : 1e-6;
    BumpFunction f1{parse_polynomial("conj(z) + 1/2*z^2*conj(z)", 1), {0.1, 0.0}, 0.8};
    BumpFunction f2{parse_polynomial("z - 1/3*z*conj(z)^2", 1), {0.1, 0.0}, 0.8};
    for (const TraceDefect& d : trace_defects(*m, f1, f2, K, cfg.quadrature)) {
        if (d.k == 0)
            continue;
        ojson r;
        r["model"] = m->describe();
        r["functional"] = d.kind == TraceKind::Tau ? "tau" : "tr";
        r["k"] = d.k;
        r["defect"] = d.defect;
        r["error"] = d.error;
        r["tolerance"] = tol;
        rec.check(d.defect < tol && d.error < tol, r, [&] {
            return Recorder::rec_context(r) + "cyclicity defect above tolerance or quadrature not converged";
        });
    }
    return rec.take();
}

using SuiteFn = SuiteReport (*)(const SuiteConfig&);

const std::vector<std::pair<std::string, SuiteFn>>& registry()
{
    static const std::vector<std::pair<std::string, SuiteFn>> r{
        {"associativity", suite_associativity}, {"unit", suite_unit},
        {"conjugation", suite_conjugation},     {"poisson", suite_poisson},
        {"separation", suite_separation},       {"logdet", suite_logdet},
        {"functoriality", suite_functoriality}, {"appendix-identity", suite_appendix},
        {"projector", suite_projector},         {"toeplitz", suite_toeplitz},
        {"trace", suite_trace},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (auto& [name, fn] : registry())
            v.push_back(name);
        return v;
    }();
    return names;
}

SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg)
{
    for (auto& [n, fn] : registry())
        if (n == name)
            return fn(cfg);
    std::string known;
    for (auto& n : suite_names())
        known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown suite '" + name + "' (expected one of: " + known + ")");
}

}  // namespace kstar
