#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "closed_forms.hpp"
#include "kstar/graphs.hpp"
#include "kstar/suites.hpp"

using namespace kstar;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    std::function<Outcome()> run;
};

Outcome from_suite(const SuiteReport& r)
{
    std::string d = r.suite + " " + std::to_string(r.passed) + "/" + std::to_string(r.trials) + " through hbar^" +
                    std::to_string(r.K);
    if (!r.ok())
        d += "; " + r.counterexample;
    return {r.ok(), d};
}

Outcome combine(std::initializer_list<Outcome> parts)
{
    Outcome o{true, ""};
    for (const Outcome& p : parts) {
        o.ok = o.ok && p.ok;
        o.detail += (o.detail.empty() ? "" : "; ") + p.detail;
    }
    return o;
}

SuiteReport suite(const std::string& name, int K = -1, int trials = -1, const std::string& model = "")
{
    SuiteConfig cfg;
    cfg.K = K;
    cfg.trials = trials;
    cfg.model = model;
    return run_suite(name, cfg);
}

Outcome engine_equivalence()
{
    Rng rng(1001);
    int good = 0, total = 0;
    std::string first;
    for (auto [n, K] : {std::pair{1, 4}, std::pair{2, 3}})
        for (int t = 0; t < 20; ++t, ++total) {
            RandomCase c = random_case(n, rng, {});
            Context ctx = build_context(*c.model, c.point, 2 * K + 2);
            auto f1 = random_polynomial(n, 0, 2 * K, rng, {}).jet_at(c.point, 2 * K);
            auto f2 = random_polynomial(n, 0, 2 * K, rng, {}).jet_at(c.point, 2 * K);
            EngineComparison cmp = compare_engines(ctx, f1, f2, K);
            if (cmp.first_difference < 0)
                ++good;
            else if (first.empty())
                first = "n=" + std::to_string(n) + " trial " + std::to_string(t) + " differs at hbar^" +
                        std::to_string(cmp.first_difference);
        }
    return {good == total, std::to_string(good) + "/" + std::to_string(total) +
                               " contexts (20 n=1 through hbar^4, 20 n=2 through hbar^3)" +
                               (first.empty() ? "" : "; " + first)};
}

Outcome low_order_closed_form()
{
    Rng rng(1002);
    int good = 0;
    for (int t = 0; t < 10; ++t) {
        RandomCase c = random_case(1 + t % 2, rng, {});
        OperatorSeries<CRational> expect = testing::low_order_bullet(testing::geometry(*c.model, c.point));
        Context ctx = build_context(*c.model, c.point, 6);
        GraphEngine<CRational> graphs(ctx, 2);
        bool ok = bullet_operator_oracle(ctx, 2) == expect && graph_operator_series(ctx, 2) == expect &&
                  graphs.vacuum_series()[2] == vacuum_D(ctx);
        good += ok;
    }
    return {good == 10, std::to_string(good) + "/10 contexts, every group of hbar^1 and hbar^2 and D equal"};
}

Outcome star_criterion()
{
    Rng rng(1005);
    int good = 0;
    const int K = 3;
    std::string first;
    for (int t = 0; t < 10; ++t) {
        int n = 1 + t % 2;
        RandomCase c = random_case(n, rng, {});
        StarAlgebraQ alg = make_star_algebra(*c.model, c.point, K);
        auto lifted = [&](const Polynomial& p) { return lift(K, function_jet(p, c.point)); };
        Polynomial p1 = random_polynomial(n, 0, 3, rng, {}), p2 = random_polynomial(n, 0, 3, rng, {});
        auto f = lifted(p1), one = lifted(Polynomial::constant(n, CRational(1)));
        bool unit_ok = alg.star_values(f, one) == series_values(f) && alg.star_values(one, f) == series_values(f);

        Context ctx = build_context(*c.model, c.point, 4);
        auto j1 = p1.jet_at(c.point, 4), j2 = p2.jet_at(c.point, 4);
        CRational first_order(0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                first_order += ctx.Hinv[i][j] * j1.derivative(MultiIndex(n, 0), unit_index(n, j)) *
                               j2.derivative(unit_index(n, i), MultiIndex(n, 0));
        auto s = alg.star_values(lifted(p1), lifted(p2));
        auto form = n == 1 ? testing::Contraction::Divergence : testing::Contraction::Crossed;
        CRational second = testing::polarized_star2(testing::geometry(*c.model, c.point), j1, j2, form);
        bool ok = unit_ok && s[1] == first_order && s[2] == second;
        good += ok;
        if (!ok && first.empty())
            first = "trial " + std::to_string(t) + (unit_ok ? "" : " unit") + (s[1] == first_order ? "" : " hbar^1") +
                    (s[2] == second ? "" : " hbar^2");
    }
    return {good == 10, std::to_string(good) +
                            "/10 contexts: f*1 = 1*f = f through hbar^3, hbar^1 term, hbar^2 display "
                            "(divergence contractions n=1, crossed contractions n=2)" +
                            (first.empty() ? "" : "; " + first)};
}

Outcome trace_criterion()
{
    return combine({from_suite(suite("trace", 3, -1, "flat")), from_suite(suite("trace", 3, -1, "fubini-study"))});
}

Outcome determinism()
{
    bool same = true;
    for (const char* name : {"associativity", "poisson", "appendix-identity", "separation"}) {
        SuiteConfig cfg;
        cfg.trials = 3;
        cfg.seed = 99;
        same = same && run_suite(name, cfg).to_json().dump() == run_suite(name, cfg).to_json().dump();
    }
    Rng a(5), b(5);
    RandomCase ca = random_case(2, a, {}), cb = random_case(2, b, {});
    OperatorSeries<CRational> oa = bullet_operator_oracle(build_context(*ca.model, ca.point, 6), 2);
    OperatorSeries<CRational> ob = bullet_operator_oracle(build_context(*cb.model, cb.point, 6), 2);
    SeriesHeader h{"random", ca.point, 2, "oracle"};
    same = same && operator_series_json(oa, h) == operator_series_json(ob, h);
    return {same, "suite reports and operator tables byte-identical across repeated seeded runs"};
}

}  // namespace

int main()
{
    std::vector<Criterion> criteria{
        {"engine equivalence", engine_equivalence},
        {"low-order closed form", low_order_closed_form},
        {"associativity", [] { return from_suite(suite("associativity", 3, 20)); }},
        {"unit element", [] { return from_suite(suite("unit", 2, 10)); }},
        {"normalized star product", star_criterion},
        {"correspondence principle", [] { return from_suite(suite("poisson", 1, 20)); }},
        {"conjugation and separation",
         [] { return combine({from_suite(suite("conjugation", 3, 20)), from_suite(suite("separation", 3, 20))}); }},
        {"log-det identities", [] { return from_suite(suite("logdet")); }},
        {"coordinate functoriality", [] { return from_suite(suite("functoriality", 2, 10)); }},
        {"contour identity", [] { return from_suite(suite("appendix-identity", 3, 20)); }},
        {"Bergman projector", [] { return from_suite(suite("projector", 2)); }},
        {"Toeplitz composition", [] { return from_suite(suite("toeplitz", 2, 10)); }},
        {"trace cyclicity", trace_criterion},
        {"determinism", determinism},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.ok;
        std::printf("%s %2zu %s: %s (%.1fs)\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].name.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
