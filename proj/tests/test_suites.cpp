#include "doctest.h"
#include "kstar/suites.hpp"

using namespace kstar;

TEST_SUITE("cli-harness") {

TEST_CASE("every suite passes on a small run")
{
    for (const std::string& name : suite_names()) {
        SuiteConfig cfg;
        cfg.trials = 2;
        SuiteReport r = run_suite(name, cfg);
        INFO(name << ": " << r.counterexample);
        CHECK(r.ok());
        CHECK(r.counterexample.empty());
        CHECK(r.to_json()["suite"] == r.suite);
    }
}

TEST_CASE("reports are deterministic")
{
    SuiteConfig cfg;
    cfg.trials = 3;
    cfg.seed = 7;
    for (const char* name : {"poisson", "separation", "appendix-identity", "logdet"})
        CHECK(run_suite(name, cfg).to_json().dump() == run_suite(name, cfg).to_json().dump());
    SuiteConfig other = cfg;
    other.seed = 8;
    CHECK(run_suite("poisson", cfg).to_json().dump() != run_suite("poisson", other).to_json().dump());
}

TEST_CASE("configured models")
{
    SuiteConfig cfg;
    cfg.trials = 2;
    cfg.model = "fubini-study";
    CHECK(run_suite("unit", cfg).ok());
    cfg.model = "perturbation:z^2*conj(z)^2";
    cfg.point = {CRational::frac(1, 3)};
    CHECK(run_suite("poisson", cfg).ok());
}

TEST_CASE("configuration errors")
{
    CHECK_THROWS_AS(run_suite("no-such-suite", {}), std::invalid_argument);
    CHECK_THROWS(parse_model("perturbation:", 1));
    CHECK_THROWS(parse_model("not-a-model-or-file", 1));
    CHECK(parse_model("flat", 2)->dim() == 2);
    CHECK(parse_model("hyperbolic", 1)->dim() == 1);
}

TEST_CASE("engine comparison helper")
{
    Rng rng(60);
    RandomCase c = random_case(2, rng, {});
    Context ctx = build_context(*c.model, c.point, 8);
    auto f1 = random_polynomial(2, 0, 3, rng, {}).jet_at(c.point, 4);
    auto f2 = random_polynomial(2, 0, 3, rng, {}).jet_at(c.point, 4);
    EngineComparison cmp = compare_engines(ctx, f1, f2, 2);
    CHECK(cmp.first_difference == -1);
    CHECK(coefficients(cmp.oracle) == coefficients(cmp.graphs));
    CHECK(first_difference({CRational(1), CRational(2)}, {CRational(1), CRational(3)}) == 1);
    CHECK(first_difference({CRational(1)}, {CRational(1)}) == -1);
}

}
