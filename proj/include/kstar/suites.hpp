#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "kstar/kahler.hpp"
#include "kstar/random.hpp"
#include "kstar/star.hpp"
#include "kstar/trace.hpp"

namespace kstar {

// Model spec: flat, fubini-study, hyperbolic, perturbation:<polynomial>, or a
// path to a jet-table JSON file.  `n` applies to flat and perturbation.
ModelPtr parse_model(const std::string& spec, int n = 1);

// Negative K or trials mean "suite default".
struct SuiteConfig {
    std::string model;  // empty: the suite's own model set
    int n = 1;
    Point point;        // empty: suite default
    int K = -1;
    int trials = -1;
    std::uint64_t seed = 42;
    RandomSpec random;
    QuadratureSpec quadrature;
    EngineKind engine = EngineKind::Oracle;
};

struct SuiteReport {
    std::string suite;
    int K = 0;
    int trials = 0;
    int passed = 0;
    std::string counterexample;  // first failure, empty on success
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();

    bool ok() const { return trials > 0 && passed == trials; }
    nlohmann::ordered_json to_json() const;
};

const std::vector<std::string>& suite_names();
SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg);

// Index of the first differing coefficient, -1 when equal.
int first_difference(const std::vector<CRational>& a, const std::vector<CRational>& b);
std::vector<CRational> coefficients(const HbarSeries<CRational>& s);

struct EngineComparison {
    HbarSeries<CRational> oracle;
    HbarSeries<CRational> graphs;
    int first_difference = -1;
};
EngineComparison compare_engines(const Context& ctx, const TruncatedJet<CRational>& f1,
                                 const TruncatedJet<CRational>& f2, int K);

}  // namespace kstar
