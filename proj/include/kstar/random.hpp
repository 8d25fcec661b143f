#pragma once

#include <cstdint>
#include <map>
#include <random>

#include "kstar/kahler.hpp"
#include "kstar/polynomial.hpp"

namespace kstar {

// Entries p/q with |p| <= max_abs and 1 <= q <= max_den.
struct RandomSpec {
    int max_abs = 3;
    int max_den = 3;
};

using Rng = std::mt19937_64;

bool positive_definite(const std::vector<std::vector<CRational>>& H);

Rat random_rational(Rng& rng, const RandomSpec& spec);
Rat random_positive_rational(Rng& rng, const RandomSpec& spec);
CRational random_complex(Rng& rng, const RandomSpec& spec);

// Mixed Phi jets (derivative values) with Phi_{JI} = conj(Phi_{IJ}) and a
// positive definite metric block, total order <= M.
std::map<Key, CRational> random_phi_table(int n, int M, Rng& rng, const RandomSpec& spec = {});
Context random_context(int n, int M, Rng& rng, const RandomSpec& spec = {});

// Random coefficients on the monomials of total degree lo..hi.
Polynomial random_polynomial(int n, int lo, int hi, Rng& rng, const RandomSpec& spec = {});
// Holomorphic part of a random polynomial of degree <= hi.
Polynomial random_holomorphic(int n, int hi, Rng& rng, const RandomSpec& spec = {});
// Real mixed polynomial of degree 3..hi added to the flat potential; the
// metric at the origin stays the identity.
ModelPtr random_perturbation(int n, int hi, Rng& rng, const RandomSpec& spec = {});

// Small complex rational point, entries (a + b i)/d with |a|, |b| <= 1, d in {2, 3}.
Point random_point(int n, Rng& rng);

struct RandomCase {
    ModelPtr model;
    Point point;
};
// Random perturbation and a base point where its metric is positive definite.
RandomCase random_case(int n, Rng& rng, const RandomSpec& spec = {}, int degree = 4);

}  // namespace kstar
