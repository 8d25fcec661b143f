#include "doctest.h"
#include "kstar/random.hpp"
#include "kstar/wick.hpp"

using namespace kstar;

namespace {

// E[y^I ybar^J] = I! J! [a^I b^J] exp(sum a_i h^{ij} b_j)
CRational moment_from_generating_function(const MultiIndex& I, const MultiIndex& J,
                                          const std::vector<std::vector<CRational>>& hinv, int cutoff)
{
    int n = (int)I.size();
    TruncatedJet<CRational> q(n, cutoff);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            MultiIndex a(n, 0), b(n, 0);
            a[i] = b[j] = 1;
            q.add_to(q.key(a, b), hinv[i][j]);
        }
    return jet_exp(q).coeff(I, J) * CRational(mi_factorial(I) * mi_factorial(J));
}

}  // namespace

TEST_SUITE("wick") {

TEST_CASE("one dimension: k! h^k")
{
    CRational h = CRational::frac(3, 2);
    WickTable<CRational> w({{h}});
    CRational hk(1);
    Rat fact(1);
    for (int k = 0; k <= 8; ++k) {
        if (k > 0) {
            hk *= h;
            fact *= k;
        }
        CHECK(w(MultiIndex{k}, MultiIndex{k}) == CRational(fact) * hk);
        CHECK(w(MultiIndex{k}, MultiIndex{k + 1}) == CRational(0));
    }
}

TEST_CASE("contingency tables, bijections and the generating function agree")
{
    Rng rng(5);
    for (int t = 0; t < 4; ++t) {
        int n = 2 + t % 2;
        std::vector<std::vector<CRational>> h(n, std::vector<CRational>(n));
        for (auto& row : h)
            for (auto& x : row)
                x = random_complex(rng, {});
        WickTable<CRational> table(h);
        for (Key ki : mono::all_up_to(n, 4))
            for (Key kj : mono::all_of_degree(n, mono::degree(ki))) {
                MultiIndex I = mono::unpack(ki, n), J = mono::unpack(kj, n);
                CRational v = table(I, J);
                CHECK(v == wick_sum_bijections(I, J, h));
                CHECK(v == moment_from_generating_function(I, J, h, 8));
            }
    }
}

TEST_CASE("gaussian integral is linear in the integrand")
{
    std::vector<std::vector<CRational>> h{{CRational(2), CRational(0, 1)}, {CRational(0, -1), CRational(1)}};
    WickTable<CRational> w(h);
    TruncatedJet<CRational> f(2, 4);
    f.add_to(f.key({1, 0}, {1, 0}), CRational(3));
    f.add_to(f.key({0, 1}, {1, 0}), CRational(1));
    f.add_to(f.key({1, 0}, {0, 0}), CRational(7));  // odd: no contribution
    f.add_to(0, CRational(5));
    CHECK(gaussian_integrate(f, w) == CRational(3) * h[0][0] + h[1][0] + CRational(5));
    CHECK_THROWS_AS(WickTable<CRational>({{CRational(1), CRational(0)}}), std::invalid_argument);
}

}
