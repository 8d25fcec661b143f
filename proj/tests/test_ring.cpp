#include "doctest.h"
#include "kstar/jet_scalar.hpp"
#include "kstar/polynomial.hpp"
#include "kstar/rational_json.hpp"
#include "kstar/random.hpp"

using namespace kstar;

TEST_SUITE("ring-series") {

TEST_CASE("fractions are canonical")
{
    CHECK(ratio(2, 4) == ratio(1, 2));
    CHECK(CRational::frac(-6, 4).str() == "-3/2");
    CHECK(parse_crational("2/4") == CRational::frac(1, 2));
    CHECK((CRational(1, 2) * CRational(1, -2)) == CRational(5));
    CHECK((CRational(3, 4).inverse() * CRational(3, 4)) == CRational(1));
}

TEST_CASE("rational json round trip")
{
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        CRational c = random_complex(rng, {7, 9}) * CRational(mpz_class("123456789012345678901234567890"));
        nlohmann::ordered_json j;
        put_crational(j, c);
        CHECK(json_crational(j) == c);
    }
    CHECK(json_rational(nlohmann::ordered_json("6/8")) == ratio(3, 4));
}

TEST_CASE("packed monomials")
{
    Key k = mono::pack({2, 0, 1, 3});
    CHECK(mono::degree(k) == 6);
    CHECK(mono::unpack(k, 4) == std::vector<int>{2, 0, 1, 3});
    CHECK(mono::pack({1, 0, 0, 1}) + mono::pack({1, 0, 1, 2}) == k);
    CHECK(mono::slice(k, 2, 4) == mono::pack({1, 3}));
    CHECK(mono::concat(mono::pack({2, 0}), 2, mono::pack({1, 3})) == k);
    CHECK(mono::factorial(k, 4) == Rat(2 * 6));
    CHECK(mono::divides(mono::pack({1, 0, 1, 0}), k, 4));
    CHECK_FALSE(mono::divides(mono::pack({0, 1, 0, 0}), k, 4));
    // graded order
    CHECK(mono::pack({5, 0, 0, 0}) > mono::pack({0, 0, 0, 2}));
    CHECK(mono::pack({0, 0, 0, 6}) > mono::pack({5, 0, 0, 0}));
    CHECK(mono::all_up_to(2, 3).size() == 10);
}

TEST_CASE("polynomial parser and jets")
{
    Polynomial p = parse_polynomial("3/2*z*conj(z)^2 - i*z2 + (1+i)", 2);
    Point pt = parse_point("1/2,i", 2);
    CRational zb = pt[0].conj();
    CHECK(p.eval(pt) == CRational::frac(3, 2) * pt[0] * zb * zb - CRational(0, 1) * pt[1] + CRational(1, 1));
    auto jet = p.jet_at(pt, 3);
    CHECK(jet.constant_term() == p.eval(pt));
    // d/dz1 = 3/2 conj(z1)^2
    CHECK(jet.derivative({1, 0}, {0, 0}) == CRational::frac(3, 2) * zb * zb);
    // d^2/dconj(z1)^2 = 3 z1
    CHECK(jet.derivative({0, 0}, {2, 0}) == CRational(3) * pt[0]);
    CHECK(parse_polynomial("(z+1)^2", 1) == parse_polynomial("z^2 + 2*z + 1", 1));
    CHECK(parse_polynomial("conj(i*z)", 1) == parse_polynomial("-i*conj(z)", 1));
    CHECK_THROWS_AS(parse_polynomial("z +", 1), std::invalid_argument);
    CHECK_THROWS_AS(parse_polynomial("z3", 2), std::invalid_argument);
    CHECK_THROWS_AS(parse_point("1,2", 1), std::invalid_argument);
}

TEST_CASE("truncated jet functions")
{
    Rng rng(11);
    for (int t = 0; t < 10; ++t) {
        Polynomial q = random_polynomial(1, 1, 3, rng, {});
        TruncatedJet<CRational> a = q.jet_at(Point{CRational(0)}, 6);
        a.set(0, CRational(0));
        auto e = jet_exp(a);
        auto back = e;
        back.add_to(0, CRational(-1));
        CHECK(jet_log1p(back) == a);
        auto b = a;
        b.add_to(0, CRational(2, 1));
        CHECK(jet_mul(b, jet_inverse(b)) == TruncatedJet<CRational>::constant(1, 6, CRational(1)));
    }
}

TEST_CASE("jet scalars track their cutoff")
{
    JetScalar w = JetScalar::variable(1, 3, 0), wb = JetScalar::variable(1, 3, 1);
    JetScalar f = (JetScalar(1) + w) * (JetScalar(1) + w) * wb;
    CHECK(f.cutoff() == 3);
    CHECK(f.derivative({1}, {1}) == CRational(2));
    CHECK(f.diff(mono::pack({0, 1})).value() == CRational(1));
    JetScalar g = f * f;
    CHECK(g.cutoff() == 3);
    CHECK(g.coeff(mono::pack({0, 2})) == CRational(1));
    CHECK(g.coeff(mono::pack({2, 2})) == CRational(0));  // degree 4 is beyond the cutoff
    CHECK_THROWS_AS(f.diff(mono::pack({2, 2})), std::out_of_range);
}

TEST_CASE("hbar series inversion")
{
    auto s = HbarSeries<CRational>::from_hbar({CRational(2), CRational(1, 1), CRational::frac(1, 3)});
    auto inv = series_invert(s);
    auto one = s * inv;
    CHECK(one[0] == CRational(1));
    CHECK(one[1] == CRational(0));
    CHECK(one[2] == CRational(0));
}

}
