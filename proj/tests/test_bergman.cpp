#include "doctest.h"
#include "kstar/bergman.hpp"
#include "kstar/random.hpp"
#include "kstar/suites.hpp"

using namespace kstar;

namespace {

std::vector<CRational> constants(const std::vector<JetScalar>& v)
{
    std::vector<CRational> r;
    for (const JetScalar& j : v)
        r.push_back(j.value());
    return r;
}

std::vector<CRational> hbar(std::initializer_list<CRational> c) { return std::vector<CRational>(c); }

}  // namespace

TEST_SUITE("bergman-formal") {

TEST_CASE("contour integral equals the Laplace integral")
{
    Point origin{CRational(0)};
    Rng rng(50);
    Context flat = build_context(*make_flat(1), origin, 11);
    for (int t = 0; t < 3; ++t) {
        auto jet = random_polynomial(1, 0, 8, rng, {}).jet_at(origin, 9);
        CHECK(contour_integral(flat, jet, 4) == laplace_integral(flat, jet, 4));
    }
    for (int t = 0; t < 4; ++t) {
        Context ctx = random_context(1, 9, rng, {});
        auto jet = random_polynomial(1, 0, 4, rng, {}).jet_at(origin, 7);
        CHECK(contour_integral(ctx, jet, 3) == laplace_integral(ctx, jet, 3));
    }
}

TEST_CASE("A series")
{
    Point origin{CRational(0)};
    OintContext<CRational> fs = oint_context(build_context(*make_fubini_study(), origin, 9), 3);
    auto A = a_coefficients(fs, 4);
    CHECK(a_relation_failure(fs, A) == -1);
    CHECK(A[0].coeff(-1, 0) == CRational(-1));
    CHECK(A[0].coeff(0, 1) == CRational(-1));
    CHECK(A[0].truncated(1).terms().size() == 2);
    for (size_t k = 0; k < A.size(); ++k)
        CHECK(A[k].pole_order() <= int(k) + 1);

    OintContext<CRational> flat = oint_context(build_context(*make_flat(1), origin, 9), 3);
    auto B = a_coefficients(flat, 4);
    CHECK(B[0].coeff(-1, 0) == CRational(-1));
    for (size_t k = 1; k < B.size(); ++k)
        CHECK(B[k].is_zero());

    Rng rng(51);
    OintContext<CRational> rc = oint_context(random_context(1, 9, rng, {}), 3);
    auto Ar = a_coefficients(rc, 4);
    CHECK(a_relation_failure(rc, Ar) == -1);
    Ar[1] = Ar[1] + Ar[0];
    CHECK(a_relation_failure(rc, Ar) == 1);
}

TEST_CASE("projector on simple symbols")
{
    Point origin{CRational(0)};
    Polynomial zzb = parse_polynomial("z*conj(z)", 1);
    for (ModelPtr m : {make_flat(1), make_fubini_study()})
        CHECK(constants(projector_apply(*m, origin, zzb, 3, 1)) == hbar({0, 1, 0, 0}));
    Rng rng(52);
    for (ModelPtr m : {make_flat(1), make_fubini_study(), make_hyperbolic()}) {
        Point p = random_point(1, rng);
        Polynomial a = random_holomorphic(1, 3, rng, {});
        std::vector<JetScalar> pa = Projector(*m, p, 2, 2, false).apply(a);
        CHECK(pa[0] == function_jet(a, p).truncated(2));
        CHECK(pa[1].is_zero());
        CHECK(pa[2].is_zero());
    }
}

TEST_CASE("frozen and full evaluation agree")
{
    Rng rng(53);
    for (ModelPtr m : {make_fubini_study(), make_hyperbolic()}) {
        Point p = random_point(1, rng);
        Polynomial f = random_polynomial(1, 0, 2, rng, {});
        std::vector<JetScalar> full = projector_apply(*m, p, f, 2, 2, true);
        std::vector<JetScalar> frozen = projector_apply(*m, p, f, 2, 2, false);
        for (int k = 0; k <= 2; ++k) {
            CHECK(is_holomorphic_jet(full[k]));
            CHECK(full[k] == frozen[k]);
        }
    }
}

TEST_CASE("projector is idempotent")
{
    Rng rng(54);
    for (ModelPtr m : {make_flat(1), make_fubini_study()}) {
        ProjectorCheck pc = projector_check(*m, random_point(1, rng), random_polynomial(1, 0, 3, rng, {}), 2);
        CHECK(pc.holomorphic);
        CHECK(pc.idempotent);
        CHECK(pc.once == pc.twice);
    }
}

TEST_CASE("Toeplitz composition")
{
    Rng rng(55);
    for (int t = 0; t < 3; ++t) {
        RandomCase c = t == 0 ? RandomCase{make_fubini_study(), random_point(1, rng)} : random_case(1, rng, {});
        Polynomial f1 = random_polynomial(1, 0, 2, rng, {}), f2 = random_polynomial(1, 0, 2, rng, {});
        Polynomial g = random_holomorphic(1, 2, rng, {});
        ToeplitzCheck tc = toeplitz_compose_check(*c.model, c.point, f1, f2, g, 2);
        CHECK(tc.equal);
        CHECK(tc.first_mismatch == -1);
    }
    Point origin{CRational(0)};
    Polynomial z = parse_polynomial("z", 1), zb = parse_polynomial("conj(z)", 1);
    CHECK(toeplitz_compose_check(*make_flat(1), origin, zb, z, z, 2).equal);
    RandomCase c = random_case(1, rng, {});
    Polynomial f1 = random_polynomial(1, 1, 2, rng, {}), f2 = random_polynomial(1, 1, 2, rng, {});
    ToeplitzCheck off = toeplitz_compose_check(*c.model, c.point, f1, f2, parse_polynomial("z*conj(z)^2 + conj(z)", 1), 2);
    CHECK_FALSE(off.equal);
    CHECK(off.first_mismatch >= 0);
}

}
