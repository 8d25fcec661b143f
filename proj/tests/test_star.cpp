#include "closed_forms.hpp"
#include "doctest.h"
#include "kstar/random.hpp"
#include "kstar/suites.hpp"

using namespace kstar;

namespace {

std::vector<CRational> vals(const HbarSeries<JetScalar>& s)
{
    std::vector<CRational> v;
    for (int k = 0; k <= s.order(); ++k)
        v.push_back(s[k].value());
    return v;
}

std::vector<CRational> hbar(std::initializer_list<CRational> c) { return std::vector<CRational>(c); }

struct Fixture {
    RandomCase c;
    StarAlgebraQ alg;
    HbarSeries<JetScalar> lifted(const Polynomial& p) const { return lift(alg.order(), function_jet(p, c.point)); }
};

Fixture fixture(const RandomCase& c, int K) { return {c, make_star_algebra(*c.model, c.point, K)}; }

}  // namespace

TEST_SUITE("star-algebra") {

TEST_CASE("unit element")
{
    Rng rng(40);
    std::vector<RandomCase> cases{{make_fubini_study(), random_point(1, rng)},
                                  {make_hyperbolic(), random_point(1, rng)},
                                  random_case(1, rng, {}),
                                  random_case(2, rng, {})};
    for (const RandomCase& c : cases) {
        int n = c.model->dim();
        Fixture fx = fixture(c, 2);
        const auto& e = fx.alg.unit();
        CHECK((e[1] + fx.alg.context().A).truncated(2).is_zero());
        CRational A = fx.alg.context().A.value();
        CHECK(e[2].value() == A * A - vacuum_D(build_context(*c.model, c.point, 6)));
        for (int t = 0; t < 3; ++t) {
            auto f = fx.lifted(random_polynomial(n, 0, 3, rng, {}));
            CHECK(vals(fx.alg.bullet(e, f)) == vals(f));
            CHECK(vals(fx.alg.bullet(f, e)) == vals(f));
        }
    }
}

TEST_CASE("unit on the model spaces")
{
    for (int n : {1, 2}) {
        StarAlgebraQ flat = make_star_algebra(*make_flat(n), Point(n, CRational::frac(1, 2)), 4);
        for (int l = 0; l <= 4; ++l)
            CHECK(flat.unit()[l] == JetScalar(l == 0 ? 1 : 0));
    }
    UnitElement fs = unit_element(*make_fubini_study(), Point{CRational(0)}, 3, 0, EngineKind::Graphs);
    std::vector<CRational> v;
    for (auto& j : fs.e)
        v.push_back(j.constant_term());
    CHECK(v == hbar({1, 1, 0, 0}));
    UnitElement hy = unit_element(*make_hyperbolic(), Point{CRational::frac(1, 3)}, 2);
    CHECK(hy.e[1].constant_term() == CRational(-1));
    CHECK(hy.e[2].constant_term() == CRational(0));
}

TEST_CASE("normalized product fixes the constants")
{
    Rng rng(41);
    for (int t = 0; t < 3; ++t) {
        RandomCase c = random_case(1 + t % 2, rng, {});
        int K = c.model->dim() == 1 ? 3 : 2;
        Fixture fx = fixture(c, K);
        auto f = fx.lifted(random_polynomial(c.model->dim(), 0, 3, rng, {}));
        auto one = fx.lifted(Polynomial::constant(c.model->dim(), CRational(1)));
        CHECK(vals(fx.alg.star(f, one)) == vals(f));
        CHECK(vals(fx.alg.star(one, f)) == vals(f));
        CHECK(fx.alg.star_values(f, one) == series_values(f));
    }
}

TEST_CASE("flat normalized product")
{
    Point z0{CRational(0)};
    auto zb = parse_polynomial("conj(z)", 1), z = parse_polynomial("z", 1);
    CHECK(coefficients(normalized_star(*make_flat(1), z0, zb, z, 3)) == hbar({0, 1, 0, 0}));
    CHECK(coefficients(normalized_star(*make_flat(1), z0, z, zb, 3)) == hbar({0, 0, 0, 0}));
    CHECK(coefficients(normalized_star(*make_flat(1), z0, zb.pow(2), z.pow(2), 3)) == hbar({0, 0, 2, 0}));
}

TEST_CASE("first order term and the Poisson bracket")
{
    Rng rng(42);
    for (int t = 0; t < 4; ++t) {
        RandomCase c = random_case(1 + t % 2, rng, {});
        int n = c.model->dim();
        Fixture fx = fixture(c, 1);
        Polynomial p1 = random_polynomial(n, 0, 3, rng, {}), p2 = random_polynomial(n, 0, 3, rng, {});
        Context ctx = build_context(*c.model, c.point, 4);
        auto j1 = p1.jet_at(c.point, 2), j2 = p2.jet_at(c.point, 2);
        CRational first(0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                first += ctx.Hinv[i][j] * j1.derivative(MultiIndex(n, 0), unit_index(n, j)) *
                         j2.derivative(unit_index(n, i), MultiIndex(n, 0));
        auto F1 = fx.lifted(p1), F2 = fx.lifted(p2);
        CHECK(fx.alg.star(F1, F2)[1].value() == first);
        CRational anti = fx.alg.star(F1, F2)[1].value() - fx.alg.star(F2, F1)[1].value();
        CHECK(anti == CRational(Rat(0), ratio(-1, 2)) * poisson_bracket(ctx, j1, j2));
    }
}

TEST_CASE("second order term in polarized form")
{
    Rng rng(43);
    for (int t = 0; t < 4; ++t) {
        int n = 1 + t % 2;
        RandomCase c = random_case(n, rng, {});
        Fixture fx = fixture(c, 2);
        testing::Geometry g = testing::geometry(*c.model, c.point);
        Polynomial p1 = random_polynomial(n, 0, 3, rng, {}), p2 = random_polynomial(n, 0, 3, rng, {});
        CRational got = fx.alg.star(fx.lifted(p1), fx.lifted(p2))[2].value();
        auto j1 = p1.jet_at(c.point, 4), j2 = p2.jet_at(c.point, 4);
        CRational crossed = testing::polarized_star2(g, j1, j2, testing::Contraction::Crossed);
        CRational divergence = testing::polarized_star2(g, j1, j2, testing::Contraction::Divergence);
        CHECK(got == crossed);
        if (n == 1)
            CHECK(got == divergence);
        else
            CHECK(got != divergence);  // the divergence reading fails once n > 1
    }
}

TEST_CASE("separation of variables in two dimensions")
{
    Rng rng(44);
    RandomCase c = random_case(2, rng, {});
    Fixture fx = fixture(c, 2);
    Polynomial a = parse_polynomial("z1^2 - 2/3*z2 + i*z1*z2", 2), b = parse_polynomial("conj(z2)^2 + 1/2*conj(z1)", 2);
    Polynomial f = random_polynomial(2, 0, 3, rng, {});
    CHECK(vals(fx.alg.star(fx.lifted(a), fx.lifted(f))) == vals(fx.lifted(a * f)));
    CHECK(vals(fx.alg.star(fx.lifted(f), fx.lifted(b))) == vals(fx.lifted(f * b)));
}

TEST_CASE("contravariant symbols")
{
    Point z0{CRational(0)};
    ModelPtr flat = make_flat(1);
    auto zzb = parse_polynomial("z*conj(z)", 1), z = parse_polynomial("z", 1), zb = parse_polynomial("conj(z)", 1);
    CHECK(coefficients(i_map(*flat, z0, zzb, 3)) == hbar({0, 1, 0, 0}));
    CHECK(coefficients(i_map(*flat, z0, zzb.pow(2), 3)) == hbar({0, 0, 2, 0}));
    CHECK(coefficients(i_inverse(*flat, z0, zzb, 3)) == hbar({0, -1, 0, 0}));
    CHECK(coefficients(hat_star(*flat, z0, zb, z, 3)) == hbar({0, 0, 0, 0}));
    CHECK(coefficients(hat_star(*flat, z0, z, zb, 3)) == hbar({0, -1, 0, 0}));

    Rng rng(45);
    RandomCase c{make_fubini_study(), random_point(1, rng)};
    Fixture fx = fixture(c, 3);
    for (int t = 0; t < 3; ++t) {
        auto f = fx.lifted(random_polynomial(1, 0, 3, rng, {}));
        CHECK(vals(fx.alg.i_map(fx.alg.i_inverse(f))) == vals(f));
        CHECK(vals(fx.alg.i_inverse(fx.alg.i_map(f))) == vals(f));
    }
}

}
