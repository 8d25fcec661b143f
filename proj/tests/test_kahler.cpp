#include "doctest.h"
#include "kstar/kahler.hpp"
#include "kstar/laplace.hpp"
#include "kstar/random.hpp"

using namespace kstar;

namespace {

Rat abs2(const CRational& z) { return z.norm2(); }

}  // namespace

TEST_SUITE("kahler-model") {

TEST_CASE("A is constant on the sphere and the disc")
{
    Rng rng(21);
    for (int t = 0; t < 5; ++t) {
        Point p = random_point(1, rng);
        Context fs = build_context(*make_fubini_study(), p, 6);
        Context hy = build_context(*make_hyperbolic(), p, 6);
        CHECK(fs.A == CRational(-1));
        CHECK(hy.A == CRational(1));
        Rat s = 1 + abs2(p[0]), d = 1 - abs2(p[0]);
        CHECK(fs.Hinv[0][0] == CRational(s * s));
        CHECK(hy.Hinv[0][0] == CRational(d * d));
        CHECK(fs.psi_at({1}, {1}) == CRational(-2 / (s * s)));
    }
    Context flat = build_context(*make_flat(2), Point{CRational(0), CRational(0)}, 6);
    CHECK(flat.A == CRational(0));
    CHECK(flat.psi.empty());
    CHECK(flat.Hinv == std::vector<std::vector<CRational>>{{1, 0}, {0, 1}});
}

TEST_CASE("diastatic jet of the sphere at the origin")
{
    Context fs = build_context(*make_fubini_study(), Point{CRational(0)}, 6);
    auto phi = calabi_jet(fs, 6);
    // -log(1 + y ybar)
    CHECK(phi.coeff(mono::pack({1, 1})) == CRational(-1));
    CHECK(phi.coeff(mono::pack({2, 2})) == CRational::frac(1, 2));
    CHECK(phi.coeff(mono::pack({3, 3})) == CRational::frac(-1, 3));
    CHECK(phi.coeff(mono::pack({2, 1})) == CRational(0));
    CHECK(phi.coeff(mono::pack({1, 0})) == CRational(0));
}

TEST_CASE("inverse metric")
{
    Rng rng(4);
    for (int t = 0; t < 10; ++t) {
        Context ctx = random_context(2, 4, rng);
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) {
                CRational s(0);
                for (int j = 0; j < 2; ++j)
                    s += ctx.Hinv[i][j] * ctx.H[k][j];
                CHECK(s == CRational(i == k ? 1 : 0));
            }
    }
}

TEST_CASE("log-det identities hold on every context and catch corruption")
{
    Rng rng(8);
    for (int t = 0; t < 8; ++t) {
        Context ctx = t % 2 ? random_context(1 + t % 3 / 2 + 0, 6, rng) : [&] {
            RandomCase c = random_case(1 + t / 4, rng, {});
            return build_context(*c.model, c.point, 6);
        }();
        CHECK(logdet_identity_failure(ctx).empty());
        Context bad = ctx;
        bad.psi.begin()->second += CRational(1, 0);
        CHECK_FALSE(logdet_identity_failure(bad).empty());
    }
}

TEST_CASE("jet tables round trip")
{
    Rng rng(12);
    for (int n : {1, 2}) {
        RandomCase c = random_case(n, rng, {});
        std::string text = dump_jet_table(*c.model, c.point, 6);
        ModelPtr table = load_jet_table(text);
        CHECK_FALSE(table->closed_form());
        Context a = build_context(*c.model, c.point, 6), b = build_context(*table, c.point, 6);
        CHECK(a.phi == b.phi);
        CHECK(a.psi == b.psi);
        CHECK(a.A == b.A);
        CHECK(dump_jet_table(*table, c.point, 6) == text);
        CHECK_THROWS(build_context(*table, c.point, 8));
    }
    CHECK_THROWS_AS(load_jet_table("{\"n\": 1}"), std::invalid_argument);
    CHECK_THROWS_AS(load_jet_table("not json"), std::invalid_argument);
}

TEST_CASE("jet-mode contexts carry derivatives")
{
    Point p{CRational::frac(1, 3)};
    JetModeContext jc = build_jet_context(*make_fubini_study(), p, 6, 2, true, true);
    Context ctx = build_context(*make_fubini_study(), p, 6);
    CHECK(jc.A.value() == ctx.A);
    CHECK(jc.Hinv[0][0].value() == ctx.Hinv[0][0]);
    // d/dz (1 + z zbar)^2 = 2 (1 + z zbar) zbar
    Rat s = 1 + abs2(p[0]);
    CHECK(jc.Hinv[0][0].derivative({1}, {0}) == CRational(2 * s) * p[0].conj());
    CHECK(jc.Hinv[0][0].derivative({1}, {1}) == CRational(2 * s + 2 * abs2(p[0])));
    CHECK(jc.A.derivative({1}, {0}) == CRational(0));
    JetModeContext hol = build_jet_context(*make_fubini_study(), p, 6, 2, true, false);
    CHECK(hol.Hinv[0][0].derivative({1}, {0}) == CRational(2 * s) * p[0].conj());
    CHECK(hol.Hinv[0][0].derivative({0}, {1}) == CRational(0));
}

TEST_CASE("transport agrees with the pulled-back potential")
{
    // w = z + c z^2, flat target: the pulled-back potential is |z + c z^2|^2
    Rng rng(31);
    for (int t = 0; t < 4; ++t) {
        CRational c = random_complex(rng, {});
        Point z0 = random_point(1, rng);
        Polynomial w = parse_polynomial("z", 1) + parse_polynomial("z^2", 1).scaled(c);
        Point target{w.eval(z0)};
        CRational slope = CRational(1) + CRational(2) * c * z0[0];
        if (slope.is_zero())
            continue;
        int M = 6;
        TruncatedJet<CRational> delta(1, M);
        delta.set(mono::pack({1, 0}), slope);
        delta.set(mono::pack({2, 0}), c);
        Context ctx = build_context(*make_flat(1), target, M);
        Transported pulled = transport_jets(delta, z0, ctx, {});
        Polynomial extra = w * w.conj() - parse_polynomial("z*conj(z)", 1);
        Context direct = build_context(*make_perturbation(extra), z0, M);
        for (auto& [k, v] : direct.phi)
            CHECK(pulled.ctx.phi_at(k) == v);
        CHECK(pulled.ctx.A == direct.A);
        CHECK(pulled.ctx.Hinv == direct.Hinv);
    }
}

TEST_CASE("transport needs the function jets too")
{
    Rng rng(32);
    ModelPtr m = make_fubini_study();
    Point z0{CRational::frac(1, 4)};
    CRational c = CRational::frac(1, 2);
    Point target{z0[0] + c * z0[0] * z0[0]};
    int M = 6, K = 2;
    TruncatedJet<CRational> delta(1, M);
    delta.set(mono::pack({1, 0}), CRational(1) + CRational(2) * c * z0[0]);
    delta.set(mono::pack({2, 0}), c);
    Context ctx = build_context(*m, target, M);
    Polynomial f1 = parse_polynomial("z^2*conj(z)", 1), f2 = parse_polynomial("z*conj(z)^2 + z", 1);
    auto j1 = f1.jet_at(target, M), j2 = f2.jet_at(target, M);
    Transported pulled = transport_jets(delta, z0, ctx, {j1, j2});
    auto expect = bullet_oracle(ctx, j1, j2, K);
    CHECK(bullet_oracle(pulled.ctx, pulled.fjets[0], pulled.fjets[1], K) == expect);
    // untransported function jets at the source point: a different answer
    auto wrong = bullet_oracle(pulled.ctx, f1.jet_at(z0, M), f2.jet_at(z0, M), K);
    CHECK(wrong != expect);
}

}
