#include <algorithm>
#include <set>

#include "closed_forms.hpp"
#include "doctest.h"
#include "kstar/graphs.hpp"
#include "kstar/random.hpp"

using namespace kstar;

namespace {

// exp(hbar sum dbar_i (x) d_i): C_k[J, I] = delta_{JI} / J! with |J| = k
OperatorSeries<CRational> flat_operator(int n, int K)
{
    OperatorSeries<CRational> op(n, K);
    for (int k = 0; k <= K; ++k)
        for (Key J : mono::all_of_degree(n, k))
            op.add(k, J, J, CRational(Rat(1) / mono::factorial(J, n)));
    return op;
}

Graph relabel(const Graph& g, const std::vector<int>& perm)
{
    Graph r;
    r.kinds.resize(g.kinds.size());
    for (size_t v = 0; v < g.kinds.size(); ++v)
        r.kinds[perm[v]] = g.kinds[v];
    for (auto [a, b] : g.edges)
        r.edges.emplace_back(perm[a], perm[b]);
    return r;
}

}  // namespace

TEST_SUITE("laplace-engine") {

TEST_CASE("flat space gives the Wick normal-ordered product")
{
    for (int n : {1, 2}) {
        Point p(n, CRational::frac(1, 2));
        Context ctx = build_context(*make_flat(n), p, 10);
        CHECK(bullet_operator_oracle(ctx, 4) == flat_operator(n, 4));
    }
    Context ctx = build_context(*make_flat(1), Point{CRational(0)}, 8);
    auto r = bullet_oracle(ctx, parse_polynomial("conj(z)", 1).jet_at(Point{CRational(0)}, 6),
                           parse_polynomial("z", 1).jet_at(Point{CRational(0)}, 6), 3);
    CHECK(r == HbarSeries<CRational>::from_hbar({CRational(0), CRational(1), CRational(0), CRational(0)}));
}

TEST_CASE("low-order closed form")
{
    Rng rng(17);
    for (int t = 0; t < 4; ++t) {
        RandomCase c = random_case(1 + t % 2, rng, {});
        auto expect = testing::low_order_bullet(testing::geometry(*c.model, c.point));
        Context ctx = build_context(*c.model, c.point, 6);
        CHECK(bullet_operator_oracle(ctx, 2) == expect);
    }
}

TEST_CASE("vacuum constants")
{
    Point z0{CRational(0)};
    CHECK(vacuum_D(build_context(*make_flat(2), Point(2, CRational(0)), 6)) == CRational(0));
    CHECK(vacuum_D(build_context(*make_fubini_study(), z0, 6)) == CRational(1));
    CHECK(vacuum_D(build_context(*make_hyperbolic(), z0, 6)) == CRational(1));
    // constant on the homogeneous models
    CHECK(vacuum_D(build_context(*make_fubini_study(), Point{CRational(Rat(1, 3), Rat(1, 2))}, 6)) == CRational(1));
}

TEST_CASE("jet mode evaluates to the point-mode operator")
{
    Point p{CRational::frac(1, 3)};
    ModelPtr m = make_fubini_study();
    auto point = bullet_operator_oracle(build_context(*m, p, 8), 3);
    auto jets = LaplaceEngine<JetScalar>(build_jet_context(*m, p, 8, 6, true, true), 3, 6).operator_series();
    for (int k = 0; k <= 3; ++k)
        for (auto& [ji, c] : point.C[k])
            CHECK(jets.at(k, ji.first, ji.second).value() == c);
}

TEST_CASE("operator tables round trip through JSON")
{
    Rng rng(2);
    RandomCase c = random_case(2, rng, {});
    auto op = bullet_operator_oracle(build_context(*c.model, c.point, 6), 2);
    SeriesHeader h{c.model->describe(), c.point, 2, "oracle"};
    std::string text = operator_series_json(op, h);
    SeriesHeader back;
    CHECK(operator_series_from_json(text, &back) == op);
    CHECK(back.point == c.point);
    CHECK(back.K == 2);
    CHECK(operator_series_json(operator_series_from_json(text), h) == text);
}

TEST_CASE("shallow jets are rejected")
{
    Context ctx = build_context(*make_fubini_study(), Point{CRational(0)}, 6);
    auto f = parse_polynomial("z", 1).jet_at(Point{CRational(0)}, 3);
    CHECK_THROWS_AS(bullet_oracle(ctx, f, f, 2), std::out_of_range);
    CHECK_THROWS_AS(bullet_oracle(ctx, f, f, 3), std::out_of_range);
}

}

TEST_SUITE("graph-engine") {

TEST_CASE("automorphisms")
{
    using VK = VertexKind;
    Graph two{{VK::L, VK::R}, {{0, 1}, {0, 1}}};
    CHECK(aut_size(two) == 2);
    Graph three{{VK::L, VK::R}, {{0, 1}, {0, 1}, {0, 1}}};
    CHECK(aut_size(three) == 6);
    // two solid vertices fed symmetrically by L, each with a loop and an edge to R
    Graph sym{{VK::L, VK::R, VK::Solid, VK::Solid}, {{0, 2}, {0, 3}, {2, 2}, {3, 3}, {2, 1}, {3, 1}}};
    CHECK(sym.violation().empty());
    CHECK(aut_size(sym) == 2);
    Graph loop2{{VK::L, VK::R, VK::Solid}, {{0, 2}, {2, 2}, {2, 2}}};
    CHECK(aut_size(loop2) == 2);
}

TEST_CASE("canonical form ignores the labeling of internal vertices")
{
    for (int k = 1; k <= 3; ++k)
        for (const GraphRecord& r : attached_graphs(k)) {
            int V = r.graph.vertex_count();
            if (V < 4)
                continue;
            std::vector<int> perm(V);
            for (int v = 0; v < V; ++v)
                perm[v] = v;
            std::reverse(perm.begin() + 2, perm.end());
            Canonical c = canonical_form(relabel(r.graph, perm));
            CHECK(c.key == r.key);
        }
}

TEST_CASE("enumerated graphs are valid, graded and distinct")
{
    for (int k = 0; k <= 2; ++k) {
        std::vector<GraphRecord> gs = enumerate_graphs(k);
        std::set<std::string> keys;
        for (const GraphRecord& r : gs) {
            CHECK(r.graph.violation().empty());
            CHECK(r.graph.chi() == k);
            CHECK(r.aut == aut_size(r.graph));
            keys.insert(r.key);
        }
        CHECK(keys.size() == gs.size());
    }
    // grade 1: L->R, L->hollow, hollow->R, and a looped solid vertex on either side
    CHECK(attached_graphs(1).size() == 5);
    CHECK(attached_graphs(2).size() == 99);
    CHECK(attached_graphs(3).size() == 3050);
    CHECK(vacuum_components(2).size() == 122);
}

TEST_CASE("graph sum equals the oracle")
{
    Point z0{CRational(0)};
    for (ModelPtr m : {make_flat(1), make_fubini_study(), make_hyperbolic()}) {
        Context ctx = build_context(*m, Point{CRational::frac(1, 4)}, 8);
        CHECK(graph_operator_series(ctx, 3) == bullet_operator_oracle(ctx, 3));
    }
    Rng rng(23);
    for (int t = 0; t < 4; ++t) {
        RandomCase c = random_case(1 + t % 2, rng, {});
        Context ctx = build_context(*c.model, c.point, 6);
        CHECK(graph_operator_series(ctx, 2) == bullet_operator_oracle(ctx, 2));
        auto f1 = random_polynomial(c.model->dim(), 0, 3, rng, {}).jet_at(c.point, 4);
        auto f2 = random_polynomial(c.model->dim(), 0, 3, rng, {}).jet_at(c.point, 4);
        CHECK(bullet_via_graphs(ctx, f1, f2, 2) == bullet_oracle(ctx, f1, f2, 2));
    }
    Context flat = build_context(*make_flat(2), Point(2, CRational(0)), 8);
    CHECK(graph_operator_series(flat, 3) == flat_operator(2, 3));
}

TEST_CASE("low-order closed form from graphs")
{
    Rng rng(18);
    for (int t = 0; t < 4; ++t) {
        RandomCase c = random_case(1 + t % 2, rng, {});
        auto expect = testing::low_order_bullet(testing::geometry(*c.model, c.point));
        CHECK(graph_operator_series(build_context(*c.model, c.point, 6), 2) == expect);
    }
}

}
