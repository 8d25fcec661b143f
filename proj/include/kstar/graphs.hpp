#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kstar/jet.hpp"
#include "kstar/kahler.hpp"
#include "kstar/laplace.hpp"
#include "kstar/wick.hpp"

namespace kstar {

enum class VertexKind : std::uint8_t { L = 0, R = 1, Solid = 2, Hollow = 3 };

const char* kind_name(VertexKind k);

// Vertex 0 is L, vertex 1 is R.  Edges run from the dbar-slot endpoint (tail)
// to the d-slot endpoint (head); parallel edges and self-loops allowed.
struct Graph {
    std::vector<VertexKind> kinds;
    std::vector<std::pair<int, int>> edges;

    int vertex_count() const { return (int)kinds.size(); }
    int solid_count() const;
    int chi() const { return (int)edges.size() - solid_count(); }
    std::vector<int> in_degree() const;
    std::vector<int> out_degree() const;
    // Empty string when the graph satisfies the class constraints.
    std::string violation() const;
    // edge multiplicity matrix m[tail][head]
    std::vector<std::vector<int>> multiplicity() const;
    static Graph from_multiplicity(const std::vector<VertexKind>& kinds, const std::vector<std::vector<int>>& m);
};

struct GraphRecord {
    Graph graph;      // canonical labeling
    std::int64_t aut = 1;
    int chi = 0;
    std::string key;  // canonical encoding
};

struct Canonical {
    Graph graph;
    std::string key;
    std::int64_t vertex_aut = 1;  // vertex permutations fixing L, R, kinds, edges
};

Canonical canonical_form(const Graph& g);
std::int64_t aut_size(const Graph& g);

// Connected pieces: every non-L/R vertex is joined to L or R ("attached"), or
// the graph is one connected vacuum component with isolated L, R ("vacuum").
// Cached per grade; safe to call from several threads.
const std::vector<GraphRecord>& attached_graphs(int chi);
const std::vector<GraphRecord>& vacuum_components(int chi);

// All graphs of grade k (vacuum components included), duplicate-free, in
// canonical order.  Materializes the full list; meant for small k.
std::vector<GraphRecord> enumerate_graphs(int k);

std::string graph_json(const GraphRecord& r);

// Vertex tensors with holomorphic slots raised by h^{ij}: for a vertex with
// holomorphic multi-index I fed by edges carrying antiholomorphic indices Jin,
// sum_I wick(I, Jin)/I! T[I, Jout].
template <class S>
class VertexTensors {
public:
    VertexTensors(const JetContext<S>& ctx, const TruncatedJet<S>* f1, const TruncatedJet<S>* f2)
        : ctx_(ctx), f1_(f1), f2_(f2), wick_(ctx.Hinv), n_(ctx.n)
    {
    }

    int n() const { return n_; }
    WickTable<S>& wick() { return wick_; }

    // Internal vertices and L; R is handled by raised_R.
    const S& value(VertexKind kind, Key jin, Key jout)
    {
        std::uint64_t tag = static_cast<std::uint64_t>(kind);
        auto [it, fresh] = cache_.try_emplace(Triple{tag, jin, jout}, S(0));
        if (fresh)
            it->second = compute(kind, jin, jout);
        return it->second;
    }

    // wick(I, Jin)/I! -- the coefficient multiplying d^I f2 at R.
    S raised_R_coefficient(Key I, Key jin) { return wick_(I, jin) * from_rational<S>(Rat(1) / mono::factorial(I, n_)); }

private:
    struct Triple {
        std::uint64_t a, b, c;
        bool operator==(const Triple& o) const { return a == o.a && b == o.b && c == o.c; }
    };
    struct TripleHash {
        size_t operator()(const Triple& t) const
        {
            return std::hash<std::uint64_t>()((t.a * 0x9E3779B97F4A7C15ull ^ t.b) * 0xC2B2AE3D27D4EB4Full ^ t.c);
        }
    };

    S raw(VertexKind kind, Key I, Key J)
    {
        switch (kind) {
        case VertexKind::Solid:
            return -ctx_.phi_at(mono::concat(I, n_, J));
        case VertexKind::Hollow:
            return ctx_.psi_at(mono::concat(I, n_, J));
        case VertexKind::L:
            return f1_->coeff(mono::concat(0, n_, J)) * from_rational<S>(mono::factorial(J, n_));
        case VertexKind::R:
            return f2_->coeff(I) * from_rational<S>(mono::factorial(I, n_));
        }
        return S(0);
    }

    S compute(VertexKind kind, Key jin, Key jout)
    {
        if (kind == VertexKind::L)
            return raw(kind, 0, jout);
        S total(0);
        for (Key I : mono::all_of_degree(n_, mono::degree(jin))) {
            const S& w = wick_(I, jin);
            if (is_zero(w))
                continue;
            S t = raw(kind, I, jout);
            if (is_zero(t))
                continue;
            total += w * t * from_rational<S>(Rat(1) / mono::factorial(I, n_));
        }
        return total;
    }

    const JetContext<S>& ctx_;
    const TruncatedJet<S>* f1_;
    const TruncatedJet<S>* f2_;
    WickTable<S> wick_;
    int n_;
    std::unordered_map<Triple, S, TripleHash> cache_;
};

namespace detail {

struct Bundle {
    int tail, head, mult;
};

// Contraction plan: bundles of parallel edges ordered so vertices close early.
struct Plan {
    int V = 0;
    std::vector<VertexKind> kinds;
    std::vector<Bundle> bundles;
    std::vector<std::vector<int>> closes;  // closes[b]: vertices whose last bundle is b
    std::vector<int> isolated;             // vertices with no bundle
};

Plan make_plan(const Graph& g);

// Multisets of size m over n indices with weight 1/K!.
const std::vector<std::pair<Key, Rat>>& index_multisets(int n, int m);

// Sum over edge-index assignments of prod_v T_v / prod(bundle multiplicity!),
// with L and R left open: (Jout_L, Jin_R) -> partial sum.
template <class S>
void contract(const Plan& plan, VertexTensors<S>& T, std::map<std::pair<Key, Key>, S>& open)
{
    int n = T.n();
    std::vector<Key> jin(plan.V, 0), jout(plan.V, 0);
    std::vector<const std::vector<std::pair<Key, Rat>>*> choices;
    for (auto& b : plan.bundles)
        choices.push_back(&index_multisets(n, b.mult));
    S base(1);
    for (int v : plan.isolated)
        if (plan.kinds[v] == VertexKind::Solid || plan.kinds[v] == VertexKind::Hollow)
            base = base * T.value(plan.kinds[v], 0, 0);
    if (is_zero(base))
        return;
    std::vector<S> stack(plan.bundles.size() + 1, S(0));
    stack[0] = base;
    std::function<void(size_t)> rec = [&](size_t b) {
        if (b == plan.bundles.size()) {
            auto [it, fresh] = open.try_emplace(std::make_pair(jout[0], jin[1]), stack[b]);
            if (!fresh)
                it->second += stack[b];
            return;
        }
        const Bundle& bd = plan.bundles[b];
        for (auto& [K, w] : *choices[b]) {
            jout[bd.tail] += K;
            jin[bd.head] += K;
            S acc = stack[b] * from_rational<S>(w);
            bool ok = true;
            for (int v : plan.closes[b]) {
                VertexKind kind = plan.kinds[v];
                if (kind == VertexKind::L || kind == VertexKind::R)
                    continue;
                const S& t = T.value(kind, jin[v], jout[v]);
                if (is_zero(t)) {
                    ok = false;
                    break;
                }
                acc = acc * t;
            }
            if (ok) {
                stack[b + 1] = std::move(acc);
                rec(b + 1);
            }
            jout[bd.tail] -= K;
            jin[bd.head] -= K;
        }
    };
    rec(0);
}

}  // namespace detail

// Open form of a graph: (Jout_L, Jin_R) -> W-part / |Aut|, R uncontracted.
template <class S>
std::map<std::pair<Key, Key>, S> graph_open_weight(const GraphRecord& r, VertexTensors<S>& T)
{
    detail::Plan plan = detail::make_plan(r.graph);
    std::map<std::pair<Key, Key>, S> open;
    detail::contract(plan, T, open);
    // contract() already divided by the parallel-edge part of |Aut|.
    Rat edge_fact(1);
    for (auto& b : plan.bundles)
        edge_fact *= factorial(b.mult);
    S scale = from_rational<S>(edge_fact / Rat((long)r.aut));
    for (auto& [k, v] : open)
        v = v * scale;
    return open;
}

// Close an open (J_L, Jin_R) map against f2 into an operator series entry set.
template <class S>
void close_open_weight(const std::map<std::pair<Key, Key>, S>& open, VertexTensors<S>& T, int k,
                       OperatorSeries<S>& op)
{
    int n = T.n();
    for (auto& [jk, v] : open) {
        Key JL = jk.first, jinR = jk.second;
        for (Key I : mono::all_of_degree(n, mono::degree(jinR))) {
            S c = T.raised_R_coefficient(I, jinR);
            if (is_zero(c))
                continue;
            op.add(k, JL, I, v * c);
        }
    }
}

template <class S>
struct GraphWeight {
    S W;
    std::int64_t aut = 1;
    int chi = 0;
};

// W_Gamma for the given graph (any labeling), with |Aut| and chi.
template <class S>
GraphWeight<S> graph_weight(const Graph& g, const JetContext<S>& ctx, const TruncatedJet<S>& f1,
                            const TruncatedJet<S>& f2)
{
    std::string bad = g.violation();
    if (!bad.empty())
        throw std::invalid_argument("invalid graph: " + bad);
    VertexTensors<S> T(ctx, &f1, &f2);
    detail::Plan plan = detail::make_plan(g);
    std::map<std::pair<Key, Key>, S> open;
    detail::contract(plan, T, open);
    Rat edge_fact(1);
    for (auto& b : plan.bundles)
        edge_fact *= factorial(b.mult);
    int n = ctx.n;
    S W(0);
    for (auto& [jk, v] : open) {
        S fl = f1.coeff(mono::concat(0, n, jk.first)) * from_rational<S>(mono::factorial(jk.first, n));
        if (is_zero(fl))
            continue;
        S fr(0);
        for (Key I : mono::all_of_degree(n, mono::degree(jk.second)))
            fr += T.raised_R_coefficient(I, jk.second) * f2.coeff(I) * from_rational<S>(mono::factorial(I, n));
        W += v * fl * fr;
    }
    GraphWeight<S> out{W * from_rational<S>(edge_fact), aut_size(g), g.chi()};
    return out;
}

// Sum over attached graphs of grade k of their open weights / |Aut|, closed
// into C[J,I] form; and the connected vacuum sum of grade k.
template <class S>
class GraphEngine {
public:
    GraphEngine(const JetContext<S>& ctx, int K) : ctx_(ctx), K_(K), T_(ctx, nullptr, nullptr)
    {
        if (ctx.phi_caps.total < 2 * K + 2)
            throw std::out_of_range("graph engine: context order " + std::to_string(ctx.phi_caps.total) +
                                    " too small for hbar^" + std::to_string(K) + " (needs " +
                                    std::to_string(2 * K + 2) + ")");
    }

    // Partition function of connected vacuum components, grade by grade.
    std::vector<S> connected_vacuum()
    {
        std::vector<S> z(K_ + 1, S(0));
        for (int k = 1; k <= K_; ++k)
            for (const GraphRecord& r : vacuum_components(k)) {
                auto open = graph_open_weight(r, T_);
                for (auto& [jk, v] : open)
                    z[k] += v;
            }
        return z;
    }

    // exp of the connected vacuum series.
    HbarSeries<S> vacuum_series()
    {
        std::vector<S> c = connected_vacuum();
        HbarSeries<S> x(K_);
        for (int k = 1; k <= K_; ++k)
            x[k] = c[k];
        HbarSeries<S> result = HbarSeries<S>::constant(K_, S(1));
        HbarSeries<S> power = result;
        for (int m = 1; m <= K_; ++m) {
            power = (power * x).scaled(from_rational<S>(Rat(1, m)));
            result += power;
        }
        return result;
    }

    OperatorSeries<S> attached_series()
    {
        OperatorSeries<S> op(ctx_.n, K_);
        for (int k = 0; k <= K_; ++k)
            for (const GraphRecord& r : attached_graphs(k))
                close_open_weight(graph_open_weight(r, T_), T_, k, op);
        return op;
    }

    // Full bidifferential series: attached part times vacuum series.
    OperatorSeries<S> operator_series()
    {
        OperatorSeries<S> att = attached_series();
        HbarSeries<S> vac = vacuum_series();
        OperatorSeries<S> op(ctx_.n, K_);
        for (int a = 0; a <= K_; ++a)
            for (auto& [ji, c] : att.C[a])
                for (int b = 0; a + b <= K_; ++b)
                    op.add(a + b, ji.first, ji.second, c * vac[b]);
        return op;
    }

private:
    const JetContext<S>& ctx_;
    int K_;
    VertexTensors<S> T_;
};

template <class S>
OperatorSeries<S> graph_operator_series(const JetContext<S>& ctx, int K)
{
    GraphEngine<S> eng(ctx, K);
    return eng.operator_series();
}

template <class S>
HbarSeries<S> bullet_via_graphs(const JetContext<S>& ctx, const TruncatedJet<S>& f1, const TruncatedJet<S>& f2, int K)
{
    if (f1.cutoff() < 2 * K || f2.cutoff() < 2 * K)
        throw std::out_of_range("function jets too shallow for hbar^" + std::to_string(K) + " (need order " +
                                std::to_string(2 * K) + ")");
    return apply_operator(graph_operator_series(ctx, K), f1, f2);
}

// Sum over an explicit list of full graphs, sum_Gamma hbar^chi W/|Aut|.
template <class S>
HbarSeries<S> bullet_via_graph_list(const std::vector<std::vector<GraphRecord>>& by_grade, const JetContext<S>& ctx,
                                    const TruncatedJet<S>& f1, const TruncatedJet<S>& f2)
{
    int K = (int)by_grade.size() - 1;
    HbarSeries<S> out(K);
    for (int k = 0; k <= K; ++k)
        for (const GraphRecord& r : by_grade[k]) {
            GraphWeight<S> w = graph_weight(r.graph, ctx, f1, f2);
            out[k] += w.W * from_rational<S>(Rat(1) / Rat((long)w.aut));
        }
    return out;
}

}  // namespace kstar
