#include "kstar/graphs.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace kstar {

const char* kind_name(VertexKind k)
{
    switch (k) {
    case VertexKind::L:
        return "L";
    case VertexKind::R:
        return "R";
    case VertexKind::Solid:
        return "solid";
    case VertexKind::Hollow:
        return "hollow";
    }
    return "?";
}

int Graph::solid_count() const
{
    return (int)std::count(kinds.begin(), kinds.end(), VertexKind::Solid);
}

std::vector<int> Graph::in_degree() const
{
    std::vector<int> d(kinds.size(), 0);
    for (auto& e : edges)
        ++d[e.second];
    return d;
}

std::vector<int> Graph::out_degree() const
{
    std::vector<int> d(kinds.size(), 0);
    for (auto& e : edges)
        ++d[e.first];
    return d;
}

std::vector<std::vector<int>> Graph::multiplicity() const
{
    std::vector<std::vector<int>> m(kinds.size(), std::vector<int>(kinds.size(), 0));
    for (auto& e : edges)
        ++m[e.first][e.second];
    return m;
}

Graph Graph::from_multiplicity(const std::vector<VertexKind>& kinds, const std::vector<std::vector<int>>& m)
{
    Graph g;
    g.kinds = kinds;
    for (size_t u = 0; u < m.size(); ++u)
        for (size_t v = 0; v < m.size(); ++v)
            for (int c = 0; c < m[u][v]; ++c)
                g.edges.emplace_back((int)u, (int)v);
    return g;
}

std::string Graph::violation() const
{
    if (kinds.size() < 2 || kinds[0] != VertexKind::L || kinds[1] != VertexKind::R)
        return "vertex 0 must be L and vertex 1 must be R";
    for (size_t v = 2; v < kinds.size(); ++v)
        if (kinds[v] == VertexKind::L || kinds[v] == VertexKind::R)
            return "more than one L or R vertex";
    for (auto& e : edges)
        if (e.first < 0 || e.second < 0 || e.first >= vertex_count() || e.second >= vertex_count())
            return "edge endpoint out of range";
    auto in = in_degree(), out = out_degree();
    if (in[0] != 0)
        return "L has incoming edges";
    if (out[1] != 0)
        return "R has outgoing edges";
    for (size_t v = 2; v < kinds.size(); ++v) {
        if (kinds[v] == VertexKind::Solid && (in[v] < 1 || out[v] < 1 || in[v] + out[v] < 3))
            return "solid vertex " + std::to_string(v) + " needs in >= 1, out >= 1, degree >= 3";
        if (kinds[v] == VertexKind::Hollow && in[v] + out[v] < 1)
            return "hollow vertex " + std::to_string(v) + " is isolated";
    }
    if (chi() < 0)
        return "negative grade";
    if ((int)edges.size() > 3 * chi())
        return "edge count exceeds 3*chi";
    return "";
}

namespace {

using Matrix = std::vector<std::vector<int>>;
using Partition = std::vector<std::vector<int>>;

struct Canonizer {
    int V;
    const std::vector<VertexKind>& kinds;
    const Matrix& m;
    std::string best;
    std::vector<int> best_order;
    std::int64_t count = 0;

    void refine(Partition& P) const
    {
        while (true) {
            std::vector<int> cell(V);
            for (size_t c = 0; c < P.size(); ++c)
                for (int v : P[c])
                    cell[v] = (int)c;
            Partition next;
            bool split = false;
            for (auto& C : P) {
                if (C.size() == 1) {
                    next.push_back(C);
                    continue;
                }
                std::vector<std::pair<std::vector<int>, int>> sig;
                for (int v : C) {
                    std::vector<int> s(2 * P.size(), 0);
                    for (int w = 0; w < V; ++w) {
                        s[2 * cell[w]] += m[v][w];
                        s[2 * cell[w] + 1] += m[w][v];
                    }
                    sig.emplace_back(std::move(s), v);
                }
                std::sort(sig.begin(), sig.end());
                std::vector<int> cur{sig[0].second};
                for (size_t i = 1; i < sig.size(); ++i) {
                    if (sig[i].first != sig[i - 1].first) {
                        next.push_back(cur);
                        cur.clear();
                        split = true;
                    }
                    cur.push_back(sig[i].second);
                }
                next.push_back(cur);
            }
            P = std::move(next);
            if (!split)
                return;
        }
    }

    void search(Partition P)
    {
        refine(P);
        size_t target = P.size();
        for (size_t c = 0; c < P.size(); ++c)
            if (P[c].size() > 1) {
                target = c;
                break;
            }
        if (target == P.size()) {
            std::vector<int> order;
            for (auto& C : P)
                order.push_back(C[0]);
            std::string code;
            code.reserve(V + V * V);
            for (int v : order)
                code.push_back((char)kinds[v]);
            for (int u : order)
                for (int v : order)
                    code.push_back((char)m[u][v]);
            if (count == 0 || code < best) {
                best = std::move(code);
                best_order = order;
                count = 1;
            } else if (code == best) {
                ++count;
            }
            return;
        }
        for (int v : P[target]) {
            Partition Q;
            for (size_t c = 0; c < P.size(); ++c) {
                if (c != target) {
                    Q.push_back(P[c]);
                    continue;
                }
                Q.push_back({v});
                std::vector<int> rest;
                for (int w : P[c])
                    if (w != v)
                        rest.push_back(w);
                Q.push_back(rest);
            }
            search(std::move(Q));
        }
    }
};

}  // namespace

Canonical canonical_form(const Graph& g)
{
    std::string bad = g.violation();
    if (!bad.empty())
        throw std::invalid_argument("invalid graph: " + bad);
    int V = g.vertex_count();
    Matrix m = g.multiplicity();
    auto in = g.in_degree(), out = g.out_degree();
    // initial cells: L, R, then internal vertices by (kind, in, out, loops)
    std::vector<std::pair<std::vector<int>, int>> inv;
    for (int v = 2; v < V; ++v)
        inv.push_back({{(int)g.kinds[v], in[v], out[v], m[v][v], m[0][v], m[v][1]}, v});
    std::sort(inv.begin(), inv.end());
    Partition P{{0}, {1}};
    for (size_t i = 0; i < inv.size(); ++i) {
        if (i == 0 || inv[i].first != inv[i - 1].first)
            P.push_back({});
        P.back().push_back(inv[i].second);
    }
    Canonizer cz{V, g.kinds, m, {}, {}, 0};
    cz.search(P);
    Canonical out_c;
    std::vector<int> pos(V);
    for (int i = 0; i < V; ++i)
        pos[cz.best_order[i]] = i;
    out_c.graph.kinds.resize(V);
    for (int v = 0; v < V; ++v)
        out_c.graph.kinds[pos[v]] = g.kinds[v];
    for (auto& e : g.edges)
        out_c.graph.edges.emplace_back(pos[e.first], pos[e.second]);
    std::sort(out_c.graph.edges.begin(), out_c.graph.edges.end());
    out_c.key = cz.best;
    out_c.vertex_aut = cz.count;
    return out_c;
}

std::int64_t aut_size(const Graph& g)
{
    Canonical c = canonical_form(g);
    std::int64_t a = c.vertex_aut;
    Matrix m = g.multiplicity();
    for (auto& row : m)
        for (int x : row)
            for (int k = 2; k <= x; ++k)
                a *= k;
    return a;
}

namespace {

struct VType {
    VertexKind kind;
    int in, out;
    int cost() const { return in + out - (kind == VertexKind::Solid ? 2 : 0); }
    bool operator==(const VType& o) const { return kind == o.kind && in == o.in && out == o.out; }
};

std::vector<VType> candidate_types(int budget)
{
    std::vector<VType> t;
    for (int d = 1; d <= budget + 2; ++d)
        for (int a = 0; a <= d; ++a) {
            int b = d - a;
            if (a >= 1 && b >= 1 && d >= 3 && d - 2 <= budget)
                t.push_back({VertexKind::Solid, a, b});
            if (d <= budget)
                t.push_back({VertexKind::Hollow, a, b});
        }
    return t;
}

struct Enumerator {
    bool vacuum;  // connected vacuum pieces, else attached graphs
    std::unordered_map<std::string, size_t> seen;
    std::vector<GraphRecord> out;
    int chi;

    // vertex list
    std::vector<VType> types;  // internal vertices
    int dL = 0, dR = 0;
    int V = 0;
    Matrix m;
    std::vector<int> rin, rout;  // remaining degrees during the internal fill

    bool connected_ok() const
    {
        std::vector<int> parent(V);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
        for (int u = 0; u < V; ++u)
            for (int v = 0; v < V; ++v)
                if (m[u][v])
                    parent[find(u)] = find(v);
        if (vacuum) {
            int root = find(2);
            for (int v = 3; v < V; ++v)
                if (find(v) != root)
                    return false;
            return true;
        }
        for (int v = 2; v < V; ++v)
            if (find(v) != find(0) && find(v) != find(1))
                return false;
        return true;
    }

    void emit()
    {
        if (!connected_ok())
            return;
        std::vector<VertexKind> kinds{VertexKind::L, VertexKind::R};
        for (auto& t : types)
            kinds.push_back(t.kind);
        Graph g = Graph::from_multiplicity(kinds, m);
        Canonical c = canonical_form(g);
        if (seen.count(c.key))
            return;
        seen.emplace(c.key, out.size());
        GraphRecord r;
        r.graph = c.graph;
        r.key = c.key;
        r.chi = chi;
        r.aut = c.vertex_aut;
        for (auto& row : m)
            for (int x : row)
                for (int k = 2; k <= x; ++k)
                    r.aut *= k;
        out.push_back(std::move(r));
    }

    // Off-diagonal internal block, cell (u, w) in row-major order.
    void fill(int u, int w)
    {
        if (u == V) {
            emit();
            return;
        }
        if (w == V) {
            if (rout[u] == 0)
                fill(u + 1, 2);
            return;
        }
        if (w == u) {
            fill(u, w + 1);
            return;
        }
        int hi = std::min(rout[u], rin[w]);
        // remaining in-capacity of later columns in this row bounds from below
        int later = 0;
        for (int x = w + 1; x < V; ++x)
            if (x != u)
                later += rin[x];
        int lo = std::max(0, rout[u] - later);
        for (int k = lo; k <= hi; ++k) {
            m[u][w] = k;
            rout[u] -= k;
            rin[w] -= k;
            fill(u, w + 1);
            rout[u] += k;
            rin[w] += k;
        }
        m[u][w] = 0;
    }

    // Per-vertex (from L, to R, loops), nondecreasing within identical types.
    void attach(int v, int leftL, int leftR)
    {
        if (v == V) {
            if (leftL || leftR)
                return;
            int sin = 0, sout = 0;
            for (int x = 2; x < V; ++x) {
                sin += rin[x];
                sout += rout[x];
            }
            if (sin != sout)
                return;
            fill(2, 2);
            return;
        }
        const VType& t = types[v - 2];
        bool tied = v > 2 && types[v - 3] == t;
        for (int a = 0; a <= std::min(t.in, leftL); ++a)
            for (int b = 0; b <= std::min(t.out, leftR); ++b)
                for (int s = 0; s <= std::min(t.in - a, t.out - b); ++s) {
                    if (tied) {
                        std::array<int, 3> prev{m[0][v - 1], m[v - 1][1], m[v - 1][v - 1]};
                        if (std::array<int, 3>{a, b, s} < prev)
                            continue;
                    }
                    m[0][v] = a;
                    m[v][1] = b;
                    m[v][v] = s;
                    rin[v] = t.in - a - s;
                    rout[v] = t.out - b - s;
                    attach(v + 1, leftL - a, leftR - b);
                }
        m[0][v] = m[v][1] = m[v][v] = 0;
    }

    void run_config()
    {
        V = 2 + (int)types.size();
        m.assign(V, std::vector<int>(V, 0));
        rin.assign(V, 0);
        rout.assign(V, 0);
        if (vacuum && types.empty())
            return;
        // a connected piece needs enough edges to span
        int E = chi;
        for (auto& t : types)
            E += t.kind == VertexKind::Solid ? 1 : 0;
        if (vacuum && E < (int)types.size() - 1)
            return;
        if (!vacuum && E < (int)types.size())
            return;
        for (int lr = 0; lr <= std::min(dL, dR); ++lr) {
            if (vacuum && lr > 0)
                break;
            m[0][1] = lr;
            attach(2, dL - lr, dR - lr);
        }
        m[0][1] = 0;
    }

    void choose_types(const std::vector<VType>& cand, size_t from, int budget, int balance)
    {
        // balance = sum in - sum out of internal vertices so far, plus dR - dL
        if (budget == 0) {
            if (balance == 0)
                run_config();
            return;
        }
        for (size_t i = from; i < cand.size(); ++i) {
            const VType& t = cand[i];
            if (t.cost() > budget)
                continue;
            types.push_back(t);
            choose_types(cand, i, budget - t.cost(), balance + t.in - t.out);
            types.pop_back();
        }
    }

    void run()
    {
        int full = 2 * chi;
        for (dL = 0; dL <= full; ++dL)
            for (dR = 0; dL + dR <= full; ++dR) {
                if (vacuum && (dL || dR))
                    continue;
                int budget = full - dL - dR;
                choose_types(candidate_types(budget), 0, budget, dR - dL);
            }
        std::sort(out.begin(), out.end(), [](const GraphRecord& a, const GraphRecord& b) { return a.key < b.key; });
    }
};

std::mutex cache_mu;
std::map<int, std::vector<GraphRecord>> attached_cache, vacuum_cache;

const std::vector<GraphRecord>& cached(bool vacuum, int chi)
{
    if (chi < 0)
        throw std::invalid_argument("negative graph grade");
    std::lock_guard<std::mutex> lock(cache_mu);
    auto& cache = vacuum ? vacuum_cache : attached_cache;
    auto it = cache.find(chi);
    if (it != cache.end())
        return it->second;
    Enumerator e;
    e.vacuum = vacuum;
    e.chi = chi;
    e.run();
    return cache.emplace(chi, std::move(e.out)).first->second;
}

}  // namespace

const std::vector<GraphRecord>& attached_graphs(int chi)
{
    return cached(false, chi);
}

const std::vector<GraphRecord>& vacuum_components(int chi)
{
    return cached(true, chi);
}

std::vector<GraphRecord> enumerate_graphs(int k)
{
    std::vector<GraphRecord> result;
    std::vector<const GraphRecord*> comps;
    for (int c = 1; c <= k; ++c)
        for (auto& r : vacuum_components(c))
            comps.push_back(&r);
    std::vector<const GraphRecord*> chosen;
    std::function<void(const GraphRecord&, size_t, int)> rec = [&](const GraphRecord& base, size_t from, int left) {
        if (left == 0) {
            Graph g = base.graph;
            for (const GraphRecord* c : chosen) {
                int offset = g.vertex_count() - 2;
                for (size_t v = 2; v < c->graph.kinds.size(); ++v)
                    g.kinds.push_back(c->graph.kinds[v]);
                for (auto& e : c->graph.edges)
                    g.edges.emplace_back(e.first + offset, e.second + offset);
            }
            Canonical cf = canonical_form(g);
            GraphRecord r;
            r.graph = cf.graph;
            r.key = cf.key;
            r.chi = k;
            r.aut = aut_size(cf.graph);
            result.push_back(std::move(r));
            return;
        }
        for (size_t i = from; i < comps.size(); ++i) {
            if (comps[i]->chi > left)
                continue;
            chosen.push_back(comps[i]);
            rec(base, i, left - comps[i]->chi);
            chosen.pop_back();
        }
    };
    for (int a = 0; a <= k; ++a)
        for (auto& r : attached_graphs(a))
            rec(r, 0, k - a);
    std::sort(result.begin(), result.end(), [](const GraphRecord& a, const GraphRecord& b) { return a.key < b.key; });
    return result;
}

std::string graph_json(const GraphRecord& r)
{
    nlohmann::ordered_json j;
    j["chi"] = r.chi;
    j["aut"] = r.aut;
    j["vertices"] = nlohmann::ordered_json::array();
    for (auto k : r.graph.kinds)
        j["vertices"].push_back(kind_name(k));
    j["edges"] = nlohmann::ordered_json::array();
    for (auto& e : r.graph.edges)
        j["edges"].push_back({e.first, e.second});
    return j.dump();
}

namespace detail {

Plan make_plan(const Graph& g)
{
    Plan p;
    p.V = g.vertex_count();
    p.kinds = g.kinds;
    Matrix m = g.multiplicity();
    // BFS order from L, then R, then anything left
    std::vector<int> order, pos(p.V, -1);
    auto bfs = [&](int s) {
        if (pos[s] >= 0)
            return;
        std::vector<int> q{s};
        pos[s] = (int)order.size();
        order.push_back(s);
        for (size_t h = 0; h < q.size(); ++h) {
            int u = q[h];
            for (int w = 0; w < p.V; ++w)
                if ((m[u][w] || m[w][u]) && pos[w] < 0) {
                    pos[w] = (int)order.size();
                    order.push_back(w);
                    q.push_back(w);
                }
        }
    };
    for (int s = 0; s < p.V; ++s)
        bfs(s);
    for (int u = 0; u < p.V; ++u)
        for (int w = 0; w < p.V; ++w)
            if (m[u][w])
                p.bundles.push_back({u, w, m[u][w]});
    std::sort(p.bundles.begin(), p.bundles.end(), [&](const Bundle& a, const Bundle& b) {
        auto ka = std::make_pair(std::max(pos[a.tail], pos[a.head]), std::min(pos[a.tail], pos[a.head]));
        auto kb = std::make_pair(std::max(pos[b.tail], pos[b.head]), std::min(pos[b.tail], pos[b.head]));
        if (ka != kb)
            return ka < kb;
        return std::make_pair(a.tail, a.head) < std::make_pair(b.tail, b.head);
    });
    std::vector<int> last(p.V, -1);
    for (size_t b = 0; b < p.bundles.size(); ++b) {
        last[p.bundles[b].tail] = (int)b;
        last[p.bundles[b].head] = (int)b;
    }
    p.closes.assign(p.bundles.size(), {});
    for (int v = 0; v < p.V; ++v) {
        if (last[v] < 0)
            p.isolated.push_back(v);
        else
            p.closes[last[v]].push_back(v);
    }
    return p;
}

const std::vector<std::pair<Key, Rat>>& index_multisets(int n, int m)
{
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<std::pair<Key, Rat>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& v = cache[{n, m}];
    if (v.empty())
        for (Key K : mono::all_of_degree(n, m))
            v.emplace_back(K, Rat(1) / mono::factorial(K, n));
    return v;
}

}  // namespace detail

}  // namespace kstar
