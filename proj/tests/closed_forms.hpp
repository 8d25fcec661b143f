#pragma once

#include "kstar/laplace.hpp"
#include "kstar/star.hpp"

namespace kstar::testing {

// Metric data at the base point, derivatives read off jet-mode tables.
struct Geometry {
    int n = 0;
    std::vector<std::vector<CRational>> h;                  // h[i][j] = h^{i jbar}
    std::vector<std::vector<std::vector<CRational>>> dh;    // dh[a][i][j] = d_a h^{i jbar}
    std::vector<std::vector<std::vector<CRational>>> dbh;   // dbh[b][i][j] = dbar_b h^{i jbar}
    CRational A, D;
    std::vector<CRational> dA, dbA;
};

inline Geometry geometry(const PotentialModel& model, const Point& point)
{
    Geometry g;
    int n = g.n = model.dim();
    JetModeContext jc = build_jet_context(model, point, 6, 2, true, true);
    Context ctx = build_context(model, point, 6);
    MultiIndex zero(n, 0);
    g.h.assign(n, std::vector<CRational>(n));
    g.dh.assign(n, g.h);
    g.dbh.assign(n, g.h);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            g.h[i][j] = jc.Hinv[i][j].value();
            for (int a = 0; a < n; ++a) {
                g.dh[a][i][j] = jc.Hinv[i][j].derivative(unit_index(n, a), zero);
                g.dbh[a][i][j] = jc.Hinv[i][j].derivative(zero, unit_index(n, a));
            }
        }
    g.A = jc.A.value();
    for (int a = 0; a < n; ++a) {
        g.dA.push_back(jc.A.derivative(unit_index(n, a), zero));
        g.dbA.push_back(jc.A.derivative(zero, unit_index(n, a)));
    }
    g.D = vacuum_D(ctx);
    return g;
}

inline Key idx(int n, std::initializer_list<int> slots)
{
    MultiIndex m(n, 0);
    for (int s : slots)
        ++m[s];
    return mono::pack(m);
}

// Closed form of the hbar^0..hbar^2 terms of the bullet product as an
// operator table C_k[J, I] (J: dbar on f1, I: d on f2).
inline OperatorSeries<CRational> low_order_bullet(const Geometry& g)
{
    int n = g.n;
    OperatorSeries<CRational> op(n, 2);
    Key none = mono::pack(MultiIndex(n, 0));
    auto add = [&](int k, Key J, Key I, const CRational& c) { op.add(k, J, I, c); };
    op.add(0, none, none, CRational(1));
    op.add(1, none, none, g.A);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            op.add(1, idx(n, {j}), idx(n, {i}), g.h[i][j]);

    CRational half = CRational::frac(1, 2);
    op.add(2, none, none, g.D);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Key Jj = idx(n, {j}), Ii = idx(n, {i});
            add(2, none, Ii, g.h[i][j] * g.dbA[j]);
            add(2, Jj, none, g.h[i][j] * g.dA[i]);
            add(2, Jj, Ii, g.h[i][j] * g.A);
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    add(2, idx(n, {j, l}), idx(n, {i, k}), half * g.h[i][j] * g.h[k][l]);
                    add(2, idx(n, {j, l}), idx(n, {k}), half * g.h[i][j] * g.dh[i][k][l]);
                    add(2, idx(n, {l}), idx(n, {i, k}), half * g.h[i][j] * g.dbh[j][k][l]);
                    add(2, idx(n, {j}), idx(n, {k}), half * g.dh[i][k][l] * g.dbh[l][i][j]);
                }
        }
    return op;
}

// hbar^2 coefficient of the normalized product in the polarized form
// 1/2 sum [h h dbar^2 f1 d^2 f2 + h dbar(h) dbar f1 d^2 f2 + d(h) h dbar^2 f1 d f2
//          + d(h) dbar(h) dbar f1 d f2].
// Divergence contractions: h^{i jbar} dbar_l h^{k lbar}, d_i h^{i jbar} h^{k lbar},
// d_i h^{i jbar} dbar_l h^{k lbar}.  Crossed: h^{i lbar} dbar_l h^{k jbar},
// d_i h^{k jbar} h^{i lbar}, d_i h^{k lbar} dbar_l h^{i jbar}.  They agree for n = 1.
enum class Contraction { Divergence, Crossed };

inline CRational polarized_star2(const Geometry& g, const TruncatedJet<CRational>& f1,
                                 const TruncatedJet<CRational>& f2, Contraction form)
{
    int n = g.n;
    auto D1 = [&](std::initializer_list<int> bars) {
        MultiIndex z(n, 0), w(n, 0);
        for (int b : bars)
            ++w[b];
        return f1.coeff(mono::concat(mono::pack(z), n, mono::pack(w))) * CRational(mi_factorial(w));
    };
    auto D2 = [&](std::initializer_list<int> hol) {
        MultiIndex z(n, 0), w(n, 0);
        for (int a : hol)
            ++z[a];
        return f2.coeff(mono::concat(mono::pack(z), n, mono::pack(w))) * CRational(mi_factorial(z));
    };
    bool div = form == Contraction::Divergence;
    CRational s(0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    s += g.h[i][j] * g.h[k][l] * D1({j, l}) * D2({i, k});
                    s += (div ? g.h[i][j] * g.dbh[l][k][l] : g.h[i][l] * g.dbh[l][k][j]) * D1({j}) * D2({i, k});
                    s += (div ? g.dh[i][i][j] * g.h[k][l] : g.dh[i][k][j] * g.h[i][l]) * D1({j, l}) * D2({k});
                    s += (div ? g.dh[i][i][j] * g.dbh[l][k][l] : g.dh[i][k][l] * g.dbh[l][i][j]) * D1({j}) * D2({k});
                }
    return s * CRational::frac(1, 2);
}

}  // namespace kstar::testing
