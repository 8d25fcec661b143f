#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "kstar/jet.hpp"
#include "kstar/jet_scalar.hpp"
#include "kstar/polynomial.hpp"

namespace kstar {

class PotentialModel {
public:
    virtual ~PotentialModel() = default;
    virtual int dim() const = 0;
    virtual std::string name() const = 0;
    // Taylor jet of Phi(p + y, conj(p) + ybar) to total degree M.  Only the
    // mixed coefficients (|I|,|J| >= 1) carry meaning.
    virtual TruncatedJet<CRational> potential_jet(const Point& p, int M) const = 0;
    // Same at a floating point (closed-form models only).
    virtual TruncatedJet<CDouble> potential_jet_d(const std::vector<CDouble>& p, int M) const;
    // False for tabulated jets that exist only at one point.
    virtual bool closed_form() const { return true; }
    virtual std::string describe() const { return name(); }
};

using ModelPtr = std::shared_ptr<const PotentialModel>;

ModelPtr make_flat(int n);
ModelPtr make_fubini_study();
ModelPtr make_hyperbolic();
// Phi = sum |z^i|^2 + extra; extra must be real (Hermitian coefficients).
ModelPtr make_perturbation(const Polynomial& extra);
// phi: key over 2n fields (I,J) -> Phi_{I Jbar} (derivative values, not Taylor coefficients).
ModelPtr make_jet_table(int n, const Point& point, int order, const std::map<Key, CRational>& phi);

// JSON jet-table file format (see README).
ModelPtr load_jet_table(const std::string& json_text);
std::string dump_jet_table(const PotentialModel& model, const Point& point, int order);

// Per-direction caps on the stored jets.  hol/antihol bound |I| and |J|;
// total bounds |I|+|J|.
struct JetCaps {
    int total = 0;
    int hol = 0;
    int antihol = 0;
    bool admits(Key k, int n) const
    {
        return mono::degree(k) <= total && mono::partial_degree(k, 0, n) <= hol &&
               mono::partial_degree(k, n, 2 * n) <= antihol;
    }
};

template <class S>
struct JetContext {
    int n = 0;
    Point point;
    std::string model;
    JetCaps phi_caps;  // Phi_{IJ} stored for 1 <= |I|,|J| within caps
    JetCaps psi_caps;  // Psi_{IJ} stored for |I|+|J| >= 1 within caps
    std::map<Key, S> phi;
    std::map<Key, S> psi;
    std::vector<std::vector<S>> H;     // H[i][j] = h_{i jbar}
    std::vector<std::vector<S>> Hinv;  // Hinv[i][j] = h^{i jbar}
    S A;

    int order() const { return phi_caps.total; }

    Key key(const MultiIndex& I, const MultiIndex& J) const
    {
        std::vector<int> e(I);
        e.insert(e.end(), J.begin(), J.end());
        return mono::pack(e);
    }
    S phi_at(Key k) const
    {
        if (!phi_caps.admits(k, n))
            throw std::out_of_range("Phi jet " + mono::str(k, 2 * n) + " beyond context order " +
                                    std::to_string(phi_caps.total));
        auto it = phi.find(k);
        return it == phi.end() ? S(0) : it->second;
    }
    S psi_at(Key k) const
    {
        if (!psi_caps.admits(k, n))
            throw std::out_of_range("Psi jet " + mono::str(k, 2 * n) + " beyond context order " +
                                    std::to_string(psi_caps.total));
        auto it = psi.find(k);
        return it == psi.end() ? S(0) : it->second;
    }
    S phi_at(const MultiIndex& I, const MultiIndex& J) const { return phi_at(key(I, J)); }
    S psi_at(const MultiIndex& I, const MultiIndex& J) const { return psi_at(key(I, J)); }
};

using Context = JetContext<CRational>;
using JetModeContext = JetContext<JetScalar>;
using ContextD = JetContext<CDouble>;
using JetModeContextD = JetContext<JetScalarD>;

// Phi jets to total order M (Psi to M-2).  Extra budgets enlarge the stored
// holomorphic/antiholomorphic depth, as needed before shifting the base point.
Context build_context(const PotentialModel& model, const Point& point, int M, int extra_w = 0, int extra_wbar = 0);
Context build_context_from_phi(int n, const Point& point, const JetCaps& phi_caps, std::map<Key, CRational> phi,
                               const std::string& name);

// Context at point + w with jet-valued tables (Taylor translation of a deeper
// rational context).  budget: retained w-degree; keep_w / keep_wbar select
// the displacement directions.
JetModeContext build_jet_context(const PotentialModel& model, const Point& point, int M, int budget, bool keep_w,
                                 bool keep_wbar);
JetModeContext shift_context(const Context& deep, int M, int budget, bool keep_w, bool keep_wbar);

// Floating-point variants (no exact log-det check); used by quadrature.
ContextD build_context_d(const PotentialModel& model, const std::vector<CDouble>& point, int M, int extra_w = 0,
                         int extra_wbar = 0);
JetModeContextD shift_context(const ContextD& deep, int M, int budget, bool keep_w, bool keep_wbar);
JetModeContextD build_jet_context_d(const PotentialModel& model, const std::vector<CDouble>& point, int M, int budget,
                                    bool keep_w, bool keep_wbar);

// Log-det identities on the first Psi jets; returns a description
// of the first failure or an empty string.
std::string logdet_identity_failure(const Context& ctx);

// Taylor translation of a function jet: F(p + w + y) as a jet in y whose
// coefficients are jets in w (same conventions as shift_context).
TruncatedJet<JetScalar> shift_function_jet(const TruncatedJet<CRational>& deep, int M, int budget, bool keep_w,
                                           bool keep_wbar);

// Lift a rational jet into a ring (constant jet-scalars, doubles...).
template <class S>
TruncatedJet<S> lift_jet(const TruncatedJet<CRational>& j)
{
    TruncatedJet<S> r(j.n(), j.cutoff());
    for (auto& [k, c] : j.terms())
        r.set(k, from_crational<S>(c));
    return r;
}

// Generic Gauss-Jordan inverse; returns Hinv[i][j] = ((H^T)^{-1})_{ij}.
template <class S>
std::vector<std::vector<S>> inverse_metric(const std::vector<std::vector<S>>& H)
{
    int n = (int)H.size();
    // invert H^T
    std::vector<std::vector<S>> a(n, std::vector<S>(2 * n, S(0)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            a[i][j] = H[j][i];
        a[i][n + i] = S(1);
    }
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (is_invertible(a[r][c])) {
                piv = r;
                break;
            }
        if (piv < 0)
            throw std::domain_error("metric matrix H is singular");
        std::swap(a[c], a[piv]);
        S inv = inverse(a[c][c]);
        for (auto& x : a[c])
            x = x * inv;
        for (int r = 0; r < n; ++r) {
            if (r == c || is_zero(a[r][c]))
                continue;
            S f = a[r][c];
            for (int j = 0; j < 2 * n; ++j)
                a[r][j] -= f * a[c][j];
        }
    }
    std::vector<std::vector<S>> inv(n, std::vector<S>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            inv[i][j] = a[i][n + j];
    return inv;
}

// Jets graded by eps power: part[p] holds the eps^p coefficient.
template <class S>
struct EpsJet {
    int n = 0;
    std::vector<TruncatedJet<S>> part;
};

// phi(z, zbar; z + eps y, zbar + eps ybar) with eps^{|I|+|J|} grading folded
// into the degree.
template <class S>
TruncatedJet<S> calabi_jet(const JetContext<S>& ctx, int cutoff)
{
    if (cutoff > ctx.phi_caps.total)
        throw std::out_of_range("calabi_jet: cutoff " + std::to_string(cutoff) + " exceeds context order " +
                                std::to_string(ctx.phi_caps.total));
    TruncatedJet<S> j(ctx.n, cutoff);
    for (auto& [k, v] : ctx.phi) {
        if (mono::degree(k) > cutoff)
            continue;
        j.set(k, -(v * from_rational<S>(Rat(1) / mono::factorial(k, 2 * ctx.n))));
    }
    return j;
}

// V up to eps^{2K}; coefficient of eps^p is truncated to w-degree budget - p
// when budget >= 0.
template <class S>
EpsJet<S> interaction_potential(const JetContext<S>& ctx, int K, int budget = -1)
{
    int P = 2 * K;
    if (ctx.phi_caps.total < P + 2 || ctx.psi_caps.total < P)
        throw std::out_of_range("interaction_potential: context order " + std::to_string(ctx.phi_caps.total) +
                                " too small for hbar^" + std::to_string(K) + " (needs " + std::to_string(P + 2) +
                                ")");
    EpsJet<S> V;
    V.n = ctx.n;
    for (int p = 0; p <= P; ++p)
        V.part.emplace_back(ctx.n, 3 * P + 2);
    auto cut = [&](const S& x, int p) { return budget >= 0 ? truncate(x, budget - p) : x; };
    for (auto& [k, v] : ctx.phi) {
        int d = mono::degree(k);
        if (d <= 2 || d - 2 > P)
            continue;
        int p = d - 2;
        V.part[p].set(k, cut(-(v * from_rational<S>(Rat(1) / mono::factorial(k, 2 * ctx.n))), p));
    }
    for (auto& [k, v] : ctx.psi) {
        int d = mono::degree(k);
        if (d == 0 || d > P)
            continue;
        V.part[d].add_to(k, cut(v * from_rational<S>(Rat(1) / mono::factorial(k, 2 * ctx.n)), d));
    }
    return V;
}

// n = 1 holomorphic change of coordinates.  delta(u) = g(z0 + u) - g(z0) as a
// holomorphic jet; ctx and f-jets live in the target chart at g(z0).  Returns
// the pulled-back context at z0 and the pulled-back f-jets.
struct Transported {
    Context ctx;
    std::vector<TruncatedJet<CRational>> fjets;
};
Transported transport_jets(const TruncatedJet<CRational>& delta, const Point& source_point, const Context& ctx,
                           const std::vector<TruncatedJet<CRational>>& fjets);

// F(delta(u), conj(delta)(ubar)) for a holomorphic jet delta without constant term (n = 1).
TruncatedJet<CRational> compose_holomorphic(const TruncatedJet<CRational>& F, const TruncatedJet<CRational>& delta);

}  // namespace kstar
