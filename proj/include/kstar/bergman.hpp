#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kstar/jet_scalar.hpp"
#include "kstar/kahler.hpp"
#include "kstar/laplace.hpp"
#include "kstar/polynomial.hpp"
#include "kstar/star.hpp"

// Formal contour integral, projector and Toeplitz operators for n = 1.
// Local coordinate y = v - z, ybar = vbar - zbar.  The potential is taken in
// the gauge anchored at the base point z0: Phi(v, zbar0) = Phi(z0, zbar0), so
// the pure jets d^a Phi vanish at z0 (they are O(wbar) at z = z0 + w).

namespace kstar {

// Coefficient rings: CRational at a fixed point, JetScalar (jets in w = z - z0)
// when the evaluation point moves.
template <class S>
struct MovingPoint;

template <>
struct MovingPoint<CRational> {
    static CRational monomial(int a, int b, int) { return a == 0 && b == 0 ? CRational(1) : CRational(0); }
};

template <>
struct MovingPoint<JetScalar> {
    static JetScalar monomial(int a, int b, int depth)
    {
        JetScalar r(1, depth);
        r.add_term(mono::pack({a, b}), CRational(1));
        return r;
    }
};

// Laurent series in y (poles down to -pole_cap) times a power series in ybar.
// Terms y^a ybar^b are known for a + b <= cap.
template <class S>
class LaurentJet {
public:
    static constexpr int unbounded = 1 << 20;
    using Index = std::pair<int, int>;

    LaurentJet() = default;
    LaurentJet(int cap, int pole_cap) : cap_(std::min(cap, unbounded)), pole_cap_(pole_cap) {}

    int cap() const { return cap_; }
    int pole_cap() const { return pole_cap_; }
    const std::map<Index, S>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    S coeff(int a, int b) const
    {
        auto it = terms_.find({a, b});
        return it == terms_.end() ? S(0) : it->second;
    }

    void add(int a, int b, const S& c)
    {
        if (a + b > cap_ || kstar::is_zero(c))
            return;
        if (b < 0)
            throw std::invalid_argument("negative power of ybar");
        if (a < -pole_cap_)
            throw std::out_of_range("pole of order " + std::to_string(-a) + " exceeds the cap " +
                                    std::to_string(pole_cap_));
        auto [it, fresh] = terms_.try_emplace({a, b}, c);
        if (!fresh) {
            it->second += c;
            if (kstar::is_zero(it->second))
                terms_.erase(it);
        }
    }

    int min_degree() const
    {
        int d = unbounded;
        for (auto& [ab, c] : terms_)
            d = std::min(d, ab.first + ab.second);
        return d;
    }
    int pole_order() const
    {
        int p = 0;
        for (auto& [ab, c] : terms_)
            p = std::max(p, -ab.first);
        return p;
    }

    LaurentJet truncated(int cap) const
    {
        LaurentJet r(std::min(cap, cap_), pole_cap_);
        for (auto& [ab, c] : terms_)
            if (ab.first + ab.second <= r.cap_)
                r.terms_.emplace(ab, c);
        return r;
    }

    LaurentJet& operator+=(const LaurentJet& o)
    {
        cap_ = std::min(cap_, o.cap_);
        pole_cap_ = std::max(pole_cap_, o.pole_cap_);
        for (auto it = terms_.begin(); it != terms_.end();)
            it = it->first.first + it->first.second > cap_ ? terms_.erase(it) : std::next(it);
        for (auto& [ab, c] : o.terms_)
            add(ab.first, ab.second, c);
        return *this;
    }
    LaurentJet operator-() const
    {
        LaurentJet r = *this;
        for (auto& [ab, c] : r.terms_)
            c = -c;
        return r;
    }
    LaurentJet& operator-=(const LaurentJet& o) { return *this += -o; }
    friend LaurentJet operator+(LaurentJet a, const LaurentJet& b) { return a += b; }
    friend LaurentJet operator-(LaurentJet a, const LaurentJet& b) { return a -= b; }

    friend LaurentJet operator*(const LaurentJet& x, const LaurentJet& y)
    {
        long cap = std::min<long>(long(x.cap_) + y.min_degree(), long(y.cap_) + x.min_degree());
        LaurentJet r(int(std::min<long>(cap, unbounded)), std::max(x.pole_cap_, y.pole_cap_));
        for (auto& [i, a] : x.terms_)
            for (auto& [j, b] : y.terms_)
                r.add(i.first + j.first, i.second + j.second, a * b);
        return r;
    }
    LaurentJet scaled(const S& s) const
    {
        LaurentJet r(cap_, pole_cap_);
        for (auto& [ab, c] : terms_)
            r.add(ab.first, ab.second, c * s);
        return r;
    }

    // d/dybar
    LaurentJet dbar() const
    {
        LaurentJet r(cap_ == unbounded ? unbounded : cap_ - 1, pole_cap_);
        for (auto& [ab, c] : terms_)
            if (ab.second > 0)
                r.add(ab.first, ab.second - 1, c * S(ab.second));
        return r;
    }

    LaurentJet at_ybar_zero() const
    {
        LaurentJet r(cap_, pole_cap_);
        for (auto& [ab, c] : terms_)
            if (ab.second == 0)
                r.terms_.emplace(ab, c);
        return r;
    }

    // Coefficient of y^{-1} ybar^0.
    S residue() const
    {
        if (cap_ < -1)
            throw std::out_of_range("residue of a Laurent jet known only to degree " + std::to_string(cap_));
        return coeff(-1, 0);
    }

    // Needs every term to have y-power >= p and an invertible y^p ybar^0 coefficient.
    LaurentJet inverse() const
    {
        if (terms_.empty())
            throw std::domain_error("inverse of a zero Laurent jet");
        int p = unbounded;
        for (auto& [ab, c] : terms_)
            p = std::min(p, ab.first);
        S u0 = coeff(p, 0);
        if (!is_invertible(u0))
            throw std::domain_error("leading Laurent coefficient is not invertible");
        if (cap_ == unbounded && terms_.size() > 1)
            throw std::domain_error("inverse of an untruncated Laurent jet");
        S inv0 = kstar::inverse(u0);
        int ucap = cap_ == unbounded ? unbounded : cap_ - p;
        LaurentJet rest(ucap, pole_cap_);
        for (auto& [ab, c] : terms_)
            if (ab != Index{p, 0})
                rest.add(ab.first - p, ab.second, -(c * inv0));
        LaurentJet sum(ucap, pole_cap_);
        sum.add(0, 0, S(1));
        LaurentJet power = sum;
        for (int k = 1; k <= ucap && !rest.is_zero(); ++k) {
            power = power * rest;
            if (power.is_zero())
                break;
            sum += power;
        }
        LaurentJet r(ucap == unbounded ? unbounded : ucap - p, pole_cap_);
        for (auto& [ab, c] : sum.terms_)
            r.add(ab.first - p, ab.second, c * inv0);
        return r;
    }

    std::string str() const
    {
        std::string s;
        for (auto& [ab, c] : terms_) {
            if (!s.empty())
                s += " + ";
            s += "(" + c.str() + ")*y^" + std::to_string(ab.first) + "*ybar^" + std::to_string(ab.second);
        }
        if (s.empty())
            s = "0";
        if (cap_ != unbounded)
            s += " + O(" + std::to_string(cap_ + 1) + ")";
        return s;
    }

private:
    int cap_ = unbounded;
    int pole_cap_ = 0;
    std::map<Index, S> terms_;
};

// hbar-series of Laurent jets; entry q is the hbar^q coefficient.
template <class S>
using LaurentSeries = std::vector<LaurentJet<S>>;

// Derivatives d^a dbar^b Phi at the evaluation point z, anchored gauge.
template <class S>
struct OintContext {
    int K = 0;
    int depth = 0;     // w-jet depth; 0 at a fixed point
    bool wbar = true;  // false: zbar stays at the base point, jets in w only
    int order = 0;     // entries stored for a + b <= order
    std::map<std::pair<int, int>, S> phi;

    // A term y^a ybar^b at hbar^q has weight a + b + 2q; everything that can
    // reach hbar^K (within wbar-depth `depth`) has weight <= 2K + 1 + depth.
    int wbar_depth() const { return wbar ? depth : 0; }
    int weight() const { return 2 * K + 1 + wbar_depth(); }
    int pole_cap() const { return K + 1 + wbar_depth(); }
    int required_order() const { return weight() + 2; }

    S phi_at(int a, int b) const
    {
        if (a + b > order)
            throw std::out_of_range("Phi jet of order " + std::to_string(a + b) +
                                    " beyond the contour-integral context order " + std::to_string(order));
        auto it = phi.find({a, b});
        return it == phi.end() ? S(0) : it->second;
    }
};

// Fixed base point from mixed Phi jets (JetTable models included).
OintContext<CRational> oint_context(const Context& ctx, int K);
// Moving point z = z0 + w, jets in (w, wbar) to `depth`; needs a closed-form
// model.  Holomorphic results only need wbar = false.
OintContext<JetScalar> oint_context(const PotentialModel& model, const Point& point, int K, int depth,
                                    bool wbar = true);

namespace detail {

inline Rat inv_fact(int k) { return inv_factorial(k); }

template <class S>
S scale(const S& s, const Rat& q)
{
    return s * from_rational<S>(q);
}

}  // namespace detail

// dbar Phi(z, vbar) - dbar Phi(v, vbar) = -sum_{a>=1} Phi_{a,b+1} y^a ybar^b / (a! b!)
template <class S>
LaurentJet<S> contour_denominator(const OintContext<S>& ctx)
{
    int W = ctx.weight();
    LaurentJet<S> D(W, ctx.pole_cap());
    for (int a = 1; a <= W; ++a)
        for (int b = 0; a + b <= W; ++b)
            D.add(a, b, detail::scale(-ctx.phi_at(a, b + 1), detail::inv_fact(a) * detail::inv_fact(b)));
    return D;
}

// A_1 = (dbar Phi(z, vbar) - dbar Phi(v, vbar))^{-1}, A_{n+1} = A_1 dbar A_n.
// A_n lives at hbar^n and is kept to degree weight - 2n.
template <class S>
std::vector<LaurentJet<S>> a_coefficients(const OintContext<S>& ctx, int order)
{
    int W = ctx.weight();
    std::vector<LaurentJet<S>> A;
    if (order < 1)
        return A;
    A.push_back(contour_denominator(ctx).inverse().truncated(W - 2));
    for (int n = 2; n <= order; ++n)
        A.push_back((A[0] * A.back().dbar()).truncated(W - 2 * n));
    for (int n = 1; n <= order; ++n)
        if (A[n - 1].pole_order() > n)
            throw std::logic_error("A_" + std::to_string(n) + " has a pole of order " +
                                   std::to_string(A[n - 1].pole_order()));
    return A;
}

// -dbar A + (1/hbar) A (dbar Phi(z, vbar) - dbar Phi(v, vbar)) = 1, coefficientwise;
// returns the first failing hbar order or -1.
template <class S>
int a_relation_failure(const OintContext<S>& ctx, const std::vector<LaurentJet<S>>& A)
{
    LaurentJet<S> D = contour_denominator(ctx);
    for (size_t n = 0; n < A.size(); ++n) {
        LaurentJet<S> lhs = A[n] * D;
        if (n > 0)
            lhs -= A[n - 1].dbar();
        LaurentJet<S> one(LaurentJet<S>::unbounded, ctx.pole_cap());
        if (n == 0)
            one.add(0, 0, S(1));
        LaurentJet<S> diff = lhs - one;
        if (!diff.is_zero())
            return int(n);
    }
    return -1;
}

// oint g(v, vbar) e^{(Phi(z, vbar) - Phi(v, vbar))/hbar} dmu(v), hbar^0..K.
// With `twisted`, the integrand is g e^{(Phi(v, zbar) - Phi(z, zbar))/hbar}
// instead.  Integration by parts against the A series, then residues:
//   oint G e^{S/hbar} = -(1/hbar) sum_m (-1)^m Res[(A' dbar)^m (G h) A' e^{S/hbar}]
// with A' = sum hbar^n (-1)^{n-1} A_n; the ybar = 0 restriction of
// e^{S/hbar} is e^{-(Phi(v, zbar) - Phi(z, zbar))/hbar}.
template <class S>
std::vector<S> oint_eval(const OintContext<S>& ctx, const LaurentSeries<S>& g, bool twisted = false)
{
    const int K = ctx.K, W = ctx.weight(), P = ctx.pole_cap();
    const int N = twisted ? K + 1 : P;  // highest hbar order of the residue sums
    std::vector<LaurentJet<S>> A = a_coefficients(ctx, N);
    LaurentSeries<S> Ac(N + 1, LaurentJet<S>(W, P));
    for (int n = 1; n <= N; ++n)
        Ac[n] = n % 2 == 1 ? A[n - 1] : -A[n - 1];

    LaurentJet<S> metric(W, P);
    for (int a = 0; a <= W; ++a)
        for (int b = 0; a + b <= W; ++b)
            metric.add(a, b, detail::scale(ctx.phi_at(a + 1, b + 1), detail::inv_fact(a) * detail::inv_fact(b)));

    LaurentSeries<S> T(N, LaurentJet<S>(W, P));
    for (int q = 0; q < N && q < int(g.size()); ++q)
        T[q] = (g[q] * metric).truncated(W - 2 * q);
    LaurentSeries<S> sum(N + 1, LaurentJet<S>(W, P));
    for (int m = 0; m < N; ++m) {
        bool any = false;
        LaurentSeries<S> next(N, LaurentJet<S>(W, P));
        for (int q = 0; q < N; ++q) {
            if (T[q].is_zero())
                continue;
            any = true;
            LaurentJet<S> dT = T[q].dbar();
            for (int n = 1; q + n <= N; ++n) {
                if (Ac[n].is_zero())
                    continue;
                LaurentJet<S> term = (T[q] * Ac[n]).truncated(W - 2 * (q + n));
                sum[q + n] += m % 2 == 0 ? term : -term;
                if (q + n < N)
                    next[q + n] += (Ac[n] * dT).truncated(W - 2 * (q + n));
            }
        }
        if (!any)
            break;
        T = std::move(next);
    }

    LaurentJet<S> h(W, P);  // Phi(v, zbar) - Phi(z, zbar)
    for (int a = 1; a <= W; ++a)
        h.add(a, 0, detail::scale(ctx.phi_at(a, 0), detail::inv_fact(a)));
    if (!twisted && ctx.depth == 0 && !h.is_zero())
        throw std::domain_error("the potential is not anchored at the base point");

    std::vector<S> out(K + 1, S(0));
    for (int k = 0; k <= K; ++k) {
        LaurentJet<S> power(LaurentJet<S>::unbounded, P);  // (-h)^j / j!
        power.add(0, 0, S(1));
        for (int j = 0; k + 1 + j <= N; ++j) {
            if (j > 0) {
                power = (power * h).scaled(from_rational<S>(-Rat(1) / Rat(j)));
                if (power.is_zero())
                    break;
            }
            out[k] -= (sum[k + 1 + j].at_ybar_zero() * power).residue();
            if (twisted)
                break;
        }
    }
    return out;
}

// A function jet in the displacement from z0 (cutoff c) as a Laurent jet in
// y around z = z0 + w.  `row` gives g(z, vbar): displacement (w, wbar + ybar).
template <class S>
LaurentJet<S> embed_jet(const JetScalar& f, int depth, int pole_cap, bool row = false, bool wbar = true)
{
    int c = f.cutoff();
    int cap = c == JetScalar::exact ? LaurentJet<S>::unbounded : c - depth;
    LaurentJet<S> r(cap, pole_cap);
    for (auto& [key, coef] : f.terms()) {
        std::vector<int> e = mono::unpack(key, 2);
        int p = e[0], q = e[1];
        for (int i = 0; i <= (row ? 0 : p); ++i) {
            int wi = p - i;
            if (wi > depth)
                continue;
            Rat ybinom = row ? Rat(1) : factorial(p) / (factorial(i) * factorial(wi));
            for (int j = q; j >= 0; --j) {
                int wj = q - j;
                if (wi + wj > depth || (wj > 0 && !wbar))
                    break;
                Rat binom = ybinom * factorial(q) / (factorial(j) * factorial(wj));
                r.add(i, j, detail::scale(MovingPoint<S>::monomial(wi, wj, depth) * from_crational<S>(coef), binom));
            }
        }
    }
    return r;
}

// Laplace side: sum C_k[J,I] d^I dbar^J f at the base point.
std::vector<CRational> laplace_integral(const Context& ctx, const TruncatedJet<CRational>& f, int K);
// Contour side of the same integral for f expanded around the base point.
std::vector<CRational> contour_integral(const Context& ctx, const TruncatedJet<CRational>& f, int K);

// The formal Bergman projector of a closed-form 1-D model.  Results are hbar
// coefficients of P(f)(z0 + w) as jets in (w, wbar) to `depth`; with
// wbar = false the antiholomorphic coordinate is frozen, which is exact for
// the (holomorphic) result and much cheaper.
class Projector {
public:
    Projector(const PotentialModel& model, const Point& point, int K, int depth, bool wbar = true);

    int order() const { return ctx_.K; }
    int depth() const { return ctx_.depth; }
    // Jets the argument must be known to at hbar^q.
    int required_cutoff(int q) const { return ctx_.weight() + ctx_.depth - 2 * q; }

    std::vector<JetScalar> apply(const HbarSeries<JetScalar>& f) const;
    std::vector<JetScalar> apply(const Polynomial& f) const;

private:
    Point point_;
    OintContext<JetScalar> ctx_;
    LaurentSeries<JetScalar> row_;  // e(z, vbar)
};

std::vector<JetScalar> projector_apply(const PotentialModel& model, const Point& point, const Polynomial& f, int K,
                                       int depth = 1, bool wbar = true);

// Nonzero wbar components of a jet (P outputs must have none).
bool is_holomorphic_jet(const JetScalar& f);

struct ProjectorCheck {
    bool holomorphic = false;  // P(f) has no wbar terms (jets of depth 2)
    bool idempotent = false;   // P(P(f)) = P(f) at the base point
    int first_mismatch = -1;
    std::vector<CRational> once;
    std::vector<CRational> twice;
};

ProjectorCheck projector_check(const PotentialModel& model, const Point& point, const Polynomial& f, int K);

struct ToeplitzCheck {
    bool equal = false;
    int first_mismatch = -1;  // hbar order, -1 when equal
    std::vector<CRational> composed;  // F1(F2(g))(z0)
    std::vector<CRational> direct;    // F(g)(z0), symbol fhat1 hat-star fhat2
};

// F_i(g) = P(fhat_i g); compares F1 F2 with the operator of symbol fhat1 hat-star fhat2.
ToeplitzCheck toeplitz_compose_check(const PotentialModel& model, const Point& point, const Polynomial& fhat1,
                                     const Polynomial& fhat2, const Polynomial& g, int K);

}  // namespace kstar
