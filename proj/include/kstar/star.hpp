#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "kstar/graphs.hpp"
#include "kstar/jet.hpp"
#include "kstar/jet_scalar.hpp"
#include "kstar/kahler.hpp"
#include "kstar/laplace.hpp"
#include "kstar/polynomial.hpp"

namespace kstar {

enum class EngineKind { Oracle, Graphs };

EngineKind parse_engine(const std::string& name);
const char* engine_name(EngineKind e);

template <class C>
HbarSeries<C> series_values(const HbarSeries<BasicJetScalar<C>>& s)
{
    HbarSeries<C> out(s.order());
    for (int k = 0; k <= s.order(); ++k)
        out[k] = s[k].value();
    return out;
}

namespace detail {

// Lazily computed derivatives of one jet.
template <class J>
class Derivs {
public:
    explicit Derivs(const J& f) : f_(f) {}
    const J& operator()(Key k)
    {
        if (k == 0)
            return f_;
        auto it = cache_.find(k);
        if (it == cache_.end())
            it = cache_.emplace(k, f_.diff(k)).first;
        return it->second;
    }

private:
    const J& f_;
    std::unordered_map<Key, J> cache_;
};

template <class C>
C point_derivative(const BasicJetScalar<C>& f, Key k)
{
    int d = mono::degree(k);
    if (f.cutoff() != BasicJetScalar<C>::exact && d > f.cutoff())
        throw std::out_of_range("derivative of order " + std::to_string(d) + " of a jet known to order " +
                                std::to_string(f.cutoff()));
    C c = f.coeff(k);
    if (d == 0 || kstar::is_zero(c))
        return c;
    return c * from_rational<C>(mono::factorial(k, mono::max_fields));
}

}  // namespace detail

// f1 . f2 on jet-valued series.  Only antiholomorphic derivatives of f1 and
// holomorphic derivatives of f2 are taken, so f1 may carry wbar-jets only and
// f2 w-jets only.
template <class C>
HbarSeries<BasicJetScalar<C>> bullet_jets(const OperatorSeries<BasicJetScalar<C>>& op,
                                          const HbarSeries<BasicJetScalar<C>>& f1,
                                          const HbarSeries<BasicJetScalar<C>>& f2)
{
    using J = BasicJetScalar<C>;
    const int K = op.K, n = op.n;
    HbarSeries<J> out(K);
    for (int a = 0; a <= K && a <= f1.order(); ++a) {
        if (f1[a].is_zero())
            continue;
        detail::Derivs<J> d1(f1[a]);
        for (int b = 0; a + b <= K && b <= f2.order(); ++b) {
            if (f2[b].is_zero())
                continue;
            detail::Derivs<J> d2(f2[b]);
            for (int c = 0; a + b + c <= K; ++c) {
                J acc(0);
                for (auto& [ji, coef] : op.C[c]) {
                    const J& x = d1(mono::concat(0, n, ji.first));
                    if (x.is_zero())
                        continue;
                    const J& y = d2(mono::concat(ji.second, n, 0));
                    if (y.is_zero())
                        continue;
                    acc += coef * x * y;
                }
                out[a + b + c] += acc;
            }
        }
    }
    return out;
}

// Base-point values of bullet_jets(op, f1, f2).
template <class C>
HbarSeries<C> bullet_point_values(const OperatorSeries<BasicJetScalar<C>>& op, const HbarSeries<BasicJetScalar<C>>& f1,
                                  const HbarSeries<BasicJetScalar<C>>& f2)
{
    const int K = op.K, n = op.n;
    HbarSeries<C> out(K);
    for (int a = 0; a <= K && a <= f1.order(); ++a) {
        if (f1[a].is_zero())
            continue;
        for (int b = 0; a + b <= K && b <= f2.order(); ++b) {
            if (f2[b].is_zero())
                continue;
            for (int c = 0; a + b + c <= K; ++c) {
                C acc(0);
                for (auto& [ji, coef] : op.C[c]) {
                    C x = detail::point_derivative(f1[a], mono::concat(0, n, ji.first));
                    if (kstar::is_zero(x))
                        continue;
                    acc += coef.value() * x * detail::point_derivative(f2[b], mono::concat(ji.second, n, 0));
                }
                out[a + b + c] += acc;
            }
        }
    }
    return out;
}

// Products, unit and contravariant calculus on hbar-series of functions near a
// base point.  A function is a jet in the displacement (w, wbar); the context
// carries jet-valued Phi tables, so every result comes with its derivatives.
// With budget B = 2K, the hbar^k coefficient of every result is known to
// order B - 2k, which is exactly what later compositions consume.
template <class C>
class StarAlgebra {
public:
    using J = BasicJetScalar<C>;
    using Series = HbarSeries<J>;

    StarAlgebra(JetContext<J> ctx, int K, int budget, EngineKind engine = EngineKind::Oracle)
        : ctx_(std::move(ctx)), n_(ctx_.n), K_(K)
    {
        if (budget < 2 * K)
            throw std::out_of_range("jet budget " + std::to_string(budget) + " below 2K = " + std::to_string(2 * K));
        if (engine == EngineKind::Graphs) {
            op_ = graph_operator_series(ctx_, K);
        } else {
            LaplaceEngine<J> eng(ctx_, K, budget);
            op_ = eng.operator_series();
        }
        solve_unit();
    }

    int n() const { return n_; }
    int order() const { return K_; }
    const JetContext<J>& context() const { return ctx_; }
    const OperatorSeries<J>& bullet_operator() const { return op_; }
    const Series& unit() const { return unit_; }
    const Series& unit_inverse() const { return unit_inv_; }

    Series constant(const J& f) const { return Series::constant(K_, f); }

    Series bullet(const Series& f1, const Series& f2) const { return bullet_jets(op_, f1, f2); }

    // Base-point values of bullet(f1, f2); skips the jets of the result.
    HbarSeries<C> bullet_values(const Series& f1, const Series& f2) const { return bullet_point_values(op_, f1, f2); }

    // e^{-1} ((f1 e) . (f2 e))
    Series star(const Series& f1, const Series& f2) const
    {
        return unit_inv_ * bullet(f1 * unit_, f2 * unit_);
    }

    HbarSeries<C> star_values(const Series& f1, const Series& f2) const
    {
        return series_values(unit_inv_) * bullet_values(f1 * unit_, f2 * unit_);
    }

    // Formal integral of fhat(v, vbar) e(z, vbar) e(v, zbar) / e(z, zbar).
    Series i_map(const Series& fhat) const
    {
        Series out(K_);
        for (int q = 0; q <= K_; ++q) {
            if (fhat[q].is_zero())
                continue;
            detail::Derivs<J> df(fhat[q]);
            for (int a = 0; q + a <= K_; ++a) {
                detail::Derivs<J> de1(unit_[a]);
                for (int b = 0; q + a + b <= K_; ++b) {
                    detail::Derivs<J> de2(unit_[b]);
                    for (int c = 0; q + a + b + c <= K_; ++c) {
                        J acc(0);
                        for (auto& [ji, coef] : op_.C[c]) {
                            Key Jk = ji.first, Ik = ji.second;
                            // Leibniz over the split of d^I dbar^J between fhat and the two unit factors
                            for (Key I1 : mono::all_up_to(n_, mono::degree(Ik))) {
                                if (!mono::divides(I1, Ik, n_))
                                    continue;
                                const J& e2 = de2(mono::concat(Ik - I1, n_, 0));
                                if (e2.is_zero())
                                    continue;
                                for (Key J1 : mono::all_up_to(n_, mono::degree(Jk))) {
                                    if (!mono::divides(J1, Jk, n_))
                                        continue;
                                    const J& e1 = de1(mono::concat(0, n_, Jk - J1));
                                    if (e1.is_zero())
                                        continue;
                                    const J& f = df(mono::concat(I1, n_, J1));
                                    if (f.is_zero())
                                        continue;
                                    Rat binom = mono::factorial(Ik, n_) * mono::factorial(Jk, n_) /
                                                (mono::factorial(I1, n_) * mono::factorial(Ik - I1, n_) *
                                                 mono::factorial(J1, n_) * mono::factorial(Jk - J1, n_));
                                    acc += coef * f * e1 * e2 * from_rational<J>(binom);
                                }
                            }
                        }
                        out[q + a + b + c] += acc;
                    }
                }
            }
        }
        out = unit_inv_ * out;
        if (!(out[0] == fhat[0]))
            throw std::logic_error("i_map: hbar^0 part is not the identity");
        return out;
    }

    // Neumann inverse of I = id + N.
    Series i_inverse(const Series& f) const
    {
        Series result = f;
        Series term = f;
        for (int m = 1; m <= K_; ++m) {
            Series next = i_map(term);
            next -= term;
            term = next.scaled(J(-1));
            result += term;
        }
        return result;
    }

    Series hat_star(const Series& fhat1, const Series& fhat2) const
    {
        return i_inverse(star(i_map(fhat1), i_map(fhat2)));
    }

    static std::vector<C> values(const Series& s)
    {
        std::vector<C> v;
        for (int k = 0; k <= s.order(); ++k)
            v.push_back(s[k].value());
        return v;
    }

private:
    // e^{(m)} = -sum_{k=1..m} C_k(e^{(m-k)}, 1)
    void solve_unit()
    {
        unit_ = Series::constant(K_, J(1));
        for (int m = 1; m <= K_; ++m) {
            J acc(0);
            for (int k = 1; k <= m; ++k) {
                detail::Derivs<J> d(unit_[m - k]);
                for (auto& [ji, coef] : op_.C[k]) {
                    if (ji.second != 0)
                        continue;
                    const J& x = d(mono::concat(0, n_, ji.first));
                    if (!x.is_zero())
                        acc += coef * x;
                }
            }
            unit_[m] = -acc;
        }
        unit_inv_ = series_invert(unit_);
    }

    JetContext<J> ctx_;
    int n_;
    int K_;
    OperatorSeries<J> op_;
    Series unit_;
    Series unit_inv_;
};

using StarAlgebraQ = StarAlgebra<CRational>;
using StarAlgebraD = StarAlgebra<CDouble>;

// Mixed jet-mode algebra at a rational point with budget 2K.
StarAlgebraQ make_star_algebra(const PotentialModel& model, const Point& point, int K,
                               EngineKind engine = EngineKind::Oracle);
StarAlgebraD make_star_algebra_d(const PotentialModel& model, const std::vector<CDouble>& point, int K);

// Jet-valued bullet operator with budget 2K, jets in the selected directions.
OperatorSeries<JetScalar> bullet_operator_jets(const PotentialModel& model, const Point& point, int K, bool keep_w,
                                               bool keep_wbar, EngineKind engine = EngineKind::Oracle);

// Exact jet of a polynomial at the base point.
JetScalar function_jet(const Polynomial& f, const Point& point);
// A truncated jet in (y, ybar) read as a function of the displacement.
JetScalar function_jet(const TruncatedJet<CRational>& f);
TruncatedJet<CRational> as_truncated_jet(const JetScalar& f, int n);

// hbar^0 term as a series with one nonzero coefficient.
template <class C>
HbarSeries<BasicJetScalar<C>> lift(int K, const BasicJetScalar<C>& f)
{
    return HbarSeries<BasicJetScalar<C>>::constant(K, f);
}

struct UnitElement {
    int n = 0;
    int K = 0;
    // e^{(l)} as a jet at the base point, known to order 2(K - l) + depth.
    std::vector<TruncatedJet<CRational>> e;
};

// Solves e . f = f order by order in mixed jet mode.
UnitElement unit_element(const PotentialModel& model, const Point& point, int K, int depth = 0,
                         EngineKind engine = EngineKind::Oracle);

// Values at the base point.
HbarSeries<CRational> normalized_star(const PotentialModel& model, const Point& point, const Polynomial& f1,
                                      const Polynomial& f2, int K, EngineKind engine = EngineKind::Oracle);
HbarSeries<CRational> i_map(const PotentialModel& model, const Point& point, const Polynomial& fhat, int K);
HbarSeries<CRational> i_inverse(const PotentialModel& model, const Point& point, const Polynomial& f, int K);
HbarSeries<CRational> hat_star(const PotentialModel& model, const Point& point, const Polynomial& fhat1,
                               const Polynomial& fhat2, int K);

// {f1, f2} = (2/i) sum h^{i jbar} (d_i f1 dbar_j f2 - dbar_j f1 d_i f2) at the base point.
CRational poisson_bracket(const Context& ctx, const TruncatedJet<CRational>& f1, const TruncatedJet<CRational>& f2);


}  // namespace kstar
