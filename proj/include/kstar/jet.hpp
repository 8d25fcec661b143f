#pragma once

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kstar/multi_index.hpp"
#include "kstar/scalar.hpp"

namespace kstar {

// Truncated power series in (y, ybar), y in C^n: keys carry 2n fields, the
// first n for y and the last n for ybar.  Terms of total degree > cutoff are
// discarded by every operation.
template <class S>
class TruncatedJet {
public:
    TruncatedJet() = default;
    TruncatedJet(int n, int cutoff) : n_(n), cutoff_(cutoff)
    {
        if (n < 0 || 2 * n > mono::max_fields)
            throw std::invalid_argument("jet dimension out of range");
    }

    static TruncatedJet constant(int n, int cutoff, const S& c)
    {
        TruncatedJet j(n, cutoff);
        j.set(0, c);
        return j;
    }
    // y^i (holomorphic=true) or ybar^i
    static TruncatedJet variable(int n, int cutoff, int i, bool holomorphic)
    {
        TruncatedJet j(n, cutoff);
        if (cutoff >= 1)
            j.set(mono::unit(holomorphic ? i : n + i), S(1));
        return j;
    }

    int n() const { return n_; }
    int cutoff() const { return cutoff_; }
    int nfields() const { return 2 * n_; }
    const std::map<Key, S>& terms() const { return terms_; }

    Key key(const MultiIndex& I, const MultiIndex& J) const
    {
        if ((int)I.size() != n_ || (int)J.size() != n_)
            throw std::invalid_argument("multi-index dimension mismatch");
        std::vector<int> e(I);
        e.insert(e.end(), J.begin(), J.end());
        return mono::pack(e);
    }

    S coeff(Key k) const
    {
        auto it = terms_.find(k);
        return it == terms_.end() ? S(0) : it->second;
    }
    S coeff(const MultiIndex& I, const MultiIndex& J) const { return coeff(key(I, J)); }

    // d^I dbar^J of the underlying function at the base point.
    S derivative(const MultiIndex& I, const MultiIndex& J) const
    {
        return coeff(I, J) * from_rational<S>(mi_factorial(I) * mi_factorial(J));
    }

    void set(Key k, const S& c)
    {
        if (mono::degree(k) > cutoff_)
            return;
        if (is_zero(c))
            terms_.erase(k);
        else
            terms_[k] = c;
    }
    void add_to(Key k, const S& c)
    {
        if (mono::degree(k) > cutoff_)
            return;
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            if (!is_zero(c))
                terms_.emplace(k, c);
        } else {
            it->second += c;
            if (is_zero(it->second))
                terms_.erase(it);
        }
    }

    bool is_zero_jet() const { return terms_.empty(); }
    S constant_term() const { return coeff(Key(0)); }

    TruncatedJet& operator+=(const TruncatedJet& o)
    {
        check(o);
        for (auto& [k, c] : o.terms_)
            add_to(k, c);
        return *this;
    }
    TruncatedJet& operator-=(const TruncatedJet& o)
    {
        check(o);
        for (auto& [k, c] : o.terms_)
            add_to(k, -c);
        return *this;
    }
    TruncatedJet operator-() const
    {
        TruncatedJet r(n_, cutoff_);
        for (auto& [k, c] : terms_)
            r.terms_.emplace(k, -c);
        return r;
    }
    TruncatedJet scaled(const S& s) const
    {
        TruncatedJet r(n_, cutoff_);
        for (auto& [k, c] : terms_)
            r.set(k, c * s);
        return r;
    }
    friend TruncatedJet operator+(TruncatedJet a, const TruncatedJet& b) { return a += b; }
    friend TruncatedJet operator-(TruncatedJet a, const TruncatedJet& b) { return a -= b; }
    friend TruncatedJet operator*(const TruncatedJet& a, const TruncatedJet& b) { return jet_mul(a, b); }

    friend bool operator==(const TruncatedJet& a, const TruncatedJet& b)
    {
        return a.n_ == b.n_ && a.cutoff_ == b.cutoff_ && a.terms_ == b.terms_;
    }

    // Product with result cutoff min(cutoffs); no mismatch check.
    friend TruncatedJet lenient_mul(const TruncatedJet& a, const TruncatedJet& b)
    {
        if (a.n_ != b.n_)
            throw std::invalid_argument("jet_mul: dimension mismatch");
        TruncatedJet r(a.n_, std::min(a.cutoff_, b.cutoff_));
        for (auto& [ka, ca] : a.terms_) {
            int room = r.cutoff_ - mono::degree(ka);
            if (room < 0)
                break;
            for (auto& [kb, cb] : b.terms_) {
                if (mono::degree(kb) > room)
                    break;
                r.add_to(ka + kb, ca * cb);
            }
        }
        return r;
    }

    friend TruncatedJet jet_mul(const TruncatedJet& a, const TruncatedJet& b)
    {
        a.check(b);
        return lenient_mul(a, b);
    }

    // Swap y and ybar and conjugate coefficients.
    TruncatedJet conjugate() const
    {
        TruncatedJet r(n_, cutoff_);
        for (auto& [k, c] : terms_) {
            auto e = mono::unpack(k, 2 * n_);
            std::vector<int> s(2 * n_);
            for (int i = 0; i < n_; ++i) {
                s[i] = e[n_ + i];
                s[n_ + i] = e[i];
            }
            r.set(mono::pack(s), conj(c));
        }
        return r;
    }

    TruncatedJet truncated(int cutoff) const
    {
        TruncatedJet r(n_, std::min(cutoff, cutoff_));
        for (auto& [k, c] : terms_)
            r.set(k, c);
        return r;
    }

    // Parts depending only on y (holomorphic) or only on ybar.
    TruncatedJet holomorphic_part() const { return filter(true); }
    TruncatedJet antiholomorphic_part() const { return filter(false); }

    // d/dy^i (holomorphic=true) or d/dybar^i; cutoff drops by one.
    TruncatedJet diff(int i, bool holomorphic) const
    {
        int f = holomorphic ? i : n_ + i;
        TruncatedJet r(n_, std::max(cutoff_ - 1, 0));
        for (auto& [k, c] : terms_) {
            int e = mono::get(k, f);
            if (e == 0)
                continue;
            r.set(k - mono::unit(f), c * S(long(e)));
        }
        return r;
    }

    std::string str() const
    {
        std::ostringstream os;
        bool first = true;
        for (auto& [k, c] : terms_) {
            os << (first ? "" : " + ");
            first = false;
            os << to_text(c) << "*" << mono::str(k, 2 * n_);
        }
        if (first)
            os << "0";
        return os.str();
    }

private:
    void check(const TruncatedJet& o) const
    {
        if (n_ != o.n_)
            throw std::invalid_argument("jet dimension mismatch (" + std::to_string(n_) + " vs " +
                                        std::to_string(o.n_) + ")");
        if (cutoff_ != o.cutoff_)
            throw std::invalid_argument("jet cutoff mismatch (" + std::to_string(cutoff_) + " vs " +
                                        std::to_string(o.cutoff_) + ")");
    }
    TruncatedJet filter(bool holo) const
    {
        TruncatedJet r(n_, cutoff_);
        for (auto& [k, c] : terms_) {
            int other = holo ? mono::partial_degree(k, n_, 2 * n_) : mono::partial_degree(k, 0, n_);
            if (other == 0)
                r.set(k, c);
        }
        return r;
    }
    static std::string to_text(const S& c)
    {
        if constexpr (requires { c.str(); })
            return c.str();
        else {
            std::ostringstream os;
            os << c;
            return os.str();
        }
    }

    int n_ = 0;
    int cutoff_ = 0;
    std::map<Key, S> terms_;
};

// exp of a jet with zero constant term.
template <class S>
TruncatedJet<S> jet_exp(const TruncatedJet<S>& a)
{
    if (!is_zero(a.constant_term()))
        throw std::invalid_argument("jet_exp: argument has a nonzero constant term");
    TruncatedJet<S> result = TruncatedJet<S>::constant(a.n(), a.cutoff(), S(1));
    TruncatedJet<S> power = result;
    for (int k = 1; k <= a.cutoff(); ++k) {
        power = jet_mul(power, a).scaled(from_rational<S>(Rat(1, k)));
        if (power.is_zero_jet())
            break;
        result += power;
    }
    return result;
}

// log(1 + a) for a jet with zero constant term.
template <class S>
TruncatedJet<S> jet_log1p(const TruncatedJet<S>& a)
{
    if (!is_zero(a.constant_term()))
        throw std::invalid_argument("jet_log1p: argument has a nonzero constant term");
    TruncatedJet<S> result(a.n(), a.cutoff());
    TruncatedJet<S> power = TruncatedJet<S>::constant(a.n(), a.cutoff(), S(1));
    for (int k = 1; k <= a.cutoff(); ++k) {
        power = jet_mul(power, a);
        if (power.is_zero_jet())
            break;
        Rat c(k % 2 ? 1 : -1, k);
        result += power.scaled(from_rational<S>(c));
    }
    return result;
}

// Multiplicative inverse of a jet with invertible constant term.
template <class S>
TruncatedJet<S> jet_inverse(const TruncatedJet<S>& a)
{
    S c0 = a.constant_term();
    if (!is_invertible(c0))
        throw std::invalid_argument("jet_inverse: constant term not invertible");
    S inv0 = inverse(c0);
    TruncatedJet<S> r = a.scaled(inv0);
    r.add_to(0, S(-1));
    TruncatedJet<S> result = TruncatedJet<S>::constant(a.n(), a.cutoff(), S(1));
    TruncatedJet<S> power = result;
    for (int k = 1; k <= a.cutoff(); ++k) {
        power = jet_mul(power, r).scaled(S(-1));
        if (power.is_zero_jet())
            break;
        result += power;
    }
    return result.scaled(inv0);
}

// Power series in hbar stored by powers of eps = hbar^(1/2); cutoff K in hbar.
template <class S>
class HbarSeries {
public:
    HbarSeries() : HbarSeries(0) {}
    explicit HbarSeries(int K) : K_(K), eps_(2 * K + 1, S(0))
    {
        if (K < 0)
            throw std::invalid_argument("negative hbar cutoff");
    }
    static HbarSeries from_hbar(const std::vector<S>& c)
    {
        HbarSeries s((int)c.size() - 1);
        for (size_t k = 0; k < c.size(); ++k)
            s.eps_[2 * k] = c[k];
        return s;
    }
    static HbarSeries constant(int K, const S& c)
    {
        HbarSeries s(K);
        s.eps_[0] = c;
        return s;
    }

    int order() const { return K_; }
    const S& eps_coeff(int p) const { return eps_.at(p); }
    S& eps_coeff(int p) { return eps_.at(p); }
    const S& operator[](int k) const { return eps_.at(2 * k); }
    S& operator[](int k) { return eps_.at(2 * k); }

    bool odd_part_zero() const
    {
        for (size_t p = 1; p < eps_.size(); p += 2)
            if (!is_zero(eps_[p]))
                return false;
        return true;
    }
    void assert_even() const
    {
        if (!odd_part_zero())
            throw std::logic_error("half-integer hbar power survived");
    }

    HbarSeries truncated(int K) const
    {
        HbarSeries r(std::min(K, K_));
        for (int p = 0; p <= 2 * r.K_; ++p)
            r.eps_[p] = eps_[p];
        return r;
    }

    HbarSeries& operator+=(const HbarSeries& o)
    {
        same(o);
        for (size_t p = 0; p < eps_.size(); ++p)
            eps_[p] += o.eps_[p];
        return *this;
    }
    HbarSeries& operator-=(const HbarSeries& o)
    {
        same(o);
        for (size_t p = 0; p < eps_.size(); ++p)
            eps_[p] -= o.eps_[p];
        return *this;
    }
    friend HbarSeries operator+(HbarSeries a, const HbarSeries& b) { return a += b; }
    friend HbarSeries operator-(HbarSeries a, const HbarSeries& b) { return a -= b; }
    friend HbarSeries operator*(const HbarSeries& a, const HbarSeries& b)
    {
        a.same(b);
        HbarSeries r(a.K_);
        int P = 2 * a.K_;
        for (int p = 0; p <= P; ++p) {
            if (is_zero(a.eps_[p]))
                continue;
            for (int q = 0; p + q <= P; ++q)
                r.eps_[p + q] += a.eps_[p] * b.eps_[q];
        }
        return r;
    }
    HbarSeries scaled(const S& s) const
    {
        HbarSeries r(K_);
        for (size_t p = 0; p < eps_.size(); ++p)
            r.eps_[p] = eps_[p] * s;
        return r;
    }
    friend bool operator==(const HbarSeries& a, const HbarSeries& b) { return a.K_ == b.K_ && a.eps_ == b.eps_; }
    friend bool operator!=(const HbarSeries& a, const HbarSeries& b) { return !(a == b); }

    template <class F>
    auto map(F f) const
    {
        using T = decltype(f(eps_[0]));
        HbarSeries<T> r(K_);
        for (size_t p = 0; p < eps_.size(); ++p)
            r.eps_coeff((int)p) = f(eps_[p]);
        return r;
    }

private:
    void same(const HbarSeries& o) const
    {
        if (K_ != o.K_)
            throw std::invalid_argument("hbar cutoff mismatch");
    }
    int K_;
    std::vector<S> eps_;
};

template <class S>
HbarSeries<S> series_invert(const HbarSeries<S>& s)
{
    const S& c0 = s.eps_coeff(0);
    if (!is_invertible(c0))
        throw std::invalid_argument("series_invert: leading coefficient not invertible");
    int P = 2 * s.order();
    HbarSeries<S> r(s.order());
    r.eps_coeff(0) = inverse(c0);
    for (int p = 1; p <= P; ++p) {
        S acc(0);
        for (int q = 1; q <= p; ++q)
            if (!is_zero(s.eps_coeff(q)))
                acc += s.eps_coeff(q) * r.eps_coeff(p - q);
        r.eps_coeff(p) = -(acc * r.eps_coeff(0));
    }
    return r;
}

}  // namespace kstar
