#pragma once

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kstar/multi_index.hpp"
#include "kstar/scalar.hpp"

namespace kstar {

inline std::string scalar_str(const CRational& c) { return c.str(); }
inline std::string scalar_str(const CDouble& c)
{
    std::ostringstream os;
    os.precision(17);
    os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "*i)";
    return os.str();
}

// Ring element that is itself a truncated Taylor jet in the base-point
// displacement (w, wbar), w in C^n; keys carry 2n fields, w first.  Each value
// carries its own cutoff; a binary operation keeps min(cutoffs), so a known
// O(w^{d+1}) error is never hidden.  Constants have cutoff `exact`.
template <class C>
class BasicJetScalar {
public:
    static constexpr int exact = 255;
    using Term = std::pair<Key, C>;

    BasicJetScalar() = default;
    BasicJetScalar(long v) : BasicJetScalar(from_rational<C>(Rat(v))) {}
    BasicJetScalar(int v) : BasicJetScalar(from_rational<C>(Rat(v))) {}
    BasicJetScalar(const C& c)
    {
        if (!kstar::is_zero(c))
            terms_.emplace_back(Key(0), c);
    }
    BasicJetScalar(int n, int cutoff) : n_(n), cutoff_(cutoff) {}

    static BasicJetScalar variable(int n, int cutoff, int field)
    {
        BasicJetScalar r(n, cutoff);
        if (cutoff >= 1)
            r.terms_.emplace_back(mono::unit(field), C(1));
        return r;
    }

    int n() const { return n_; }
    int cutoff() const { return cutoff_; }
    const std::vector<Term>& terms() const { return terms_; }

    C coeff(Key k) const
    {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                                   [](const Term& t, Key key) { return t.first < key; });
        if (it != terms_.end() && it->first == k)
            return it->second;
        return C(0);
    }
    C value() const { return coeff(Key(0)); }
    // d^A dbar^B at w = 0.
    C derivative(const MultiIndex& A, const MultiIndex& B) const
    {
        std::vector<int> e(A);
        e.insert(e.end(), B.begin(), B.end());
        return coeff(mono::pack(e)) * from_rational<C>(mi_factorial(A) * mi_factorial(B));
    }

    // The derivative d^k (k over 2n fields, w first) as a jet; the cutoff
    // drops by |k|.
    BasicJetScalar diff(Key k) const
    {
        int d = mono::degree(k);
        if (d == 0)
            return *this;
        if (cutoff_ != exact && d > cutoff_)
            throw std::out_of_range("derivative of order " + std::to_string(d) + " of a jet known to order " +
                                    std::to_string(cutoff_));
        const int nf = mono::max_fields;
        BasicJetScalar r(n_, cutoff_ == exact ? exact : cutoff_ - d);
        for (auto& [key, c] : terms_) {
            if (!mono::divides(k, key, nf))
                continue;
            Key rest = key - k;
            r.terms_.emplace_back(rest, c * from_rational<C>(mono::factorial(key, nf) / mono::factorial(rest, nf)));
        }
        r.normalize();
        return r;
    }

    void add_term(Key k, const C& c)
    {
        if (mono::degree(k) > cutoff_ || kstar::is_zero(c))
            return;
        auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                                   [](const Term& t, Key key) { return t.first < key; });
        if (it != terms_.end() && it->first == k) {
            it->second += c;
            if (kstar::is_zero(it->second))
                terms_.erase(it);
        } else {
            terms_.insert(it, {k, c});
        }
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_invertible() const { return !kstar::is_zero(value()); }

    BasicJetScalar& operator+=(const BasicJetScalar& o)
    {
        merge(o, false);
        return *this;
    }
    BasicJetScalar& operator-=(const BasicJetScalar& o)
    {
        merge(o, true);
        return *this;
    }
    BasicJetScalar& operator*=(const BasicJetScalar& o)
    {
        *this = *this * o;
        return *this;
    }
    BasicJetScalar operator-() const
    {
        BasicJetScalar r = *this;
        for (auto& t : r.terms_)
            t.second = -t.second;
        return r;
    }
    friend BasicJetScalar operator+(BasicJetScalar a, const BasicJetScalar& b) { return a += b; }
    friend BasicJetScalar operator-(BasicJetScalar a, const BasicJetScalar& b) { return a -= b; }
    friend BasicJetScalar operator*(const BasicJetScalar& a, const BasicJetScalar& b) { return product(a, b, exact); }
    // a * b with the result cut at degree `deg` as well.
    static BasicJetScalar product(const BasicJetScalar& a, const BasicJetScalar& b, int deg)
    {
        BasicJetScalar r(std::max(a.n_, b.n_), std::min({a.cutoff_, b.cutoff_, deg}));
        if (a.terms_.empty() || b.terms_.empty())
            return r;
        if (b.terms_.size() == 1 && b.terms_[0].first == 0) {
            for (auto& t : a.terms_)
                if (mono::degree(t.first) <= r.cutoff_)
                    r.terms_.emplace_back(t.first, t.second * b.terms_[0].second);
            return r;
        }
        if (a.terms_.size() == 1 && a.terms_[0].first == 0)
            return product(b, a, deg);
        r.terms_.reserve(a.terms_.size() * b.terms_.size());
        for (auto& [ka, ca] : a.terms_) {
            int room = r.cutoff_ - mono::degree(ka);
            if (room < 0)
                break;
            for (auto& [kb, cb] : b.terms_) {
                if (mono::degree(kb) > room)
                    break;
                r.terms_.emplace_back(ka + kb, ca * cb);
            }
        }
        r.normalize();
        return r;
    }
    friend BasicJetScalar operator/(const BasicJetScalar& a, const BasicJetScalar& b) { return a * b.inverse(); }

    // Equal as jets up to the smaller cutoff.
    friend bool operator==(const BasicJetScalar& a, const BasicJetScalar& b)
    {
        int c = std::min(a.cutoff_, b.cutoff_);
        BasicJetScalar d = a.truncated(c);
        d -= b.truncated(c);
        return d.is_zero();
    }
    friend bool operator!=(const BasicJetScalar& a, const BasicJetScalar& b) { return !(a == b); }

    BasicJetScalar conj() const
    {
        BasicJetScalar r(n_, cutoff_);
        for (auto& [k, c] : terms_) {
            std::vector<int> e = mono::unpack(k, 2 * n_);
            std::vector<int> s(2 * n_);
            for (int i = 0; i < n_; ++i) {
                s[i] = e[n_ + i];
                s[n_ + i] = e[i];
            }
            r.terms_.emplace_back(mono::pack(s), kstar::conj(c));
        }
        r.normalize();
        return r;
    }

    BasicJetScalar inverse() const
    {
        C c0 = value();
        if (kstar::is_zero(c0))
            throw std::domain_error("jet scalar with zero value is not invertible");
        C inv0 = kstar::inverse(c0);
        BasicJetScalar rest = *this * BasicJetScalar(inv0);
        rest -= BasicJetScalar(1);
        if (rest.is_zero())
            return BasicJetScalar(inv0).truncated(cutoff_);
        if (cutoff_ == exact)
            throw std::domain_error("inverse of an untruncated jet scalar");
        BasicJetScalar result(1);
        BasicJetScalar power(1);
        for (int k = 1; k <= cutoff_; ++k) {
            power = -(power * rest);
            if (power.is_zero())
                break;
            result += power;
        }
        return (result * BasicJetScalar(inv0)).truncated(cutoff_);
    }

    BasicJetScalar truncated(int deg) const
    {
        BasicJetScalar r(n_, std::min(deg, cutoff_));
        for (auto& t : terms_)
            if (mono::degree(t.first) <= r.cutoff_)
                r.terms_.push_back(t);
        return r;
    }

    // Drop all dependence on w (keep_w = false) and/or wbar.
    BasicJetScalar restricted(bool keep_w, bool keep_wbar) const
    {
        BasicJetScalar r(n_, cutoff_);
        for (auto& t : terms_) {
            if (!keep_w && mono::partial_degree(t.first, 0, n_) > 0)
                continue;
            if (!keep_wbar && mono::partial_degree(t.first, n_, 2 * n_) > 0)
                continue;
            r.terms_.push_back(t);
        }
        return r;
    }

    std::string str() const
    {
        std::ostringstream os;
        if (terms_.empty())
            os << "0";
        for (size_t i = 0; i < terms_.size(); ++i) {
            os << (i ? " + " : "") << scalar_str(terms_[i].second);
            if (terms_[i].first != 0)
                os << "*w" << mono::str(terms_[i].first, 2 * n_);
        }
        if (cutoff_ != exact)
            os << " + O(" << cutoff_ + 1 << ")";
        return os.str();
    }

private:
    void normalize()
    {
        std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (auto& t : terms_) {
            if (mono::degree(t.first) > cutoff_)
                continue;
            if (!out.empty() && out.back().first == t.first)
                out.back().second += t.second;
            else
                out.push_back(std::move(t));
            if (kstar::is_zero(out.back().second))
                out.pop_back();
        }
        terms_ = std::move(out);
    }

    void merge(const BasicJetScalar& o, bool negate)
    {
        n_ = std::max(n_, o.n_);
        int cut = std::min(cutoff_, o.cutoff_);
        cutoff_ = cut;
        std::vector<Term> out;
        out.reserve(terms_.size() + o.terms_.size());
        size_t i = 0, j = 0;
        while (i < terms_.size() || j < o.terms_.size()) {
            if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
                if (mono::degree(terms_[i].first) <= cut)
                    out.push_back(std::move(terms_[i]));
                ++i;
            } else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) {
                if (mono::degree(o.terms_[j].first) <= cut)
                    out.emplace_back(o.terms_[j].first, negate ? -o.terms_[j].second : o.terms_[j].second);
                ++j;
            } else {
                C c = negate ? terms_[i].second - o.terms_[j].second : terms_[i].second + o.terms_[j].second;
                if (!kstar::is_zero(c) && mono::degree(terms_[i].first) <= cut)
                    out.emplace_back(terms_[i].first, std::move(c));
                ++i;
                ++j;
            }
        }
        terms_ = std::move(out);
    }

    int n_ = 0;
    int cutoff_ = exact;
    std::vector<Term> terms_;  // sorted by key, no zeros
};

using JetScalar = BasicJetScalar<CRational>;
using JetScalarD = BasicJetScalar<CDouble>;

template <class C>
BasicJetScalar<C> conj(const BasicJetScalar<C>& x)
{
    return x.conj();
}
template <class C>
bool is_zero(const BasicJetScalar<C>& x)
{
    return x.is_zero();
}
template <class C>
bool is_invertible(const BasicJetScalar<C>& x)
{
    return x.is_invertible();
}
template <class C>
BasicJetScalar<C> inverse(const BasicJetScalar<C>& x)
{
    return x.inverse();
}
template <class C>
BasicJetScalar<C> truncate(const BasicJetScalar<C>& x, int deg)
{
    return x.truncated(deg);
}
template <class C>
BasicJetScalar<C> multiply_truncated(const BasicJetScalar<C>& a, const BasicJetScalar<C>& b, int deg)
{
    return BasicJetScalar<C>::product(a, b, deg);
}

template <>
inline JetScalar from_rational<JetScalar>(const Rat& q) { return JetScalar(CRational(q)); }
template <>
inline JetScalar from_crational<JetScalar>(const CRational& q) { return JetScalar(q); }
template <>
inline JetScalarD from_rational<JetScalarD>(const Rat& q) { return JetScalarD(from_rational<CDouble>(q)); }
template <>
inline JetScalarD from_crational<JetScalarD>(const CRational& q) { return JetScalarD(q.to_complex()); }

}  // namespace kstar
