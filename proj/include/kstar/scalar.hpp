#pragma once

#include <complex>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace kstar {

using Rat = mpq_class;

inline Rat ratio(long num, long den)
{
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// Complex number with exact rational real and imaginary parts.
class CRational {
public:
    CRational() = default;
    CRational(long v) : re_(v) {}
    CRational(int v) : re_(v) {}
    CRational(const Rat& re) : re_(re) {}
    CRational(Rat re, Rat im) : re_(std::move(re)), im_(std::move(im)) {}

    static CRational i() { return CRational(Rat(0), Rat(1)); }
    static CRational frac(long num, long den) { Rat q(num, den); q.canonicalize(); return CRational(q); }

    const Rat& re() const { return re_; }
    const Rat& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool is_invertible() const { return !is_zero(); }

    CRational conj() const { return CRational(re_, -im_); }
    Rat norm2() const { return re_ * re_ + im_ * im_; }
    CRational inverse() const;

    CRational& operator+=(const CRational& o) { re_ += o.re_; im_ += o.im_; return *this; }
    CRational& operator-=(const CRational& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
    CRational& operator*=(const CRational& o);
    CRational& operator/=(const CRational& o) { return *this *= o.inverse(); }

    friend CRational operator+(CRational a, const CRational& b) { return a += b; }
    friend CRational operator-(CRational a, const CRational& b) { return a -= b; }
    friend CRational operator*(CRational a, const CRational& b) { return a *= b; }
    friend CRational operator/(CRational a, const CRational& b) { return a /= b; }
    CRational operator-() const { return CRational(-re_, -im_); }

    friend bool operator==(const CRational& a, const CRational& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    friend bool operator!=(const CRational& a, const CRational& b) { return !(a == b); }

    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }
    std::string str() const;

private:
    Rat re_{0};
    Rat im_{0};
};

using CDouble = std::complex<double>;

inline std::ostream& operator<<(std::ostream& os, const CRational& c) { return os << c.str(); }

Rat parse_rational(const std::string& s);
CRational parse_crational(const std::string& s);

// Generic ring hooks so templated code runs over CRational, CDouble and JetScalar.
inline CRational conj(const CRational& x) { return x.conj(); }
inline bool is_zero(const CRational& x) { return x.is_zero(); }
inline bool is_invertible(const CRational& x) { return x.is_invertible(); }
inline CRational inverse(const CRational& x) { return x.inverse(); }
inline CRational truncate(const CRational& x, int) { return x; }
inline CRational multiply_truncated(const CRational& a, const CRational& b, int) { return a * b; }

inline CDouble conj(const CDouble& x) { return std::conj(x); }
inline bool is_zero(const CDouble& x) { return x == CDouble(0.0); }
inline bool is_invertible(const CDouble& x) { return x != CDouble(0.0); }
inline CDouble inverse(const CDouble& x) { return 1.0 / x; }
inline CDouble truncate(const CDouble& x, int) { return x; }
inline CDouble multiply_truncated(const CDouble& a, const CDouble& b, int) { return a * b; }

template <class S>
S from_rational(const Rat& q);
template <>
inline CRational from_rational<CRational>(const Rat& q) { return CRational(q); }
template <>
inline CDouble from_rational<CDouble>(const Rat& q) { return CDouble(q.get_d(), 0.0); }

template <class S>
S from_crational(const CRational& q);
template <>
inline CRational from_crational<CRational>(const CRational& q) { return q; }
template <>
inline CDouble from_crational<CDouble>(const CRational& q) { return q.to_complex(); }

// Rational factorial and binomial helpers.
Rat factorial(int k);
Rat inv_factorial(int k);

}  // namespace kstar
