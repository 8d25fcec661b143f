#pragma once

#include <map>
#include <string>
#include <vector>

#include "kstar/jet.hpp"
#include "kstar/multi_index.hpp"
#include "kstar/scalar.hpp"

namespace kstar {

using Point = std::vector<CRational>;

// Polynomial in z and conj(z), z in C^n, exact complex rational coefficients.
// Keys have 2n fields: exponents of z^1..z^n then of conj(z^1)..conj(z^n).
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int n) : n_(n) {}
    static Polynomial constant(int n, const CRational& c);
    static Polynomial z(int n, int i);
    static Polynomial zbar(int n, int i);

    int n() const { return n_; }
    const std::map<Key, CRational>& terms() const { return terms_; }
    void add_term(Key k, const CRational& c);
    void add_term(const MultiIndex& I, const MultiIndex& J, const CRational& c);

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    Polynomial scaled(const CRational& c) const;
    Polynomial pow(int e) const;
    Polynomial conj() const;
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }

    bool is_holomorphic() const;
    bool is_antiholomorphic() const;
    int degree() const;

    CRational eval(const Point& p) const;
    CDouble eval(const std::vector<CDouble>& p) const;
    // Taylor jet f(p + y, conj(p) + ybar) to total degree M.
    TruncatedJet<CRational> jet_at(const Point& p, int M) const;
    TruncatedJet<CDouble> jet_at(const std::vector<CDouble>& p, int M) const;
    // d^I dbar^J f evaluated at a floating point.
    CDouble derivative(const std::vector<CDouble>& p, const MultiIndex& I, const MultiIndex& J) const;

    std::string str() const;

private:
    int n_ = 0;
    std::map<Key, CRational> terms_;
};

// Mini-language: sums/products/powers of rationals, i, z (= z1), z1..z3,
// conj(...), parentheses.  Example: "3/2*z*conj(z)^2 - i*z2".
Polynomial parse_polynomial(const std::string& text, int n);

Point parse_point(const std::string& text, int n);
std::string point_str(const Point& p);

}  // namespace kstar
