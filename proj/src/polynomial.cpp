#include "kstar/polynomial.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace kstar {

Polynomial Polynomial::constant(int n, const CRational& c)
{
    Polynomial p(n);
    p.add_term(Key(0), c);
    return p;
}

Polynomial Polynomial::z(int n, int i)
{
    Polynomial p(n);
    p.add_term(mono::unit(i), CRational(1));
    return p;
}

Polynomial Polynomial::zbar(int n, int i)
{
    Polynomial p(n);
    p.add_term(mono::unit(n + i), CRational(1));
    return p;
}

void Polynomial::add_term(Key k, const CRational& c)
{
    if (c.is_zero())
        return;
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        terms_.emplace(k, c);
    } else {
        it->second += c;
        if (it->second.is_zero())
            terms_.erase(it);
    }
}

void Polynomial::add_term(const MultiIndex& I, const MultiIndex& J, const CRational& c)
{
    std::vector<int> e(I);
    e.insert(e.end(), J.begin(), J.end());
    if ((int)e.size() != 2 * n_)
        throw std::invalid_argument("polynomial term dimension mismatch");
    add_term(mono::pack(e), c);
}

Polynomial& Polynomial::operator+=(const Polynomial& o)
{
    if (n_ != o.n_)
        throw std::invalid_argument("polynomial dimension mismatch");
    for (auto& [k, c] : o.terms_)
        add_term(k, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o)
{
    if (n_ != o.n_)
        throw std::invalid_argument("polynomial dimension mismatch");
    for (auto& [k, c] : o.terms_)
        add_term(k, -c);
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
    if (a.n_ != b.n_)
        throw std::invalid_argument("polynomial dimension mismatch");
    Polynomial r(a.n_);
    for (auto& [ka, ca] : a.terms_)
        for (auto& [kb, cb] : b.terms_)
            r.add_term(ka + kb, ca * cb);
    return r;
}

Polynomial Polynomial::scaled(const CRational& c) const
{
    Polynomial r(n_);
    for (auto& [k, v] : terms_)
        r.add_term(k, v * c);
    return r;
}

Polynomial Polynomial::pow(int e) const
{
    if (e < 0)
        throw std::invalid_argument("negative polynomial power");
    Polynomial r = constant(n_, CRational(1));
    for (int k = 0; k < e; ++k)
        r = r * *this;
    return r;
}

Polynomial Polynomial::conj() const
{
    Polynomial r(n_);
    for (auto& [k, c] : terms_) {
        auto e = mono::unpack(k, 2 * n_);
        std::vector<int> s(2 * n_);
        for (int i = 0; i < n_; ++i) {
            s[i] = e[n_ + i];
            s[n_ + i] = e[i];
        }
        r.add_term(mono::pack(s), c.conj());
    }
    return r;
}

bool Polynomial::is_holomorphic() const
{
    for (auto& [k, c] : terms_)
        if (mono::partial_degree(k, n_, 2 * n_) > 0)
            return false;
    return true;
}

bool Polynomial::is_antiholomorphic() const
{
    for (auto& [k, c] : terms_)
        if (mono::partial_degree(k, 0, n_) > 0)
            return false;
    return true;
}

int Polynomial::degree() const
{
    int d = 0;
    for (auto& [k, c] : terms_)
        d = std::max(d, mono::degree(k));
    return d;
}

template <class T>
static T power(const T& x, int e)
{
    T r(1);
    for (int k = 0; k < e; ++k)
        r *= x;
    return r;
}

CRational Polynomial::eval(const Point& p) const
{
    CRational s(0);
    for (auto& [k, c] : terms_) {
        CRational t = c;
        for (int i = 0; i < n_; ++i) {
            t *= power(p[i], mono::get(k, i));
            t *= power(p[i].conj(), mono::get(k, n_ + i));
        }
        s += t;
    }
    return s;
}

CDouble Polynomial::eval(const std::vector<CDouble>& p) const
{
    CDouble s(0);
    for (auto& [k, c] : terms_) {
        CDouble t = c.to_complex();
        for (int i = 0; i < n_; ++i) {
            t *= power(p[i], mono::get(k, i));
            t *= power(std::conj(p[i]), mono::get(k, n_ + i));
        }
        s += t;
    }
    return s;
}

CDouble Polynomial::derivative(const std::vector<CDouble>& p, const MultiIndex& I, const MultiIndex& J) const
{
    CDouble s(0);
    for (auto& [k, c] : terms_) {
        CDouble t = c.to_complex();
        for (int f = 0; f < 2 * n_ && t != CDouble(0); ++f) {
            int e = mono::get(k, f);
            int d = f < n_ ? I[f] : J[f - n_];
            if (d > e) {
                t = 0;
                break;
            }
            double fall = 1;
            for (int q = 0; q < d; ++q)
                fall *= e - q;
            CDouble base = f < n_ ? p[f] : std::conj(p[f - n_]);
            t *= fall * power(base, e - d);
        }
        s += t;
    }
    return s;
}

namespace {

template <class C>
C power_of(const C& b, int e)
{
    C r(1);
    for (int i = 0; i < e; ++i)
        r = r * b;
    return r;
}

template <class C>
TruncatedJet<C> jet_at_impl(const std::map<Key, CRational>& terms, int n, const std::vector<C>& p, int M)
{
    if ((int)p.size() != n)
        throw std::invalid_argument("point dimension mismatch");
    TruncatedJet<C> jet(n, M);
    for (auto& [k, c0] : terms) {
        // product over fields of (base_f + y_f)^{e_f}
        std::vector<std::pair<Key, C>> acc{{Key(0), from_crational<C>(c0)}};
        for (int f = 0; f < 2 * n; ++f) {
            int e = mono::get(k, f);
            if (e == 0)
                continue;
            C base = f < n ? p[f] : conj(p[f - n]);
            std::vector<std::pair<Key, C>> next;
            for (auto& [ka, ca] : acc) {
                Rat binom(1);
                for (int j = 0; j <= e; ++j) {
                    if (j > 0)
                        binom = binom * Rat(e - j + 1) / Rat(j);
                    if (mono::degree(ka) + j > M)
                        break;
                    C coef = ca * from_rational<C>(binom) * power_of(base, e - j);
                    if (is_zero(coef))
                        continue;
                    Key kk = ka;
                    for (int q = 0; q < j; ++q)
                        kk += mono::unit(f);
                    next.emplace_back(kk, coef);
                }
            }
            acc = std::move(next);
        }
        for (auto& [kk, cc] : acc)
            jet.add_to(kk, cc);
    }
    return jet;
}

}  // namespace

TruncatedJet<CRational> Polynomial::jet_at(const Point& p, int M) const
{
    return jet_at_impl(terms_, n_, p, M);
}

TruncatedJet<CDouble> Polynomial::jet_at(const std::vector<CDouble>& p, int M) const
{
    return jet_at_impl(terms_, n_, p, M);
}

std::string Polynomial::str() const
{
    std::ostringstream os;
    bool first = true;
    for (auto& [k, c] : terms_) {
        os << (first ? "" : " + ") << c.str();
        first = false;
        for (int f = 0; f < 2 * n_; ++f) {
            int e = mono::get(k, f);
            if (e == 0)
                continue;
            std::string v = (n_ == 1) ? "z" : "z" + std::to_string(f % n_ + 1);
            os << "*" << (f < n_ ? v : "conj(" + v + ")");
            if (e > 1)
                os << "^" << e;
        }
    }
    if (first)
        os << "0";
    return os.str();
}

namespace {

class Parser {
public:
    Parser(const std::string& s, int n) : s_(s), n_(n) {}

    Polynomial parse()
    {
        Polynomial p = expr();
        skip();
        if (pos_ != s_.size())
            fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return p;
    }

private:
    void skip()
    {
        while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_]))
            ++pos_;
    }
    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) const
    {
        throw std::invalid_argument("cannot parse '" + s_ + "' at position " + std::to_string(pos_) + ": " + msg);
    }

    Polynomial expr()
    {
        Polynomial p(n_);
        bool neg = eat('-');
        if (!neg)
            eat('+');
        Polynomial t = term();
        p = neg ? p - t : p + t;
        while (true) {
            if (eat('+'))
                p += term();
            else if (eat('-'))
                p -= term();
            else
                break;
        }
        return p;
    }
    Polynomial term()
    {
        Polynomial p = factor();
        while (true) {
            if (eat('*')) {
                p = p * factor();
            } else if (eat('/')) {
                Polynomial d = factor();
                if (d.degree() != 0 || d.terms().empty())
                    fail("division by a non-constant");
                p = p.scaled(d.terms().begin()->second.inverse());
            } else {
                break;
            }
        }
        return p;
    }
    Polynomial factor()
    {
        Polynomial b = atom();
        if (eat('^')) {
            skip();
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_]))
                ++pos_;
            if (start == pos_)
                fail("expected exponent");
            b = b.pow(std::stoi(s_.substr(start, pos_ - start)));
        }
        return b;
    }
    Polynomial atom()
    {
        skip();
        if (eat('(')) {
            Polynomial p = expr();
            if (!eat(')'))
                fail("expected ')'");
            return p;
        }
        if (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) {
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_]))
                ++pos_;
            return Polynomial::constant(n_, CRational(parse_rational(s_.substr(start, pos_ - start))));
        }
        size_t start = pos_;
        while (pos_ < s_.size() && std::isalnum((unsigned char)s_[pos_]))
            ++pos_;
        std::string id = s_.substr(start, pos_ - start);
        if (id == "i")
            return Polynomial::constant(n_, CRational::i());
        if (id == "conj") {
            if (!eat('('))
                fail("expected '(' after conj");
            Polynomial p = expr();
            if (!eat(')'))
                fail("expected ')'");
            return p.conj();
        }
        if (!id.empty() && id[0] == 'z') {
            int idx = 1;
            if (id.size() > 1)
                idx = std::stoi(id.substr(1));
            if (idx < 1 || idx > n_)
                fail("variable " + id + " outside dimension " + std::to_string(n_));
            return Polynomial::z(n_, idx - 1);
        }
        fail(id.empty() ? "expected a term" : "unknown identifier '" + id + "'");
    }

    std::string s_;
    int n_;
    size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(const std::string& text, int n)
{
    return Parser(text, n).parse();
}

Point parse_point(const std::string& text, int n)
{
    Point p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        p.push_back(parse_crational(item));
    if (p.size() == 1 && n > 1 && p[0].is_zero())
        p.assign(n, CRational(0));
    if ((int)p.size() != n)
        throw std::invalid_argument("point '" + text + "' has " + std::to_string(p.size()) +
                                    " coordinates, expected " + std::to_string(n));
    return p;
}

std::string point_str(const Point& p)
{
    std::string s;
    for (size_t i = 0; i < p.size(); ++i)
        s += (i ? "," : "") + p[i].str();
    return s;
}

}  // namespace kstar
