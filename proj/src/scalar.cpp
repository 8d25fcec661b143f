#include "kstar/scalar.hpp"

#include <mutex>
#include <sstream>
#include <vector>

namespace kstar {

CRational& CRational::operator*=(const CRational& o)
{
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    Rat r = re_ * o.re_ - im_ * o.im_;
    Rat i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
}

CRational CRational::inverse() const
{
    if (is_zero())
        throw std::domain_error("division by zero in exact complex arithmetic");
    Rat d = norm2();
    return CRational(re_ / d, -im_ / d);
}

std::string CRational::str() const
{
    std::ostringstream os;
    if (sgn(im_) == 0) {
        os << re_;
    } else if (sgn(re_) == 0) {
        os << im_ << "*i";
    } else {
        os << "(" << re_ << (sgn(im_) > 0 ? "+" : "-") << abs(im_) << "*i)";
    }
    return os.str();
}

Rat parse_rational(const std::string& s)
{
    Rat q;
    auto slash = s.find('/');
    std::string t = s;
    if (!t.empty() && t[0] == '+')
        t = t.substr(1);
    if (q.set_str(t, 10) != 0)
        throw std::invalid_argument("not a rational number: '" + s + "'");
    if (slash != std::string::npos && q.get_den() == 0)
        throw std::invalid_argument("zero denominator: '" + s + "'");
    q.canonicalize();
    return q;
}

CRational parse_crational(const std::string& s)
{
    // forms: "a", "a+bi", "a-b*i", "bi", "i"
    std::string t;
    for (char c : s)
        if (c != ' ' && c != '*')
            t += c;
    if (t.empty())
        throw std::invalid_argument("empty number");
    if (t.back() != 'i')
        return CRational(parse_rational(t));
    t.pop_back();
    size_t split = std::string::npos;
    for (size_t k = t.size(); k-- > 1;) {
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != '/') {
            split = k;
            break;
        }
    }
    auto im_part = [](std::string u) {
        if (u.empty() || u == "+")
            return Rat(1);
        if (u == "-")
            return Rat(-1);
        return parse_rational(u);
    };
    if (split == std::string::npos)
        return CRational(Rat(0), im_part(t));
    return CRational(parse_rational(t.substr(0, split)), im_part(t.substr(split)));
}

Rat factorial(int k)
{
    static std::mutex mu;
    static std::vector<Rat> cache{Rat(1)};
    std::lock_guard<std::mutex> lock(mu);
    while ((int)cache.size() <= k)
        cache.push_back(cache.back() * Rat((long)cache.size()));
    return cache[k];
}

Rat inv_factorial(int k)
{
    return Rat(1) / factorial(k);
}

}  // namespace kstar
