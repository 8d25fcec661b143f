#include "kstar/multi_index.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace kstar {
namespace mono {

Key pack(const std::vector<int>& e)
{
    if ((int)e.size() > max_fields)
        throw std::invalid_argument("too many monomial fields");
    Key k = 0;
    int d = 0;
    for (size_t f = 0; f < e.size(); ++f) {
        if (e[f] < 0 || e[f] > max_exponent)
            throw std::invalid_argument("exponent out of range");
        k |= Key(e[f]) << shift((int)f);
        d += e[f];
    }
    if (d > max_exponent)
        throw std::invalid_argument("total degree out of range");
    return k | (Key(d) << 56);
}

std::vector<int> unpack(Key k, int nfields)
{
    std::vector<int> e(nfields);
    for (int f = 0; f < nfields; ++f)
        e[f] = get(k, f);
    return e;
}

int partial_degree(Key k, int lo, int hi)
{
    int d = 0;
    for (int f = lo; f < hi; ++f)
        d += get(k, f);
    return d;
}

Key slice(Key k, int lo, int hi)
{
    std::vector<int> e;
    for (int f = lo; f < hi; ++f)
        e.push_back(get(k, f));
    return pack(e);
}

Key concat(Key a, int na, Key b)
{
    Key body_b = b & ((Key(1) << 56) - 1);
    return a + (body_b >> (8 * na)) + (Key(degree(b)) << 56);
}

Rat factorial(Key k, int nfields)
{
    Rat r(1);
    for (int f = 0; f < nfields; ++f)
        r *= kstar::factorial(get(k, f));
    return r;
}

static void rec(int nfields, int f, int left, std::vector<int>& e, std::vector<Key>& out)
{
    if (f == nfields - 1) {
        e[f] = left;
        out.push_back(pack(e));
        return;
    }
    for (int v = left; v >= 0; --v) {
        e[f] = v;
        rec(nfields, f + 1, left - v, e, out);
    }
}

std::vector<Key> all_of_degree(int nfields, int deg)
{
    std::vector<Key> out;
    if (nfields == 0) {
        if (deg == 0)
            out.push_back(0);
        return out;
    }
    std::vector<int> e(nfields);
    rec(nfields, 0, deg, e, out);
    std::sort(out.begin(), out.end());
    return out;
}

const std::vector<Key>& all_up_to(int nfields, int max_deg)
{
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<Key>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& v = cache[{nfields, max_deg}];
    if (v.empty()) {
        for (int d = 0; d <= max_deg; ++d) {
            auto layer = all_of_degree(nfields, d);
            v.insert(v.end(), layer.begin(), layer.end());
        }
    }
    return v;
}

std::string str(Key k, int nfields)
{
    std::ostringstream os;
    os << "(";
    for (int f = 0; f < nfields; ++f)
        os << (f ? "," : "") << get(k, f);
    os << ")";
    return os.str();
}

}  // namespace mono

Rat mi_factorial(const MultiIndex& I)
{
    Rat r(1);
    for (int v : I)
        r *= factorial(v);
    return r;
}

std::vector<int> slots(const MultiIndex& I)
{
    std::vector<int> s;
    for (size_t i = 0; i < I.size(); ++i)
        for (int c = 0; c < I[i]; ++c)
            s.push_back((int)i);
    return s;
}

MultiIndex unit_index(int n, int i)
{
    MultiIndex I(n, 0);
    I[i] = 1;
    return I;
}

}  // namespace kstar
