#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "kstar/scalar.hpp"

namespace kstar {

using MultiIndex = std::vector<int>;

// Packed monomial exponent: bits 56..63 hold the total degree, field f (f < 7)
// sits in bits 48-8f..55-8f.  Numeric order on keys is graded-lex order, and
// monomial multiplication is plain integer addition.
using Key = std::uint64_t;

namespace mono {

constexpr int max_fields = 7;
constexpr int max_exponent = 255;

inline int shift(int f) { return 48 - 8 * f; }

inline int degree(Key k) { return static_cast<int>(k >> 56); }

inline int get(Key k, int f) { return static_cast<int>((k >> shift(f)) & 0xff); }

inline Key unit(int f) { return (Key(1) << 56) | (Key(1) << shift(f)); }

Key pack(const std::vector<int>& e);
std::vector<int> unpack(Key k, int nfields);

// Sum of fields [lo, hi).
int partial_degree(Key k, int lo, int hi);

// Exponents of fields [lo, hi) as a key over hi-lo fields.
Key slice(Key k, int lo, int hi);

// Concatenate a key over na fields with a key over nb fields.
Key concat(Key a, int na, Key b);

inline bool divides(Key a, Key b, int nfields)
{
    for (int f = 0; f < nfields; ++f)
        if (get(a, f) > get(b, f))
            return false;
    return true;
}

Rat factorial(Key k, int nfields);

// All exponent keys with nfields fields and total degree <= max_deg, in key order.
const std::vector<Key>& all_up_to(int nfields, int max_deg);

// All exponent keys with exactly the given total degree.
std::vector<Key> all_of_degree(int nfields, int deg);

std::string str(Key k, int nfields);

}  // namespace mono

inline int total(const MultiIndex& I)
{
    int s = 0;
    for (int v : I)
        s += v;
    return s;
}

Rat mi_factorial(const MultiIndex& I);

// I=(2,1) -> [0,0,1]
std::vector<int> slots(const MultiIndex& I);

MultiIndex unit_index(int n, int i);

}  // namespace kstar
