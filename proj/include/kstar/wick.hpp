#pragma once

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "kstar/jet.hpp"
#include "kstar/multi_index.hpp"

namespace kstar {

// Gaussian moments E[y^I ybar^J] = d^I dbar^J exp(sum h^{ij} z_i zbar_j) at 0
// for the normalized measure, memoized per table.  A table is not meant to be
// shared between threads; give each thread its own.
template <class S>
class WickTable {
public:
    WickTable() = default;
    explicit WickTable(std::vector<std::vector<S>> hinv) : hinv_(std::move(hinv)), n_((int)hinv_.size())
    {
        for (auto& row : hinv_)
            if ((int)row.size() != n_)
                throw std::invalid_argument("inverse metric must be square");
    }

    int n() const { return n_; }
    const std::vector<std::vector<S>>& hinv() const { return hinv_; }

    // I, J: keys over n fields.
    const S& operator()(Key I, Key J)
    {
        static const S zero(0);
        if (mono::degree(I) != mono::degree(J))
            return zero;
        auto [it, fresh] = memo_.try_emplace(Pair{I, J}, S(0));
        if (fresh)
            it->second = compute(I, J);
        return it->second;
    }
    S operator()(const MultiIndex& I, const MultiIndex& J) { return (*this)(mono::pack(I), mono::pack(J)); }

    size_t memo_size() const { return memo_.size(); }

private:
    struct Pair {
        Key a, b;
        bool operator==(const Pair& o) const { return a == o.a && b == o.b; }
    };
    struct PairHash {
        size_t operator()(const Pair& p) const { return std::hash<Key>()(p.a * 0x9E3779B97F4A7C15ull ^ p.b); }
    };

    // h^{ij}^k / k!
    const S& power(int i, int j, int k)
    {
        auto& v = powers_[i * n_ + j];
        if (v.empty())
            v.push_back(S(1));
        while ((int)v.size() <= k) {
            int m = (int)v.size();
            v.push_back(v.back() * hinv_[i][j] * from_rational<S>(Rat(1, m)));
        }
        return v[k];
    }

    // Sum over nonnegative integer matrices with row sums I and column sums J
    // of prod h^{ij}^{k_ij}/k_ij!, times I! J!.
    S compute(Key I, Key J)
    {
        if (powers_.empty())
            powers_.resize(n_ * n_);
        std::vector<int> rows = mono::unpack(I, n_), cols = mono::unpack(J, n_);
        S total(0);
        rec(0, 0, rows, cols, S(1), total);
        return total * from_rational<S>(mono::factorial(I, n_) * mono::factorial(J, n_));
    }
    void rec(int i, int j, std::vector<int>& rows, std::vector<int>& cols, const S& acc, S& total)
    {
        if (i == n_) {
            total += acc;
            return;
        }
        if (j == n_ - 1) {
            int k = rows[i];
            if (k > cols[j])
                return;
            S next = k ? acc * power(i, j, k) : acc;
            if (k && is_zero(next))
                return;
            cols[j] -= k;
            int keep = rows[i];
            rows[i] = 0;
            rec(i + 1, 0, rows, cols, next, total);
            rows[i] = keep;
            cols[j] += k;
            return;
        }
        int hi = std::min(rows[i], cols[j]);
        for (int k = 0; k <= hi; ++k) {
            if (k && is_zero(hinv_[i][j]))
                break;
            S next = k ? acc * power(i, j, k) : acc;
            rows[i] -= k;
            cols[j] -= k;
            rec(i, j + 1, rows, cols, next, total);
            rows[i] += k;
            cols[j] += k;
        }
    }

    std::vector<std::vector<S>> hinv_;
    int n_ = 0;
    std::unordered_map<Pair, S, PairHash> memo_;
    std::vector<std::vector<S>> powers_;
};

// Literal sum over bijections between the slots of I and the slots of J.
template <class S>
S wick_sum_bijections(const MultiIndex& I, const MultiIndex& J, const std::vector<std::vector<S>>& hinv)
{
    if ((int)I.size() != (int)hinv.size() || (int)J.size() != (int)hinv.size())
        throw std::invalid_argument("wick_sum: dimension mismatch");
    std::vector<int> a = slots(I), b = slots(J);
    if (a.size() != b.size())
        return S(0);
    std::vector<int> perm(b.size());
    for (size_t k = 0; k < perm.size(); ++k)
        perm[k] = (int)k;
    S total(0);
    do {
        S t(1);
        for (size_t k = 0; k < a.size(); ++k)
            t = t * hinv[a[k]][b[perm[k]]];
        total += t;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

template <class S>
S wick_sum(const MultiIndex& I, const MultiIndex& J, const std::vector<std::vector<S>>& hinv)
{
    if ((int)I.size() != (int)hinv.size() || (int)J.size() != (int)hinv.size())
        throw std::invalid_argument("wick_sum: dimension mismatch");
    WickTable<S> table(hinv);
    return table(I, J);
}

// Linear extension of the moments over a jet in (y, ybar).
template <class S>
S gaussian_integrate(const TruncatedJet<S>& poly, WickTable<S>& wick)
{
    int n = poly.n();
    S total(0);
    for (auto& [k, c] : poly.terms()) {
        Key I = mono::slice(k, 0, n), J = mono::slice(k, n, 2 * n);
        if (mono::degree(I) != mono::degree(J))
            continue;
        total += c * wick(I, J);
    }
    return total;
}

}  // namespace kstar
