#pragma once

#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "kstar/jet.hpp"
#include "kstar/kahler.hpp"
#include "kstar/wick.hpp"

namespace kstar {

// Bidifferential operator sum_k hbar^k sum C_k[J,I] dbar^J f1 d^I f2.
// Keys over n fields; J acts on f1, I on f2.
template <class S>
struct OperatorSeries {
    int n = 0;
    int K = 0;
    std::vector<std::map<std::pair<Key, Key>, S>> C;

    OperatorSeries() = default;
    OperatorSeries(int n_, int K_) : n(n_), K(K_), C(K_ + 1) {}

    S at(int k, Key J, Key I) const
    {
        auto it = C.at(k).find({J, I});
        return it == C.at(k).end() ? S(0) : it->second;
    }
    S at(int k, const MultiIndex& J, const MultiIndex& I) const { return at(k, mono::pack(J), mono::pack(I)); }
    void add(int k, Key J, Key I, const S& v)
    {
        if (is_zero(v))
            return;
        auto [it, fresh] = C.at(k).try_emplace({J, I}, v);
        if (!fresh) {
            it->second += v;
            if (is_zero(it->second))
                C.at(k).erase(it);
        }
    }
    friend bool operator==(const OperatorSeries& a, const OperatorSeries& b)
    {
        return a.n == b.n && a.K == b.K && a.C == b.C;
    }
};

// Value of sum C_k[J,I] dbar^J f1 d^I f2 at the base point.
template <class S>
HbarSeries<S> apply_operator(const OperatorSeries<S>& op, const TruncatedJet<S>& f1, const TruncatedJet<S>& f2)
{
    int n = op.n;
    HbarSeries<S> out(op.K);
    for (int k = 0; k <= op.K; ++k) {
        S acc(0);
        for (auto& [ji, c] : op.C[k]) {
            Key J = ji.first, I = ji.second;
            if (mono::degree(J) > f1.cutoff() || mono::degree(I) > f2.cutoff())
                throw std::out_of_range("function jets too shallow for hbar^" + std::to_string(k) + " (need order " +
                                        std::to_string(std::max(mono::degree(J), mono::degree(I))) + ")");
            S a = f1.coeff(mono::concat(0, n, J));
            if (is_zero(a))
                continue;
            S b = f2.coeff(mono::concat(I, n, 0));
            if (is_zero(b))
                continue;
            acc += c * a * b * from_rational<S>(mono::factorial(J, n) * mono::factorial(I, n));
        }
        out[k] = acc;
    }
    return out;
}

// The formal Laplace expansion: exp(V) graded by eps, Gaussian moments by Wick.
template <class S>
class LaplaceEngine {
public:
    struct Term {
        Key y;     // holomorphic exponent, n fields
        Key ybar;  // antiholomorphic exponent, n fields
        S c;
    };

    // budget >= 0 enables weighted truncation of jet-valued coefficients:
    // the eps^p coefficient only needs w-degree budget - p.
    LaplaceEngine(const JetContext<S>& ctx, int K, int budget = -1)
        : n_(ctx.n), K_(K), budget_(budget), wick_(ctx.Hinv)
    {
        if (K < 0)
            throw std::invalid_argument("negative hbar order");
        build_exp(ctx);
    }

    int n() const { return n_; }
    int order() const { return K_; }
    const std::vector<std::vector<Term>>& exp_potential() const { return E_; }
    WickTable<S>& wick() { return wick_; }

    HbarSeries<S> bullet(const TruncatedJet<S>& f1, const TruncatedJet<S>& f2)
    {
        int P = 2 * K_;
        check_jet(f1);
        check_jet(f2);
        std::vector<std::pair<Key, S>> a, b;  // f1 antiholomorphic, f2 holomorphic parts
        for (auto& [k, c] : f1.terms())
            if (mono::partial_degree(k, 0, n_) == 0 && mono::degree(k) <= P)
                a.emplace_back(mono::slice(k, n_, 2 * n_), c);
        for (auto& [k, c] : f2.terms())
            if (mono::partial_degree(k, n_, 2 * n_) == 0 && mono::degree(k) <= P)
                b.emplace_back(mono::slice(k, 0, n_), c);
        HbarSeries<S> out(K_);
        for (auto& [J, ca] : a)
            for (auto& [I, cb] : b) {
                int d = mono::degree(J) + mono::degree(I);
                if (d > P)
                    continue;
                S ab = ca * cb;
                for (int p = 0; p + d <= P; ++p) {
                    S acc(0);
                    for (const Term& t : E_[p]) {
                        if (mono::degree(t.y) + mono::degree(I) != mono::degree(t.ybar) + mono::degree(J))
                            continue;
                        acc += t.c * wick_(t.y + I, t.ybar + J);
                    }
                    S v = ab * acc;
                    if (budget_ >= 0)
                        v = truncate(v, budget_ - (p + d));
                    out.eps_coeff(p + d) += v;
                }
            }
        out.assert_even();
        return out;
    }

    // C_k[J,I] for |J|,|I| <= max_deriv (default 2K).
    OperatorSeries<S> operator_series(int max_deriv = -1)
    {
        if (max_deriv < 0)
            max_deriv = 2 * K_;
        OperatorSeries<S> op(n_, K_);
        const auto& idx = mono::all_up_to(n_, std::min(max_deriv, 2 * K_));
        for (int k = 0; k <= K_; ++k) {
            for (Key J : idx)
                for (Key I : idx) {
                    int d = mono::degree(J) + mono::degree(I);
                    if (d > 2 * k)
                        continue;
                    int p = 2 * k - d;
                    int cut = budget_ >= 0 ? budget_ - 2 * k : std::numeric_limits<int>::max();
                    S acc(0);
                    for (const Term& t : E_[p]) {
                        if (mono::degree(t.y) + mono::degree(I) != mono::degree(t.ybar) + mono::degree(J))
                            continue;
                        acc += multiply_truncated(t.c, wick_(t.y + I, t.ybar + J), cut);
                    }
                    if (is_zero(acc))
                        continue;
                    acc = acc * from_rational<S>(Rat(1) / (mono::factorial(J, n_) * mono::factorial(I, n_)));
                    if (budget_ >= 0)
                        acc = truncate(acc, budget_ - 2 * k);
                    op.add(k, J, I, acc);
                }
        }
        return op;
    }

private:
    void check_jet(const TruncatedJet<S>& f) const
    {
        if (f.n() != n_)
            throw std::invalid_argument("function jet dimension mismatch");
        if (f.cutoff() < 2 * K_)
            throw std::out_of_range("function jet of order " + std::to_string(f.cutoff()) + " too shallow for hbar^" +
                                    std::to_string(K_) + " (needs order " + std::to_string(2 * K_) + ")");
    }

    void build_exp(const JetContext<S>& ctx)
    {
        int P = 2 * K_;
        EpsJet<S> V = interaction_potential(ctx, K_, budget_);
        std::vector<std::vector<Term>> Vt(P + 1);
        for (int q = 1; q <= P; ++q)
            for (auto& [k, c] : V.part[q].terms())
                Vt[q].push_back({mono::slice(k, 0, n_), mono::slice(k, n_, 2 * n_), c});
        E_.assign(P + 1, {});
        E_[0].push_back({Key(0), Key(0), S(1)});
        for (int p = 1; p <= P; ++p) {
            std::unordered_map<Key, std::pair<Key, S>> acc;  // key: packed y|ybar over 2n fields
            int cut = budget_ >= 0 ? budget_ - p : std::numeric_limits<int>::max();
            for (int q = 1; q <= p; ++q) {
                S w = from_rational<S>(ratio(q, p));
                for (const Term& v : Vt[q]) {
                    S wv = w * v.c;
                    for (const Term& e : E_[p - q]) {
                        Key y = v.y + e.y, yb = v.ybar + e.ybar;
                        int imb = std::abs(mono::degree(y) - mono::degree(yb));
                        if (p + imb > P)
                            continue;
                        Key full = mono::concat(y, n_, yb);
                        auto [it, fresh] = acc.try_emplace(full, yb, S(0));
                        it->second.second += multiply_truncated(wv, e.c, cut);
                    }
                }
            }
            std::vector<std::pair<Key, std::pair<Key, S>>> sorted(acc.begin(), acc.end());
            std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
            for (auto& [full, ys] : sorted) {
                S c = budget_ >= 0 ? truncate(ys.second, budget_ - p) : ys.second;
                if (is_zero(c))
                    continue;
                E_[p].push_back({mono::slice(full, 0, n_), ys.first, c});
            }
        }
    }

    int n_;
    int K_;
    int budget_;
    WickTable<S> wick_;
    std::vector<std::vector<Term>> E_;
};

template <class S>
HbarSeries<S> bullet_oracle(const JetContext<S>& ctx, const TruncatedJet<S>& f1, const TruncatedJet<S>& f2, int K)
{
    LaplaceEngine<S> eng(ctx, K);
    return eng.bullet(f1, f2);
}

template <class S>
OperatorSeries<S> bullet_operator_oracle(const JetContext<S>& ctx, int K, int max_deriv = -1)
{
    LaplaceEngine<S> eng(ctx, K);
    return eng.operator_series(max_deriv);
}

// D: the hbar^2 coefficient of 1 . 1 (vacuum sector).
CRational vacuum_D(const Context& ctx);

struct SeriesHeader {
    std::string model;
    Point point;
    int K = 0;
    std::string engine;
};

std::string operator_series_json(const OperatorSeries<CRational>& op, const SeriesHeader& header);
OperatorSeries<CRational> operator_series_from_json(const std::string& text, SeriesHeader* header = nullptr);

}  // namespace kstar
