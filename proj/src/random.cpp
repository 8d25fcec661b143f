#include "kstar/random.hpp"

#include <stdexcept>

namespace kstar {

namespace {

Key swap_halves(Key k, int n)
{
    std::vector<int> e = mono::unpack(k, 2 * n), s(2 * n);
    for (int i = 0; i < n; ++i) {
        s[i] = e[n + i];
        s[n + i] = e[i];
    }
    return mono::pack(s);
}

int uniform(Rng& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

bool positive_definite(const std::vector<std::vector<CRational>>& H)
{
    int n = (int)H.size();
    for (int m = 1; m <= n; ++m) {
        std::vector<std::vector<CRational>> a(m, std::vector<CRational>(m));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                a[i][j] = H[i][j];
        CRational det(1);
        for (int c = 0; c < m; ++c) {
            if (a[c][c].is_zero())
                return false;
            det *= a[c][c];
            for (int r = c + 1; r < m; ++r) {
                CRational f = a[r][c] / a[c][c];
                for (int j = c; j < m; ++j)
                    a[r][j] -= f * a[c][j];
            }
        }
        if (sgn(det.re()) <= 0)
            return false;
    }
    return true;
}

Rat random_rational(Rng& rng, const RandomSpec& spec)
{
    if (spec.max_abs < 1 || spec.max_den < 1)
        throw std::invalid_argument("random entry bounds must be positive");
    int num = uniform(rng, -spec.max_abs, spec.max_abs);
    return ratio(num, uniform(rng, 1, spec.max_den));
}

Rat random_positive_rational(Rng& rng, const RandomSpec& spec)
{
    int num = uniform(rng, 1, std::max(spec.max_abs, 1));
    return ratio(num, uniform(rng, 1, std::max(spec.max_den, 1)));
}

CRational random_complex(Rng& rng, const RandomSpec& spec)
{
    Rat re = random_rational(rng, spec);
    return CRational(re, random_rational(rng, spec));
}

std::map<Key, CRational> random_phi_table(int n, int M, Rng& rng, const RandomSpec& spec)
{
    std::map<Key, CRational> phi;
    for (Key k : mono::all_up_to(2 * n, M)) {
        int a = mono::partial_degree(k, 0, n), b = mono::partial_degree(k, n, 2 * n);
        if (a == 0 || b == 0 || (a == 1 && b == 1))
            continue;
        Key s = swap_halves(k, n);
        if (s < k)
            continue;
        if (s == k) {
            phi[k] = CRational(random_rational(rng, spec));
        } else {
            CRational c = random_complex(rng, spec);
            phi[k] = c;
            phi[s] = c.conj();
        }
    }
    for (;;) {
        std::vector<std::vector<CRational>> H(n, std::vector<CRational>(n));
        for (int i = 0; i < n; ++i) {
            H[i][i] = CRational(random_positive_rational(rng, spec));
            for (int j = 0; j < i; ++j) {
                H[i][j] = random_complex(rng, spec);
                H[j][i] = H[i][j].conj();
            }
        }
        bool positive = positive_definite(H);
        if (!positive)
            continue;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::vector<int> e(2 * n, 0);
                e[i] += 1;
                e[n + j] += 1;
                phi[mono::pack(e)] = H[i][j];
            }
        return phi;
    }
}

Context random_context(int n, int M, Rng& rng, const RandomSpec& spec)
{
    return build_context_from_phi(n, Point(n, CRational(0)), JetCaps{M, M - 1, M - 1}, random_phi_table(n, M, rng, spec),
                                  "random");
}

Polynomial random_polynomial(int n, int lo, int hi, Rng& rng, const RandomSpec& spec)
{
    Polynomial p(n);
    for (Key k : mono::all_up_to(2 * n, hi))
        if (mono::degree(k) >= lo)
            p.add_term(k, random_complex(rng, spec));
    return p;
}

Polynomial random_holomorphic(int n, int hi, Rng& rng, const RandomSpec& spec)
{
    Polynomial p = random_polynomial(n, 0, hi, rng, spec), out(n);
    for (auto& [k, c] : p.terms())
        if (mono::partial_degree(k, n, 2 * n) == 0)
            out.add_term(k, c);
    return out;
}

ModelPtr random_perturbation(int n, int hi, Rng& rng, const RandomSpec& spec)
{
    Polynomial extra(n);
    for (Key k : mono::all_up_to(2 * n, hi)) {
        int a = mono::partial_degree(k, 0, n), b = mono::partial_degree(k, n, 2 * n);
        Key s = swap_halves(k, n);
        if (a == 0 || b == 0 || a + b < 3 || s < k)
            continue;
        if (s == k) {
            extra.add_term(k, CRational(random_rational(rng, spec)));
        } else {
            CRational c = random_complex(rng, spec);
            extra.add_term(k, c);
            extra.add_term(s, c.conj());
        }
    }
    return make_perturbation(extra);
}

Point random_point(int n, Rng& rng)
{
    Point p;
    for (int i = 0; i < n; ++i) {
        int d = uniform(rng, 2, 3);
        Rat re = ratio(uniform(rng, -1, 1), d);
        p.push_back(CRational(re, ratio(uniform(rng, -1, 1), d)));
    }
    return p;
}

RandomCase random_case(int n, Rng& rng, const RandomSpec& spec, int degree)
{
    RandomCase c;
    c.model = random_perturbation(n, degree, rng, spec);
    for (;;) {
        c.point = random_point(n, rng);
        TruncatedJet<CRational> jet = c.model->potential_jet(c.point, 2);
        std::vector<std::vector<CRational>> H(n, std::vector<CRational>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::vector<int> e(2 * n, 0);
                e[i] += 1;
                e[n + j] += 1;
                H[i][j] = jet.coeff(mono::pack(e));
            }
        if (positive_definite(H))
            return c;
    }
}

}  // namespace kstar
