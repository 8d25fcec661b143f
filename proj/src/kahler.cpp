#include "kstar/kahler.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "kstar/rational_json.hpp"

namespace kstar {

TruncatedJet<CDouble> PotentialModel::potential_jet_d(const std::vector<CDouble>&, int) const
{
    throw std::invalid_argument("the " + name() + " model has no floating-point evaluation");
}

namespace {

class PolynomialModel : public PotentialModel {
public:
    PolynomialModel(Polynomial phi, std::string name) : phi_(std::move(phi)), name_(std::move(name)) {}
    int dim() const override { return phi_.n(); }
    std::string name() const override { return name_; }
    TruncatedJet<CRational> potential_jet(const Point& p, int M) const override { return phi_.jet_at(p, M); }
    TruncatedJet<CDouble> potential_jet_d(const std::vector<CDouble>& p, int M) const override
    {
        return phi_.jet_at(p, M);
    }
    std::string describe() const override { return name_ + ": Phi = " + phi_.str(); }

private:
    Polynomial phi_;
    std::string name_;
};

// sign * log(1 + sign * z zbar)
class LogModel : public PotentialModel {
public:
    LogModel(int sign, std::string name) : sign_(sign), name_(std::move(name)) {}
    int dim() const override { return 1; }
    std::string name() const override { return name_; }
    TruncatedJet<CRational> potential_jet(const Point& p, int M) const override
    {
        if (p.size() != 1)
            throw std::invalid_argument(name_ + " is one-dimensional");
        CRational c = CRational(1) + CRational(sign_) * CRational(p[0].norm2());
        if (sign_ < 0 && sgn(c.re()) <= 0)
            throw std::domain_error(name_ + ": point " + p[0].str() + " lies outside the unit disc");
        Polynomial zz = Polynomial::z(1, 0) * Polynomial::zbar(1, 0);
        TruncatedJet<CRational> u = zz.jet_at(p, M);
        u.set(0, CRational(0));
        u = u.scaled(CRational(sign_) * c.inverse());
        return jet_log1p(u).scaled(CRational(sign_));
    }
    TruncatedJet<CDouble> potential_jet_d(const std::vector<CDouble>& p, int M) const override
    {
        if (p.size() != 1)
            throw std::invalid_argument(name_ + " is one-dimensional");
        double c = 1.0 + sign_ * std::norm(p[0]);
        if (c <= 0)
            throw std::domain_error(name_ + ": point lies outside the unit disc");
        Polynomial zz = Polynomial::z(1, 0) * Polynomial::zbar(1, 0);
        TruncatedJet<CDouble> u = zz.jet_at(p, M);
        u.set(0, CDouble(0));
        u = u.scaled(CDouble(sign_ / c));
        return jet_log1p(u).scaled(CDouble(sign_));
    }

private:
    int sign_;
    std::string name_;
};

class TableModel : public PotentialModel {
public:
    TableModel(int n, Point point, int order, std::map<Key, CRational> phi)
        : n_(n), point_(std::move(point)), order_(order), phi_(std::move(phi))
    {
    }
    int dim() const override { return n_; }
    std::string name() const override { return "jet-table"; }
    bool closed_form() const override { return false; }
    TruncatedJet<CRational> potential_jet(const Point& p, int M) const override
    {
        if (!(p == point_))
            throw std::invalid_argument("jet-table model is only defined at its base point " + point_str(point_) +
                                        "; use a closed-form model for shifted points");
        if (M > order_)
            throw std::out_of_range("jet-table model has order " + std::to_string(order_) + ", " +
                                    std::to_string(M) + " requested");
        TruncatedJet<CRational> j(n_, M);
        for (auto& [k, v] : phi_)
            j.set(k, v * CRational(Rat(1) / mono::factorial(k, 2 * n_)));
        return j;
    }

private:
    int n_;
    Point point_;
    int order_;
    std::map<Key, CRational> phi_;
};

template <class C>
using SparseT = std::map<Key, C>;

template <class C>
SparseT<C> mul_pruned(const SparseT<C>& a, const SparseT<C>& b, const JetCaps& caps, int n)
{
    SparseT<C> r;
    for (auto& [ka, ca] : a) {
        int room = caps.total - mono::degree(ka);
        if (room < 0)
            break;
        for (auto& [kb, cb] : b) {
            if (mono::degree(kb) > room)
                break;
            Key k = ka + kb;
            if (!caps.admits(k, n))
                continue;
            auto& slot = r[k];
            slot += ca * cb;
        }
    }
    for (auto it = r.begin(); it != r.end();)
        it = is_zero(it->second) ? r.erase(it) : std::next(it);
    return r;
}

// log(u) - log(u(0)) through the Euler-operator recurrence d L_d = d u_d - sum_j j L_j u_{d-j}.
template <class C>
SparseT<C> log_normalized(const SparseT<C>& u_in, const JetCaps& caps, int n)
{
    C u0 = u_in.count(0) ? u_in.at(0) : C(0);
    if (is_zero(u0))
        throw std::domain_error("log of a jet with zero constant term");
    C inv0 = inverse(u0);
    std::vector<SparseT<C>> u(caps.total + 1), L(caps.total + 1);
    for (auto& [k, c] : u_in)
        if (mono::degree(k) <= caps.total)
            u[mono::degree(k)][k] = c * inv0;
    for (int d = 1; d <= caps.total; ++d) {
        SparseT<C> acc;
        for (auto& [k, c] : u[d])
            acc[k] += c * from_rational<C>(Rat(d));
        for (int j = 1; j < d; ++j) {
            SparseT<C> prod = mul_pruned(L[j], u[d - j], caps, n);
            for (auto& [k, c] : prod)
                acc[k] -= c * from_rational<C>(Rat(j));
        }
        for (auto& [k, c] : acc)
            if (!is_zero(c))
                L[d][k] = c * from_rational<C>(Rat(1, d));
    }
    SparseT<C> out;
    for (auto& layer : L)
        for (auto& [k, c] : layer)
            out[k] = c;
    return out;
}

template <class C>
SparseT<C> det_jet(const std::vector<std::vector<SparseT<C>>>& M, const JetCaps& caps, int n)
{
    int m = (int)M.size();
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    SparseT<C> total;
    do {
        int inv = 0;
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b)
                if (perm[a] > perm[b])
                    ++inv;
        SparseT<C> prod{{Key(0), C(inv % 2 ? -1 : 1)}};
        for (int a = 0; a < m && !prod.empty(); ++a)
            prod = mul_pruned(prod, M[a][perm[a]], caps, n);
        for (auto& [k, c] : prod)
            total[k] += c;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

}  // namespace

ModelPtr make_flat(int n)
{
    Polynomial phi(n);
    for (int i = 0; i < n; ++i)
        phi += Polynomial::z(n, i) * Polynomial::zbar(n, i);
    return std::make_shared<PolynomialModel>(phi, "flat");
}

ModelPtr make_fubini_study()
{
    return std::make_shared<LogModel>(1, "fubini-study");
}

ModelPtr make_hyperbolic()
{
    return std::make_shared<LogModel>(-1, "hyperbolic");
}

ModelPtr make_perturbation(const Polynomial& extra)
{
    if (!(extra.conj() == extra))
        throw std::invalid_argument("perturbation is not real: coefficients must satisfy c_{IJ} = conj(c_{JI})");
    int n = extra.n();
    Polynomial phi = extra;
    for (int i = 0; i < n; ++i)
        phi += Polynomial::z(n, i) * Polynomial::zbar(n, i);
    return std::make_shared<PolynomialModel>(phi, "perturbation");
}

ModelPtr make_jet_table(int n, const Point& point, int order, const std::map<Key, CRational>& phi)
{
    for (auto& [k, v] : phi) {
        if (mono::partial_degree(k, 0, n) == 0 || mono::partial_degree(k, n, 2 * n) == 0)
            throw std::invalid_argument("jet table entry " + mono::str(k, 2 * n) + " is not mixed");
        if (mono::degree(k) > order)
            throw std::invalid_argument("jet table entry " + mono::str(k, 2 * n) + " exceeds declared order");
        std::vector<int> e = mono::unpack(k, 2 * n), s(2 * n);
        for (int i = 0; i < n; ++i) {
            s[i] = e[n + i];
            s[n + i] = e[i];
        }
        auto it = phi.find(mono::pack(s));
        CRational mirror = it == phi.end() ? CRational(0) : it->second;
        if (mirror != v.conj())
            throw std::invalid_argument("jet table violates Hermitian symmetry at " + mono::str(k, 2 * n));
    }
    return std::make_shared<TableModel>(n, point, order, phi);
}

namespace {

template <class C>
JetContext<C> context_from_phi(int n, const JetCaps& phi_caps, std::map<Key, C> phi, const std::string& where)
{
    JetContext<C> ctx;
    ctx.n = n;
    ctx.phi_caps = phi_caps;
    ctx.psi_caps = {phi_caps.total - 2, phi_caps.hol - 1, phi_caps.antihol - 1};
    if (phi_caps.total < 2)
        throw std::invalid_argument("context order must be at least 2");
    for (auto it = phi.begin(); it != phi.end();) {
        bool mixed = mono::partial_degree(it->first, 0, n) > 0 && mono::partial_degree(it->first, n, 2 * n) > 0;
        it = (mixed && phi_caps.admits(it->first, n) && !is_zero(it->second)) ? std::next(it) : phi.erase(it);
    }
    ctx.phi = std::move(phi);
    ctx.H.assign(n, std::vector<C>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            ctx.H[i][j] = ctx.phi_at(unit_index(n, i), unit_index(n, j));
    try {
        ctx.Hinv = inverse_metric(ctx.H);
    } catch (const std::domain_error&) {
        throw std::domain_error("metric H is singular at " + where);
    }

    // Psi from log det H(z + y) - log det H(z).
    const JetCaps& pc = ctx.psi_caps;
    std::vector<std::vector<SparseT<C>>> Hj(n, std::vector<SparseT<C>>(n));
    for (auto& [k, v] : ctx.phi) {
        for (int a = 0; a < n; ++a) {
            if (mono::get(k, a) == 0)
                continue;
            for (int b = 0; b < n; ++b) {
                if (mono::get(k, n + b) == 0)
                    continue;
                Key s = k - mono::unit(a) - mono::unit(n + b);
                if (!pc.admits(s, n))
                    continue;
                Hj[a][b][s] = v * from_rational<C>(Rat(1) / mono::factorial(s, 2 * n));
            }
        }
    }
    SparseT<C> L = log_normalized(det_jet(Hj, pc, n), pc, n);
    for (auto& [k, c] : L)
        if (k != 0 && !is_zero(c))
            ctx.psi[k] = c * from_rational<C>(mono::factorial(k, 2 * n));

    ctx.A = C(0);
    if (pc.total >= 2) {
        C a(0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a += ctx.Hinv[i][j] * ctx.psi_at(unit_index(n, i), unit_index(n, j));
        ctx.A = a * from_rational<C>(Rat(1, 2));
    }
    return ctx;
}

}  // namespace

Context build_context_from_phi(int n, const Point& point, const JetCaps& phi_caps, std::map<Key, CRational> phi,
                               const std::string& name)
{
    Context ctx = context_from_phi(n, phi_caps, std::move(phi), "point " + point_str(point) + " (" + name + ")");
    ctx.point = point;
    ctx.model = name;
    std::string failure = logdet_identity_failure(ctx);
    if (!failure.empty())
        throw std::logic_error("log-det identity check failed: " + failure);
    return ctx;
}

ContextD build_context_d(const PotentialModel& model, const std::vector<CDouble>& point, int M, int extra_w,
                         int extra_wbar)
{
    if ((int)point.size() != model.dim())
        throw std::invalid_argument("point dimension does not match model dimension");
    int total = M + std::max(extra_w, extra_wbar);
    JetCaps caps{total, M - 1 + extra_w, M - 1 + extra_wbar};
    TruncatedJet<CDouble> jet = model.potential_jet_d(point, total);
    std::map<Key, CDouble> phi;
    for (auto& [k, c] : jet.terms())
        phi[k] = c * mono::factorial(k, 2 * model.dim()).get_d();
    ContextD ctx = context_from_phi(model.dim(), caps, std::move(phi), "a floating point (" + model.name() + ")");
    ctx.model = model.name();
    return ctx;
}

Context build_context(const PotentialModel& model, const Point& point, int M, int extra_w, int extra_wbar)
{
    if ((int)point.size() != model.dim())
        throw std::invalid_argument("point dimension " + std::to_string(point.size()) + " does not match model dimension " +
                                    std::to_string(model.dim()));
    int total = M + std::max(extra_w, extra_wbar);
    JetCaps caps{total, M - 1 + extra_w, M - 1 + extra_wbar};
    TruncatedJet<CRational> jet = model.potential_jet(point, total);
    std::map<Key, CRational> phi;
    for (auto& [k, c] : jet.terms())
        phi[k] = c * CRational(mono::factorial(k, 2 * model.dim()));
    return build_context_from_phi(model.dim(), point, caps, std::move(phi), model.name());
}

std::string logdet_identity_failure(const Context& ctx)
{
    int n = ctx.n;
    std::ostringstream os;
    if (ctx.psi_caps.total >= 1) {
        for (int i = 0; i < n; ++i) {
            CRational rhs(0);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    MultiIndex I = unit_index(n, i);
                    I[j] += 1;
                    rhs += ctx.Hinv[j][k] * ctx.phi_at(I, unit_index(n, k));
                }
            if (ctx.psi_at(unit_index(n, i), MultiIndex(n, 0)) != rhs) {
                os << "Psi_(e" << i << ")() = " << ctx.psi_at(unit_index(n, i), MultiIndex(n, 0)).str() << " but tr(H^-1 d H) = "
                   << rhs.str();
                return os.str();
            }
        }
    }
    if (ctx.psi_caps.total >= 2) {
        // N = H^{-1} as an ordinary matrix inverse.
        auto N = [&](int a, int b) { return ctx.Hinv[b][a]; };
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                CRational t1(0), t2(0);
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        MultiIndex I = unit_index(n, b), J = unit_index(n, a);
                        I[i] += 1;
                        J[j] += 1;
                        t1 += N(a, b) * ctx.phi_at(I, J);
                    }
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int c = 0; c < n; ++c)
                            for (int d = 0; d < n; ++d) {
                                MultiIndex Xb = unit_index(n, b), Yj = unit_index(n, a);
                                Xb[i] += 1;
                                Yj[j] += 1;
                                t2 += N(a, b) * ctx.phi_at(Xb, unit_index(n, c)) * N(c, d) *
                                      ctx.phi_at(unit_index(n, d), Yj);
                            }
                CRational lhs = ctx.psi_at(unit_index(n, i), unit_index(n, j));
                if (lhs != t1 - t2) {
                    os << "Psi_(e" << i << ")(e" << j << ") = " << lhs.str() << " but trace formula gives "
                       << (t1 - t2).str();
                    return os.str();
                }
            }
    }
    for (auto& [k, v] : ctx.psi) {
        std::vector<int> e = mono::unpack(k, 2 * n), s(2 * n);
        for (int i = 0; i < n; ++i) {
            s[i] = e[n + i];
            s[n + i] = e[i];
        }
        Key m = mono::pack(s);
        if (!ctx.psi_caps.admits(m, n))
            continue;
        if (ctx.psi_at(m) != v.conj()) {
            os << "Psi table not Hermitian at " << mono::str(k, 2 * n);
            return os.str();
        }
    }
    return "";
}

namespace {

std::vector<Key> shift_keys(int n, int budget, bool keep_w, bool keep_wbar)
{
    std::vector<Key> out;
    for (Key s : mono::all_up_to(2 * n, budget)) {
        if (!keep_w && mono::partial_degree(s, 0, n) > 0)
            continue;
        if (!keep_wbar && mono::partial_degree(s, n, 2 * n) > 0)
            continue;
        out.push_back(s);
    }
    return out;
}

template <class C>
JetContext<BasicJetScalar<C>> shift_generic(const JetContext<C>& deep, int M, int budget, bool keep_w, bool keep_wbar)
{
    using J = BasicJetScalar<C>;
    int n = deep.n;
    JetContext<J> ctx;
    ctx.n = n;
    ctx.point = deep.point;
    ctx.model = deep.model;
    ctx.phi_caps = {M, M - 1, M - 1};
    ctx.psi_caps = {M - 2, M - 2, M - 2};
    std::vector<Key> shifts = shift_keys(n, budget, keep_w, keep_wbar);
    std::vector<Rat> inv_fact;
    for (Key s : shifts)
        inv_fact.push_back(Rat(1) / mono::factorial(s, 2 * n));
    auto translate = [&](Key k, bool is_phi) {
        J v(n, budget);
        for (size_t q = 0; q < shifts.size(); ++q) {
            C c = is_phi ? deep.phi_at(k + shifts[q]) : deep.psi_at(k + shifts[q]);
            if (!is_zero(c))
                v.add_term(shifts[q], c * from_rational<C>(inv_fact[q]));
        }
        return v;
    };
    for (Key k : mono::all_up_to(2 * n, M)) {
        bool mixed = mono::partial_degree(k, 0, n) > 0 && mono::partial_degree(k, n, 2 * n) > 0;
        if (mixed) {
            J v = translate(k, true);
            if (!v.is_zero())
                ctx.phi[k] = v;
        }
        if (k != 0 && mono::degree(k) <= M - 2) {
            J v = translate(k, false);
            if (!v.is_zero())
                ctx.psi[k] = v;
        }
    }
    ctx.H.assign(n, std::vector<J>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            ctx.H[i][j] = ctx.phi_at(unit_index(n, i), unit_index(n, j));
    ctx.Hinv = inverse_metric(ctx.H);
    J a(0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a += ctx.Hinv[i][j] * ctx.psi_at(unit_index(n, i), unit_index(n, j));
    ctx.A = a * from_rational<J>(Rat(1, 2));
    return ctx;
}

}  // namespace

JetModeContext shift_context(const Context& deep, int M, int budget, bool keep_w, bool keep_wbar)
{
    return shift_generic(deep, M, budget, keep_w, keep_wbar);
}

JetModeContextD shift_context(const ContextD& deep, int M, int budget, bool keep_w, bool keep_wbar)
{
    return shift_generic(deep, M, budget, keep_w, keep_wbar);
}

JetModeContext build_jet_context(const PotentialModel& model, const Point& point, int M, int budget, bool keep_w,
                                 bool keep_wbar)
{
    if (!model.closed_form())
        throw std::invalid_argument("jet-mode evaluation needs jets at shifted points; the " + model.name() +
                                    " model only provides them at its base point (use a closed-form model)");
    Context deep = build_context(model, point, M, keep_w ? budget : 0, keep_wbar ? budget : 0);
    return shift_context(deep, M, budget, keep_w, keep_wbar);
}

JetModeContextD build_jet_context_d(const PotentialModel& model, const std::vector<CDouble>& point, int M, int budget,
                                    bool keep_w, bool keep_wbar)
{
    ContextD deep = build_context_d(model, point, M, keep_w ? budget : 0, keep_wbar ? budget : 0);
    return shift_context(deep, M, budget, keep_w, keep_wbar);
}

TruncatedJet<JetScalar> shift_function_jet(const TruncatedJet<CRational>& deep, int M, int budget, bool keep_w,
                                           bool keep_wbar)
{
    int n = deep.n();
    if (deep.cutoff() < M + budget)
        throw std::out_of_range("function jet of order " + std::to_string(deep.cutoff()) + " too shallow (needs " +
                                std::to_string(M + budget) + ")");
    std::vector<Key> shifts = shift_keys(n, budget, keep_w, keep_wbar);
    TruncatedJet<JetScalar> out(n, M);
    for (Key k : mono::all_up_to(2 * n, M)) {
        JetScalar v(n, budget);
        for (Key s : shifts) {
            CRational c = deep.coeff(k + s);
            if (c.is_zero())
                continue;
            Rat binom(1);
            for (int f = 0; f < 2 * n; ++f) {
                int a = mono::get(k, f), b = mono::get(s, f);
                binom *= factorial(a + b) / (factorial(a) * factorial(b));
            }
            v.add_term(s, c * CRational(binom));
        }
        if (!v.is_zero())
            out.set(k, v);
    }
    return out;
}

TruncatedJet<CRational> compose_holomorphic(const TruncatedJet<CRational>& F, const TruncatedJet<CRational>& delta)
{
    if (F.n() != 1 || delta.n() != 1)
        throw std::invalid_argument("compose_holomorphic is one-dimensional");
    if (!delta.constant_term().is_zero() || !delta.antiholomorphic_part().truncated(1).constant_term().is_zero())
        throw std::invalid_argument("coordinate jet must have no constant term");
    for (auto& [k, c] : delta.terms())
        if (mono::get(k, 1) > 0)
            throw std::invalid_argument("coordinate change must be holomorphic");
    int M = F.cutoff();
    if (delta.cutoff() < M)
        throw std::out_of_range("coordinate jet too shallow for composition");
    TruncatedJet<CRational> d = delta.truncated(M);
    TruncatedJet<CRational> dbar = d.conjugate();
    std::vector<TruncatedJet<CRational>> pw{TruncatedJet<CRational>::constant(1, M, CRational(1))};
    std::vector<TruncatedJet<CRational>> pwb{pw[0]};
    for (int a = 1; a <= M; ++a) {
        pw.push_back(lenient_mul(pw.back(), d));
        pwb.push_back(lenient_mul(pwb.back(), dbar));
    }
    TruncatedJet<CRational> out(1, M);
    for (auto& [k, c] : F.terms())
        out += lenient_mul(pw[mono::get(k, 0)], pwb[mono::get(k, 1)]).scaled(c);
    return out;
}

Transported transport_jets(const TruncatedJet<CRational>& delta, const Point& source_point, const Context& ctx,
                           const std::vector<TruncatedJet<CRational>>& fjets)
{
    if (ctx.n != 1)
        throw std::invalid_argument("transport_jets is implemented for n = 1");
    if (delta.coeff(mono::unit(0)).is_zero())
        throw std::domain_error("coordinate change has vanishing derivative at the base point");
    int M = ctx.phi_caps.total;
    TruncatedJet<CRational> F(1, M);
    for (auto& [k, v] : ctx.phi)
        F.set(k, v * CRational(Rat(1) / mono::factorial(k, 2)));
    TruncatedJet<CRational> G = compose_holomorphic(F, delta);
    std::map<Key, CRational> phi;
    for (auto& [k, c] : G.terms())
        phi[k] = c * CRational(mono::factorial(k, 2));
    Transported out;
    out.ctx = build_context_from_phi(1, source_point, {M, M - 1, M - 1}, std::move(phi), ctx.model + "(pulled back)");
    for (auto& f : fjets)
        out.fjets.push_back(compose_holomorphic(f, delta));
    return out;
}

ModelPtr load_jet_table(const std::string& json_text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("jet table is not valid JSON: ") + e.what());
    }
    for (const char* field : {"n", "point", "order", "phi"})
        if (!j.contains(field))
            throw std::invalid_argument(std::string("jet table lacks field '") + field + "'");
    int n = j["n"].get<int>();
    int order = j["order"].get<int>();
    if (n < 1 || n > 3)
        throw std::invalid_argument("jet table dimension must be 1..3");
    Point point;
    const auto& jp = j["point"];
    if (jp.size() == 2 && !jp[0].is_array() && n == 1) {
        point.emplace_back(json_rational(jp[0]), json_rational(jp[1]));
    } else {
        for (const auto& c : jp) {
            if (!c.is_array() || c.size() != 2)
                throw std::invalid_argument("jet table point must be [re,im] or a list of [re,im]");
            point.emplace_back(json_rational(c[0]), json_rational(c[1]));
        }
    }
    if ((int)point.size() != n)
        throw std::invalid_argument("jet table point dimension mismatch");
    std::map<Key, CRational> phi;
    for (const auto& e : j["phi"]) {
        MultiIndex I = e.at("I").get<MultiIndex>();
        MultiIndex J = e.at("J").get<MultiIndex>();
        if ((int)I.size() != n || (int)J.size() != n)
            throw std::invalid_argument("jet table multi-index has wrong length");
        std::vector<int> ev(I);
        ev.insert(ev.end(), J.begin(), J.end());
        Key k = mono::pack(ev);
        if (phi.count(k))
            throw std::invalid_argument("duplicate jet table entry " + mono::str(k, 2 * n));
        phi[k] = json_crational(e);
    }
    return make_jet_table(n, point, order, phi);
}

std::string dump_jet_table(const PotentialModel& model, const Point& point, int order)
{
    int n = model.dim();
    nlohmann::ordered_json j;
    j["n"] = n;
    if (n == 1)
        j["point"] = {rational_json(point[0].re()), rational_json(point[0].im())};
    else
        for (auto& c : point)
            j["point"].push_back({rational_json(c.re()), rational_json(c.im())});
    j["order"] = order;
    j["phi"] = nlohmann::ordered_json::array();
    TruncatedJet<CRational> jet = model.potential_jet(point, order);
    for (auto& [k, c] : jet.terms()) {
        if (mono::partial_degree(k, 0, n) == 0 || mono::partial_degree(k, n, 2 * n) == 0)
            continue;
        std::vector<int> e = mono::unpack(k, 2 * n);
        nlohmann::ordered_json entry;
        entry["I"] = std::vector<int>(e.begin(), e.begin() + n);
        entry["J"] = std::vector<int>(e.begin() + n, e.end());
        put_crational(entry, c * CRational(mono::factorial(k, 2 * n)));
        j["phi"].push_back(entry);
    }
    return j.dump();
}

}  // namespace kstar
