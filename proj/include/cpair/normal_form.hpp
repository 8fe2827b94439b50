#pragma once

#include "cpair/cyclotomic.hpp"
#include "cpair/scalar_expr.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>

namespace cpair {

// ---------------------------------------------------------------------------
// Canonical form of a trig-polynomial.
//
// Every expression in the class expands into a finite sum
//
//      a * pi^m * x^P * zeta_N^j * exp(i q . x)
//
// with a rational, P a coordinate multi-index, q a rational frequency vector
// and zeta_N = exp(2 pi i / N). Rational-pi phase offsets inside sin/cos are
// roots of unity, so they land in the coefficient as powers of zeta_N. The
// functions x^P exp(i q . x) for distinct (P, q) are linearly independent,
// hence the expression is identically zero iff every (P, q)-group coefficient
// vanishes in Q(zeta_N), i.e. reduces to zero modulo the N-th cyclotomic
// polynomial. This makes the zero test exact and complete on the class; plain
// sin/cos product-to-sum bookkeeping would miss cyclotomic relations such as
// cos(pi/5) - cos(2 pi/5) = 1/2.
// ---------------------------------------------------------------------------

/// pi^m times a product of coordinate powers.
struct Monomial {
    unsigned pi_pow = 0;
    std::vector<std::pair<int, unsigned>> powers;  // sorted by coord, power > 0

    bool trivial() const { return pi_pow == 0 && powers.empty(); }
    bool has_coord_powers() const { return !powers.empty(); }

    Monomial times(const Monomial& o) const {
        Monomial r;
        r.pi_pow = pi_pow + o.pi_pow;
        std::map<int, unsigned> acc;
        for (auto& [i, p] : powers) acc[i] += p;
        for (auto& [i, p] : o.powers) acc[i] += p;
        r.powers.assign(acc.begin(), acc.end());
        return r;
    }
    /// Componentwise difference; nullopt when any power would go negative.
    std::optional<Monomial> divided_by(const Monomial& o) const {
        if (pi_pow < o.pi_pow) return std::nullopt;
        Monomial r;
        r.pi_pow = pi_pow - o.pi_pow;
        std::map<int, long long> acc;
        for (auto& [i, p] : powers) acc[i] += p;
        for (auto& [i, p] : o.powers) acc[i] -= p;
        for (auto& [i, p] : acc) {
            if (p < 0) return std::nullopt;
            if (p > 0) r.powers.emplace_back(i, static_cast<unsigned>(p));
        }
        return r;
    }

    // Total order compatible with monomial multiplication (missing entry
    // compares as exponent zero); exact-division relies on this.
    bool operator<(const Monomial& o) const {
        if (pi_pow != o.pi_pow) return pi_pow < o.pi_pow;
        auto ia = powers.begin();
        auto ib = o.powers.begin();
        while (ia != powers.end() || ib != o.powers.end()) {
            bool ea = ia == powers.end(), eb = ib == o.powers.end();
            int ca = ea ? 0 : ia->first, cb = eb ? 0 : ib->first;
            if (!ea && (eb || ca < cb)) return false;      // this has power, other zero
            if (!eb && (ea || cb < ca)) return true;       // other has power, this zero
            if (ia->second != ib->second) return ia->second < ib->second;
            ++ia;
            ++ib;
        }
        return false;
    }
    bool operator==(const Monomial& o) const {
        return pi_pow == o.pi_pow && powers == o.powers;
    }
};

/// Sparse rational frequency vector q of exp(i q . x).
struct Frequency {
    std::vector<std::pair<int, Rational>> comps;  // sorted by coord, non-zero

    bool zero() const { return comps.empty(); }
    bool canonical_positive() const { return !comps.empty() && comps.front().second > 0; }

    Frequency plus(const Frequency& o) const {
        Frequency r;
        std::map<int, Rational> acc;
        for (auto& [i, c] : comps) acc[i] += c;
        for (auto& [i, c] : o.comps) acc[i] += c;
        for (auto& [i, c] : acc)
            if (c != 0) r.comps.emplace_back(i, c);
        return r;
    }
    Frequency negated() const {
        Frequency r;
        for (auto& [i, c] : comps) r.comps.emplace_back(i, -c);
        return r;
    }

    // Total order compatible with frequency addition: compare as dense
    // rational vectors coordinate by coordinate (missing entry = 0). The
    // exact-division loop peels the maximal quotient term per step only
    // because this order is translation invariant.
    bool operator<(const Frequency& o) const {
        auto ia = comps.begin();
        auto ib = o.comps.begin();
        while (ia != comps.end() || ib != o.comps.end()) {
            bool ea = ia == comps.end(), eb = ib == o.comps.end();
            int ca = ea ? 0 : ia->first, cb = eb ? 0 : ib->first;
            if (!ea && (eb || ca < cb)) {
                if (ia->second != 0) return ia->second < 0;
                ++ia;
            } else if (!eb && (ea || cb < ca)) {
                if (ib->second != 0) return ib->second > 0;
                ++ib;
            } else {
                if (ia->second != ib->second) return ia->second < ib->second;
                ++ia;
                ++ib;
            }
        }
        return false;
    }
    bool operator==(const Frequency& o) const { return comps == o.comps; }
};

using GroupKey = std::pair<Monomial, Frequency>;

/// One monomial of the printable canonical form:
///   coef * pi^m * x^P * { 1 | cos(freq.x + phase*pi) | sin(freq.x + phase*pi) }
/// with phase in [0, 1/2) and, for non-empty freq, a positive leading
/// frequency coefficient.
struct RealTerm {
    enum class Trig { None, Cos, Sin };
    Rational coef;
    Monomial mono;
    Trig trig = Trig::None;
    Frequency freq;
    Rational phase{0};
};

class NormalForm {
public:
    NormalForm() = default;  // zero

    unsigned root_order() const { return n_; }
    const std::map<GroupKey, cyc::ZetaPoly>& groups() const { return groups_; }

    static NormalForm from_expr(const ScalarExpr& e) {
        if (e.empty()) throw Error("NormalForm: empty expression");
        NormalForm nf = build(*e.root());
        nf.reduce();
        return nf;
    }

    bool is_zero() const { return groups_.empty(); }  // valid on reduced forms

    /// Constant = no coordinate dependence at all (pi powers still allowed).
    bool is_constant() const {
        for (const auto& [key, c] : groups_)
            if (key.first.has_coord_powers() || !key.second.zero()) return false;
        return true;
    }

    /// The value as a plain rational, when it is one.
    std::optional<Rational> rational_constant() const {
        if (groups_.empty()) return Rational(0);
        if (groups_.size() != 1) return std::nullopt;
        const auto& [key, c] = *groups_.begin();
        if (!key.first.trivial() || !key.second.zero()) return std::nullopt;
        if (c.size() != 1 || c.begin()->first != 0) return std::nullopt;
        return c.begin()->second;
    }

    NormalForm plus(const NormalForm& o) const {
        unsigned n = std::lcm(n_, o.n_);
        NormalForm r;
        r.n_ = n;
        for (const auto& [k, c] : groups_) r.add_group(k, cyc::zp_lift(c, n_, n));
        for (const auto& [k, c] : o.groups_) r.add_group(k, cyc::zp_lift(c, o.n_, n));
        return r;
    }

    NormalForm times(const NormalForm& o) const {
        unsigned n = std::lcm(n_, o.n_);
        NormalForm r;
        r.n_ = n;
        for (const auto& [ka, ca] : groups_) {
            cyc::ZetaPoly la = cyc::zp_lift(ca, n_, n);
            for (const auto& [kb, cb] : o.groups_) {
                GroupKey k{ka.first.times(kb.first), ka.second.plus(kb.second)};
                r.add_group(k, cyc::zp_mul(la, cyc::zp_lift(cb, o.n_, n), n));
            }
        }
        return r;
    }

    NormalForm scaled(const Rational& s) const {
        NormalForm r;
        r.n_ = n_;
        if (s == 0) return r;
        for (const auto& [k, c] : groups_) r.groups_.emplace(k, cyc::zp_scale(c, s));
        return r;
    }

    void reduce() {
        for (auto it = groups_.begin(); it != groups_.end();) {
            it->second = cyc::zp_reduce(it->second, n_);
            it = it->second.empty() ? groups_.erase(it) : std::next(it);
        }
    }

    /// Exact partial derivative, term by term:
    /// d/dx [x^p E(i q x)] = p x^{p-1} E(..) + i q x^p E(..), with i = zeta^{N/4}.
    NormalForm differentiated(int coord) const {
        NormalForm r;
        r.n_ = n_;
        const unsigned quarter = n_ / 4;
        for (const auto& [key, c] : groups_) {
            const auto& [mono, freq] = key;
            for (std::size_t i = 0; i < mono.powers.size(); ++i) {
                if (mono.powers[i].first != coord) continue;
                Monomial m = mono;
                if (m.powers[i].second == 1)
                    m.powers.erase(m.powers.begin() + i);
                else
                    m.powers[i].second -= 1;
                r.add_group(GroupKey{m, freq},
                            cyc::zp_scale(c, Rational(mono.powers[i].second)));
            }
            for (const auto& [fc, q] : freq.comps) {
                if (fc != coord) continue;
                cyc::ZetaPoly shifted;
                for (const auto& [j, a] : c)
                    cyc::zp_add_term(shifted, (j + quarter) % n_, a * q);
                r.add_group(key, shifted);
            }
        }
        r.reduce();
        return r;
    }

    /// Printable canonical monomials in deterministic order. Requires a
    /// reduced, real-valued form (every public entry point guarantees both).
    std::vector<RealTerm> real_terms() const {
        std::vector<RealTerm> out;
        const unsigned n = n_;
        for (const auto& [key, coef] : groups_) {
            const auto& [mono, freq] = key;
            if (freq.zero()) {
                if (!cyc::zp_is_zero(cyc::zp_add(coef, cyc::zp_scale(cyc::zp_conjugate(coef, n),
                                                                     Rational(-1))),
                                     n))
                    throw Error("normal form is not real-valued (internal)");
                for (const auto& [j, a] : coef) {
                    if (j == 0) {
                        out.push_back({a, mono, RealTerm::Trig::None, {}, Rational(0)});
                    } else {
                        RealTerm t = folded(a, mono, freq, Rational(2 * (long long)j, (long long)n));
                        // Pure imaginary component of a real constant: its real
                        // part is zero, drop it.
                        if (t.trig == RealTerm::Trig::Sin && t.freq.zero() && t.phase == 0)
                            continue;
                        out.push_back(std::move(t));
                    }
                }
                continue;
            }
            if (!freq.canonical_positive()) continue;  // handled with its partner
            auto partner = groups_.find(GroupKey{mono, freq.negated()});
            const cyc::ZetaPoly conj = cyc::zp_conjugate(coef, n);
            if (partner == groups_.end() ||
                !cyc::zp_is_zero(
                    cyc::zp_add(partner->second, cyc::zp_scale(conj, Rational(-1))), n))
                throw Error("normal form is not real-valued (internal)");
            for (const auto& [j, a] : coef)
                out.push_back(folded(a * 2, mono, freq, Rational(2 * (long long)j, (long long)n)));
        }
        std::sort(out.begin(), out.end(), [](const RealTerm& a, const RealTerm& b) {
            auto ka = std::tie(a.mono, a.freq, a.trig, a.phase);
            auto kb = std::tie(b.mono, b.freq, b.trig, b.phase);
            return ka < kb;
        });
        return out;
    }

    /// Rebuilds the canonical expression tree on the given chart. The
    /// already-computed normal form is attached to the result so downstream
    /// zero tests never recompute it.
    ScalarExpr to_expr(const ChartPtr& chart) const {
        std::vector<RealTerm> terms = real_terms();
        ScalarExpr sum = ScalarExpr::constant(chart, Rational(0));
        bool any = false;
        for (const RealTerm& t : terms) {
            ScalarExpr factor = ScalarExpr::constant(chart, t.coef);
            for (unsigned i = 0; i < t.mono.pi_pow; ++i) factor = factor * ScalarExpr::pi(chart);
            for (const auto& [ci, p] : t.mono.powers) {
                ScalarExpr c = ScalarExpr::coordinate(chart, ci);
                factor = factor * (p == 1 ? c : pow(c, p));
            }
            if (t.trig != RealTerm::Trig::None) {
                LinearArg arg;
                for (const auto& [ci, q] : t.freq.comps) arg.add_coord(ci, q);
                arg.pi_coeff = t.phase;
                factor = factor * (t.trig == RealTerm::Trig::Cos
                                       ? ScalarExpr::cos_of(chart, arg)
                                       : ScalarExpr::sin_of(chart, arg));
            }
            sum = any ? sum + factor : factor;
            any = true;
        }
        ScalarExpr result = any ? sum : ScalarExpr::constant(chart, Rational(0));
        std::call_once(result.nf_box_->once, [&] {
            auto copy = std::make_shared<NormalForm>(*this);
            copy->reduce();  // cheap when already reduced
            result.nf_box_->value = std::move(copy);
        });
        return result;
    }

    /// Exact quotient in the trig-polynomial ring, when one exists. Greedy
    /// leading-group elimination with coefficient inversion in Q(zeta_N);
    /// an iteration cap guards the Laurent directions where the term order
    /// is not well founded. Success implies num == quotient * den exactly.
    std::optional<NormalForm> divided_by(const NormalForm& den) const {
        if (den.groups_.empty()) return std::nullopt;
        unsigned n = std::lcm(n_, den.n_);
        NormalForm work;
        work.n_ = n;
        for (const auto& [k, c] : groups_) work.add_group(k, cyc::zp_lift(c, n_, n));
        work.reduce();
        NormalForm d;
        d.n_ = n;
        for (const auto& [k, c] : den.groups_) d.add_group(k, cyc::zp_lift(c, den.n_, n));
        d.reduce();
        if (d.groups_.empty()) return std::nullopt;

        const auto& [dkey, dcoef] = *d.groups_.rbegin();
        cyc::ZetaPoly dinv = cyc::zp_invert(dcoef, n);

        NormalForm q;
        q.n_ = n;
        std::size_t cap = 4 * (work.groups_.size() + 1) * (d.groups_.size() + 1) + 16;
        while (!work.groups_.empty()) {
            if (cap-- == 0) return std::nullopt;
            const auto& [wkey, wcoef] = *work.groups_.rbegin();
            auto qmono = wkey.first.divided_by(dkey.first);
            if (!qmono) return std::nullopt;
            GroupKey qkey{*qmono, wkey.second.plus(dkey.second.negated())};
            cyc::ZetaPoly qc = cyc::zp_reduce(cyc::zp_mul(wcoef, dinv, n), n);
            q.add_group(qkey, qc);
            // work -= qterm * den
            for (const auto& [k, c] : d.groups_) {
                GroupKey t{qkey.first.times(k.first), qkey.second.plus(k.second)};
                work.add_group(t, cyc::zp_scale(cyc::zp_mul(qc, c, n), Rational(-1)));
            }
            work.reduce();
        }
        q.reduce();
        return q;
    }

private:
    void add_group(const GroupKey& k, const cyc::ZetaPoly& c) {
        if (c.empty()) return;
        auto [it, inserted] = groups_.emplace(k, c);
        if (!inserted) {
            it->second = cyc::zp_add(it->second, c);
            if (it->second.empty()) groups_.erase(it);
        }
    }

    static RealTerm folded(Rational a, const Monomial& mono, const Frequency& freq,
                           Rational r) {
        // Base term a*cos(freq.x + r*pi), r in [0,2); fold the phase into
        // [0, 1/2) switching kind/sign as needed.
        r = rational_mod(r, Rational(2));
        RealTerm t;
        t.mono = mono;
        t.freq = freq;
        if (r >= 1) {
            r -= 1;
            a = -a;
        }
        if (r >= Rational(1, 2)) {
            // cos(X + pi/2 + d) = -sin(X + d)
            t.trig = RealTerm::Trig::Sin;
            t.phase = r - Rational(1, 2);
            t.coef = -a;
        } else {
            t.trig = RealTerm::Trig::Cos;
            t.phase = r;
            t.coef = a;
        }
        return t;
    }

    static constexpr unsigned kMaxRootOrder = 4096;

    static unsigned phase_root_order(const Rational& half_phase) {
        // exp(i r pi) = zeta_N^j with j/N = r/2 (mod 1).
        Rational frac = rational_mod(half_phase, Rational(1));
        if (denominator(frac) > kMaxRootOrder)
            throw Error("sin/cos pi-offset denominator too large");
        unsigned den = denominator(frac).convert_to<unsigned>();
        unsigned n = std::lcm(4u, den);
        if (n > kMaxRootOrder) throw Error("sin/cos pi-offset denominator too large");
        return n;
    }

    static NormalForm build(const ExprNode& node) {
        using K = ExprNode::Kind;
        NormalForm r;
        switch (node.kind) {
            case K::Constant: {
                if (node.value != 0)
                    r.groups_.emplace(GroupKey{}, cyc::ZetaPoly{{0u, node.value}});
                return r;
            }
            case K::Pi: {
                Monomial m;
                m.pi_pow = 1;
                r.groups_.emplace(GroupKey{m, {}}, cyc::ZetaPoly{{0u, Rational(1)}});
                return r;
            }
            case K::Coordinate: {
                Monomial m;
                m.powers.emplace_back(node.coord, 1u);
                r.groups_.emplace(GroupKey{m, {}}, cyc::ZetaPoly{{0u, Rational(1)}});
                return r;
            }
            case K::Sum: {
                for (const auto& c : node.children) r = r.plus(build(*c));
                return r;
            }
            case K::Product: {
                r.groups_.emplace(GroupKey{}, cyc::ZetaPoly{{0u, Rational(1)}});
                for (const auto& c : node.children) r = r.times(build(*c));
                return r;
            }
            case K::Power: {
                NormalForm base = build(*node.children[0]);
                r.groups_.emplace(GroupKey{}, cyc::ZetaPoly{{0u, Rational(1)}});
                for (unsigned i = 0; i < node.exponent; ++i) r = r.times(base);
                return r;
            }
            case K::Sin:
            case K::Cos: {
                Rational half = node.arg.pi_coeff / 2;
                unsigned n = phase_root_order(half);
                Rational frac = rational_mod(half, Rational(1));
                unsigned j =
                    Integer(numerator(frac) * (Integer(n) / denominator(frac)))
                        .convert_to<unsigned>();
                Frequency q;
                for (const auto& [i, c] : node.arg.coords) q.comps.emplace_back(i, c);
                r.n_ = n;
                const unsigned jc = (n - j) % n;
                if (node.kind == K::Cos) {
                    // cos L = (zeta^j E(q) + zeta^-j E(-q)) / 2
                    r.add_group(GroupKey{{}, q}, cyc::ZetaPoly{{j, Rational(1, 2)}});
                    r.add_group(GroupKey{{}, q.negated()},
                                cyc::ZetaPoly{{jc, Rational(1, 2)}});
                } else {
                    // sin L = (zeta^j E(q) - zeta^-j E(-q)) / (2 i),
                    // 1/(2 i) = (1/2) zeta^{3N/4}
                    unsigned i34 = 3 * n / 4;
                    r.add_group(GroupKey{{}, q},
                                cyc::ZetaPoly{{(j + i34) % n, Rational(1, 2)}});
                    r.add_group(GroupKey{{}, q.negated()},
                                cyc::ZetaPoly{{(jc + i34) % n, Rational(-1, 2)}});
                }
                return r;
            }
        }
        throw Error("NormalForm::build: unreachable");
    }

    unsigned n_ = 4;  // root-of-unity order, always a multiple of 4
    std::map<GroupKey, cyc::ZetaPoly> groups_;
};

inline const NormalForm& ScalarExpr::normal_form() const {
    if (!nf_box_) throw Error("normal_form: empty expression");
    std::call_once(nf_box_->once, [&] {
        nf_box_->value = std::make_shared<const NormalForm>(NormalForm::from_expr(*this));
    });
    return *static_cast<const NormalForm*>(nf_box_->value.get());
}

// ---------------------------------------------------------------------------
// Fast numeric evaluation of a canonical form (used by grid scans).
// ---------------------------------------------------------------------------

class CompiledScalar {
public:
    CompiledScalar() = default;
    explicit CompiledScalar(const ScalarExpr& e) {
        for (const RealTerm& t : e.normal_form().real_terms()) {
            Term ct;
            ct.coef = to_double(t.coef) * std::pow(std::numbers::pi, double(t.mono.pi_pow));
            for (auto& [i, p] : t.mono.powers) ct.powers.emplace_back(i, p);
            ct.trig = t.trig;
            for (auto& [i, q] : t.freq.comps) ct.freq.emplace_back(i, to_double(q));
            ct.phase = to_double(t.phase) * std::numbers::pi;
            terms_.push_back(std::move(ct));
        }
    }

    double operator()(const std::vector<double>& x) const {
        double sum = 0;
        for (const Term& t : terms_) {
            double v = t.coef;
            for (auto& [i, p] : t.powers) {
                double b = x[i];
                for (unsigned k = 0; k < p; ++k) v *= b;
            }
            if (t.trig != RealTerm::Trig::None) {
                double a = t.phase;
                for (auto& [i, q] : t.freq) a += q * x[i];
                v *= (t.trig == RealTerm::Trig::Cos) ? std::cos(a) : std::sin(a);
            }
            sum += v;
        }
        return sum;
    }

private:
    struct Term {
        double coef;
        std::vector<std::pair<int, unsigned>> powers;
        RealTerm::Trig trig;
        std::vector<std::pair<int, double>> freq;
        double phase;
    };
    std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// The scalar-expr operations built on the canonical form.
// ---------------------------------------------------------------------------

/// Expanded canonical form: sum of rational * pi^m * coordinate powers *
/// sin/cos with sign-normalized arguments; identically zero inputs normalize
/// to the zero node.
inline ScalarExpr normalize(const ScalarExpr& e) { return e.normal_form().to_expr(e.chart()); }

namespace detail {
inline std::pair<double, double> eval_with_mag_node(const NodePtr& n, const Point& p) {
    using K = ExprNode::Kind;
    switch (n->kind) {
        case K::Constant: {
            double v = to_double(n->value);
            return {v, std::abs(v)};
        }
        case K::Pi: return {std::numbers::pi, std::numbers::pi};
        case K::Coordinate: {
            double v = p[n->coord];
            return {v, std::abs(v)};
        }
        case K::Sum: {
            double v = 0, m = 0;
            for (const auto& c : n->children) {
                auto [cv, cm] = eval_with_mag_node(c, p);
                v += cv;
                m += cm;
            }
            return {v, m};
        }
        case K::Product: {
            double v = 1, m = 1;
            for (const auto& c : n->children) {
                auto [cv, cm] = eval_with_mag_node(c, p);
                v *= cv;
                m *= cm;
            }
            return {v, m};
        }
        case K::Power: {
            auto [cv, cm] = eval_with_mag_node(n->children[0], p);
            return {std::pow(cv, double(n->exponent)), std::pow(cm, double(n->exponent))};
        }
        case K::Sin: return {std::sin(n->arg.evaluate(p)), 1.0};
        case K::Cos: return {std::cos(n->arg.evaluate(p)), 1.0};
    }
    throw Error("evaluate_with_magnitude: unreachable");
}
}  // namespace detail

/// Evaluates together with a magnitude estimate (sum of absolute values of
/// all contributions) so callers can form relative tolerances.
inline std::pair<double, double> evaluate_with_magnitude(const ScalarExpr& e, const Point& p) {
    return detail::eval_with_mag_node(e.root(), p);
}

inline Point random_point(const ChartPtr& chart, std::mt19937_64& rng) {
    std::vector<double> x(chart->dimension());
    for (int i = 0; i < chart->dimension(); ++i) {
        if (chart->periodic(i)) {
            std::uniform_real_distribution<double> d(0.0, 2.0 * std::numbers::pi);
            x[i] = d(rng);
        } else {
            std::uniform_real_distribution<double> d(-1.0, 1.0);
            x[i] = d(rng);
        }
    }
    return Point(chart, std::move(x));
}

/// Symbolic zero test (authoritative), cross-checked by evaluation at seeded
/// random points. A disagreement means a bug in the engine, not in the input,
/// and is reported as an internal error.
inline bool is_zero(const ScalarExpr& e, std::uint64_t seed = 42, int sample_points = 8,
                    double tau_zero = 1e-9) {
    bool symbolic = e.normal_form().is_zero();
    if (symbolic) {
        std::mt19937_64 rng(seed);
        for (int k = 0; k < sample_points; ++k) {
            Point p = random_point(e.chart(), rng);
            auto [v, mag] = evaluate_with_magnitude(e, p);
            if (std::abs(v) > tau_zero * std::max(1.0, mag))
                throw Error("is_zero: symbolic zero contradicted numerically (internal)");
        }
    }
    return symbolic;
}

inline bool is_constant(const ScalarExpr& e) { return e.normal_form().is_constant(); }

inline std::optional<Rational> rational_constant(const ScalarExpr& e) {
    return e.normal_form().rational_constant();
}

/// Exact quotient num/den within the class, or nullopt.
inline std::optional<ScalarExpr> try_divide(const ScalarExpr& num, const ScalarExpr& den) {
    require_same_chart(num.chart(), den.chart(), "try_divide");
    auto q = num.normal_form().divided_by(den.normal_form());
    if (!q) return std::nullopt;
    return q->to_expr(num.chart());
}

/// Value of integrate_torus: coefficient * (2 pi)^two_pi_power.
struct TorusIntegral {
    Rational coefficient;
    unsigned two_pi_power = 0;

    double value() const {
        return to_double(coefficient) *
               std::pow(2.0 * std::numbers::pi, double(two_pi_power));
    }
};

/// Exact integral over the full torus. Only constant monomials contribute;
/// trig terms with (integer) non-zero frequency integrate to zero. Loose pi
/// factors fold into the power of 2 pi.
inline TorusIntegral integrate_torus(const ScalarExpr& e) {
    const ChartPtr& chart = e.chart();
    for (int i = 0; i < chart->dimension(); ++i)
        if (!chart->periodic(i))
            throw Error("integrate_torus: non-periodic coordinate '" + chart->name(i) + "'");
    const NormalForm& nf = e.normal_form();
    const unsigned dim = static_cast<unsigned>(chart->dimension());
    std::optional<unsigned> pi_pow;
    Rational coef(0);
    for (const auto& [key, c] : nf.groups()) {
        const auto& [mono, freq] = key;
        if (mono.has_coord_powers())
            throw Error("integrate_torus: polynomial-in-angle monomial is not a torus function");
        for (const auto& [i, q] : freq.comps)
            if (!is_integer(q))
                throw Error("integrate_torus: non-integer frequency is not a torus function");
        if (!freq.zero()) continue;  // mean of a non-constant harmonic is zero
        if (c.size() != 1 || c.begin()->first != 0)
            throw Error("integrate_torus: constant term is not rational");
        if (pi_pow && *pi_pow != mono.pi_pow)
            throw Error("integrate_torus: mixed pi powers in the constant term");
        pi_pow = mono.pi_pow;
        coef += c.begin()->second;
    }
    if (!pi_pow || coef == 0) return {Rational(0), dim};
    // pi^m (2 pi)^dim = 2^-m (2 pi)^(dim+m)
    Rational scale = coef;
    for (unsigned i = 0; i < *pi_pow; ++i) scale /= 2;
    return {scale, dim + *pi_pow};
}

/// Validates that the expression is a genuine torus function in its chart's
/// periodic coordinates: integer frequencies, and no polynomial dependence on
/// a periodic coordinate. Non-periodic coordinates are unrestricted.
inline void validate_periodic_frequencies(const ScalarExpr& e) {
    const ChartPtr& chart = e.chart();
    for (const auto& [key, c] : e.normal_form().groups()) {
        for (const auto& [i, p] : key.first.powers)
            if (chart->periodic(i))
                throw Error("expression is polynomial in periodic coordinate '" +
                            chart->name(i) + "' (not a torus function)");
        for (const auto& [i, q] : key.second.comps)
            if (chart->periodic(i) && !is_integer(q))
                throw Error("non-integer frequency " + to_string(q) +
                            " in periodic coordinate '" + chart->name(i) + "'");
    }
}

}  // namespace cpair
