#pragma once

#include "cpair/rational.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

namespace cpair::cyc {

// Dense polynomials over Q, coefficient index = power. Only what the
// cyclotomic arithmetic below needs.
using Poly = std::vector<Rational>;

inline void poly_trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int poly_degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

inline Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    poly_trim(r);
    return r;
}

inline Poly poly_sub(Poly a, const Poly& b) {
    if (a.size() < b.size()) a.resize(b.size(), Rational(0));
    for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    poly_trim(a);
    return a;
}

/// Euclidean division a = q*b + r, deg r < deg b. b must be non-zero.
inline std::pair<Poly, Poly> poly_divmod(Poly a, const Poly& b) {
    if (b.empty()) throw Error("poly_divmod: division by zero polynomial");
    Poly q;
    poly_trim(a);
    int db = poly_degree(b);
    while (poly_degree(a) >= db) {
        int shift = poly_degree(a) - db;
        Rational c = a.back() / b.back();
        if (static_cast<int>(q.size()) < shift + 1) q.resize(shift + 1, Rational(0));
        q[shift] += c;
        for (int i = 0; i <= db; ++i) a[shift + i] -= c * b[i];
        poly_trim(a);
    }
    poly_trim(q);
    return {q, a};
}

/// The N-th cyclotomic polynomial Phi_N, computed by exact division of
/// x^N - 1 by the Phi_d for proper divisors d. Cached; thread-safe.
inline const Poly& cyclotomic_poly(unsigned n) {
    static std::map<unsigned, Poly> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    // Phi_n computed iteratively so recursion never re-locks.
    std::function<const Poly&(unsigned)> get = [&](unsigned m) -> const Poly& {
        auto found = cache.find(m);
        if (found != cache.end()) return found->second;
        Poly xm1(m + 1, Rational(0));
        xm1[0] = -1;
        xm1[m] = 1;
        Poly acc = xm1;
        for (unsigned d = 1; d < m; ++d)
            if (m % d == 0) {
                auto [q, r] = poly_divmod(acc, get(d));
                if (!r.empty()) throw Error("cyclotomic_poly: internal division failure");
                acc = q;
            }
        return cache.emplace(m, std::move(acc)).first->second;
    };
    return get(n);
}

inline unsigned euler_phi_degree(unsigned n) {
    return static_cast<unsigned>(poly_degree(cyclotomic_poly(n)));
}

/// Sparse element of Q(zeta_N) as a polynomial in zeta_N: exponent -> coeff,
/// exponents kept in [0, N). Canonical (zero-testable) only after reduce().
using ZetaPoly = std::map<unsigned, Rational>;

inline void zp_add_term(ZetaPoly& p, unsigned exp, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = p.emplace(exp, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) p.erase(it);
    }
}

inline ZetaPoly zp_add(const ZetaPoly& a, const ZetaPoly& b) {
    ZetaPoly r = a;
    for (const auto& [e, c] : b) zp_add_term(r, e, c);
    return r;
}

inline ZetaPoly zp_scale(const ZetaPoly& a, const Rational& s) {
    ZetaPoly r;
    if (s == 0) return r;
    for (const auto& [e, c] : a) r.emplace(e, c * s);
    return r;
}

inline ZetaPoly zp_mul(const ZetaPoly& a, const ZetaPoly& b, unsigned n) {
    ZetaPoly r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) zp_add_term(r, (ea + eb) % n, ca * cb);
    return r;
}

/// Complex conjugation: zeta -> zeta^{N-1}.
inline ZetaPoly zp_conjugate(const ZetaPoly& a, unsigned n) {
    ZetaPoly r;
    for (const auto& [e, c] : a) zp_add_term(r, (n - e) % n, c);
    return r;
}

/// Re-embeds from Q(zeta_from) into Q(zeta_to); to must be a multiple of from.
inline ZetaPoly zp_lift(const ZetaPoly& a, unsigned from, unsigned to) {
    if (from == to) return a;
    if (to % from != 0) throw Error("zp_lift: incompatible root orders");
    unsigned k = to / from;
    ZetaPoly r;
    for (const auto& [e, c] : a) r.emplace(e * k, c);
    return r;
}

/// Canonical representative mod Phi_N (degree < phi(N)). Empty iff zero.
inline ZetaPoly zp_reduce(const ZetaPoly& a, unsigned n) {
    if (a.empty()) return a;
    const Poly& phi = cyclotomic_poly(n);
    unsigned d = static_cast<unsigned>(poly_degree(phi));
    if (a.rbegin()->first < d) return a;
    Poly dense(n, Rational(0));
    for (const auto& [e, c] : a) dense[e] += c;
    auto [q, rem] = poly_divmod(std::move(dense), phi);
    (void)q;
    ZetaPoly r;
    for (std::size_t e = 0; e < rem.size(); ++e)
        if (rem[e] != 0) r.emplace(static_cast<unsigned>(e), rem[e]);
    return r;
}

inline bool zp_is_zero(const ZetaPoly& a, unsigned n) { return zp_reduce(a, n).empty(); }

/// Multiplicative inverse in Q(zeta_N) via the extended Euclidean algorithm
/// against Phi_N. Throws on zero input.
inline ZetaPoly zp_invert(const ZetaPoly& a, unsigned n) {
    ZetaPoly ar = zp_reduce(a, n);
    if (ar.empty()) throw Error("zp_invert: zero element");
    Poly r0 = cyclotomic_poly(n);
    Poly r1(ar.rbegin()->first + 1, Rational(0));
    for (const auto& [e, c] : ar) r1[e] = c;
    Poly s0 = {}, s1 = {Rational(1)};  // coefficients of the input element
    while (!r1.empty() && poly_degree(r1) > 0) {
        auto [q, r2] = poly_divmod(r0, r1);
        Poly s2 = poly_sub(s0, poly_mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(r2);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    if (r1.empty()) throw Error("zp_invert: element not invertible (unexpected)");
    Rational lead = r1[0];
    ZetaPoly inv;
    for (std::size_t e = 0; e < s1.size(); ++e)
        if (s1[e] != 0) inv.emplace(static_cast<unsigned>(e), s1[e] / lead);
    return zp_reduce(inv, n);
}

}  // namespace cpair::cyc
