#pragma once

#include "cpair/differential_form.hpp"
#include "cpair/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace cpair {

using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;  // rows

/// In-place fraction-free-ish Gaussian elimination; returns the rank. Rows
/// above the rank form a basis of the row space.
inline int row_reduce(RationalMatrix& m) {
    if (m.empty()) return 0;
    const std::size_t cols = m[0].size();
    int rank = 0;
    for (std::size_t c = 0; c < cols && rank < static_cast<int>(m.size()); ++c) {
        int pivot = -1;
        for (std::size_t r = rank; r < m.size(); ++r)
            if (m[r][c] != 0) {
                pivot = static_cast<int>(r);
                break;
            }
        if (pivot < 0) continue;
        std::swap(m[rank], m[pivot]);
        Rational p = m[rank][c];
        for (auto& x : m[rank]) x /= p;
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (static_cast<int>(r) == rank || m[r][c] == 0) continue;
            Rational f = m[r][c];
            for (std::size_t k = 0; k < cols; ++k) m[r][k] -= f * m[rank][k];
        }
        ++rank;
    }
    m.resize(rank);
    return rank;
}

/// A finite-dimensional Lie algebra over Q given by structure constants:
/// [X_i, X_j] = sum_k c_{ij}^k X_k for i < j (antisymmetry is built into the
/// storage). Indices are 0-based internally, 1-based in manifests.
class LieAlgebra {
public:
    explicit LieAlgebra(int dim) : dim_(dim) {
        if (dim <= 0) throw Error("LieAlgebra: dimension must be positive");
    }

    int dimension() const { return dim_; }

    void set_bracket(int i, int j, int k, const Rational& c) {
        check_index(i);
        check_index(j);
        check_index(k);
        if (i == j) throw Error("LieAlgebra: bracket [X_i, X_i] must vanish");
        Rational v = c;
        if (i > j) {
            std::swap(i, j);
            v = -v;
        }
        if (v == 0) return;
        structure_[{i, j}][k] += v;
        if (structure_[{i, j}][k] == 0) structure_[{i, j}].erase(k);
    }

    /// c_{ij}^k with antisymmetry applied; works for any i, j.
    Rational structure_constant(int i, int j, int k) const {
        if (i == j) return Rational(0);
        Rational sign(1);
        if (i > j) {
            std::swap(i, j);
            sign = -1;
        }
        auto it = structure_.find({i, j});
        if (it == structure_.end()) return Rational(0);
        auto kt = it->second.find(k);
        return kt == it->second.end() ? Rational(0) : sign * kt->second;
    }

    const std::map<std::pair<int, int>, std::map<int, Rational>>& brackets() const {
        return structure_;
    }

    /// [u, v] for coefficient vectors in the X-basis, exact arithmetic.
    RationalVector bracket(const RationalVector& u, const RationalVector& v) const {
        RationalVector r(dim_, Rational(0));
        for (const auto& [ij, comps] : structure_) {
            auto [i, j] = ij;
            Rational factor = u[i] * v[j] - u[j] * v[i];
            if (factor == 0) continue;
            for (const auto& [k, c] : comps) r[k] += factor * c;
        }
        return r;
    }

private:
    void check_index(int i) const {
        if (i < 0 || i >= dim_) throw Error("LieAlgebra: index out of range");
    }

    int dim_;
    std::map<std::pair<int, int>, std::map<int, Rational>> structure_;
};

/// Exact Jacobi test: sum over cyclic permutations of [[X_i,X_j],X_k] for all
/// i < j < k.
inline bool check_jacobi(const LieAlgebra& g) {
    const int n = g.dimension();
    auto basis = [&](int i) {
        RationalVector v(n, Rational(0));
        v[i] = 1;
        return v;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                RationalVector s1 = g.bracket(g.bracket(basis(i), basis(j)), basis(k));
                RationalVector s2 = g.bracket(g.bracket(basis(j), basis(k)), basis(i));
                RationalVector s3 = g.bracket(g.bracket(basis(k), basis(i)), basis(j));
                for (int t = 0; t < n; ++t)
                    if (s1[t] + s2[t] + s3[t] != 0) return false;
            }
    return true;
}

struct NilpotencyResult {
    bool nilpotent = false;
    int steps = 0;  // nilpotency class: smallest c with g^{c+1} = 0
};

/// Lower central series over Q until stabilization.
inline NilpotencyResult is_nilpotent(const LieAlgebra& g) {
    if (!check_jacobi(g)) throw Error("is_nilpotent: Jacobi identity fails");
    const int n = g.dimension();
    RationalMatrix current;  // basis of g^m, rows
    for (int i = 0; i < n; ++i) {
        RationalVector v(n, Rational(0));
        v[i] = 1;
        current.push_back(v);
    }
    int steps = 0;
    while (true) {
        RationalMatrix next;
        for (int i = 0; i < n; ++i) {
            RationalVector e(n, Rational(0));
            e[i] = 1;
            for (const auto& row : current) next.push_back(g.bracket(e, row));
        }
        int new_dim = row_reduce(next);
        ++steps;
        if (new_dim == 0) return {true, steps};
        if (new_dim == static_cast<int>(current.size())) return {false, steps};
        current = std::move(next);
    }
}

/// Left-invariant form with constant rational coefficients over the dual
/// basis omega^i; same strictly-increasing tuple discipline as
/// DifferentialForm.
class InvariantForm {
public:
    // Degrees above the dimension are allowed and necessarily empty (the
    // zero form), matching exterior-algebra convention.
    InvariantForm(int dim, int degree) : dim_(dim), degree_(degree) {
        if (degree < 0) throw Error("InvariantForm: negative degree");
    }

    static InvariantForm covector(int dim, int i) {
        InvariantForm r(dim, 1);
        r.add_term({i}, Rational(1));
        return r;
    }

    int dimension() const { return dim_; }
    int degree() const { return degree_; }
    const std::map<IndexTuple, Rational>& coefficients() const { return coef_; }
    bool is_zero_form() const { return coef_.empty(); }

    void add_term(const IndexTuple& t, const Rational& c) {
        if (static_cast<int>(t.size()) != degree_)
            throw Error("InvariantForm: tuple length != degree");
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] < 0 || t[i] >= dim_) throw Error("InvariantForm: index out of range");
            if (i > 0 && t[i - 1] >= t[i])
                throw Error("InvariantForm: tuple not strictly increasing");
        }
        if (c == 0) return;
        coef_[t] += c;
        if (coef_[t] == 0) coef_.erase(t);
    }

    InvariantForm operator+(const InvariantForm& o) const {
        if (dim_ != o.dim_ || degree_ != o.degree_)
            throw Error("InvariantForm addition: shape mismatch");
        InvariantForm r = *this;
        for (const auto& [t, c] : o.coef_) r.add_term(t, c);
        return r;
    }
    InvariantForm operator*(const Rational& s) const {
        InvariantForm r(dim_, degree_);
        for (const auto& [t, c] : coef_) r.add_term(t, c * s);
        return r;
    }

    std::string to_string() const {
        if (coef_.empty()) return "0";
        std::string s;
        for (const auto& [t, c] : coef_) {
            if (!s.empty()) s += " + ";
            s += cpair::to_string(c);
            for (int i : t) s += "*w" + std::to_string(i + 1);
        }
        return s;
    }

private:
    int dim_, degree_;
    std::map<IndexTuple, Rational> coef_;
};

inline InvariantForm wedge(const InvariantForm& a, const InvariantForm& b) {
    if (a.dimension() != b.dimension()) throw Error("InvariantForm wedge: dimension mismatch");
    InvariantForm r(a.dimension(), a.degree() + b.degree());
    if (a.degree() + b.degree() > a.dimension()) return r;
    IndexTuple merged;
    for (const auto& [ta, ca] : a.coefficients())
        for (const auto& [tb, cb] : b.coefficients()) {
            int sign = merge_tuples(ta, tb, merged);
            if (sign == 0) continue;
            r.add_term(merged, ca * cb * sign);
        }
    return r;
}

/// Exact contraction with a constant vector in the X-basis.
inline InvariantForm interior_product(const RationalVector& v, const InvariantForm& a) {
    if (a.degree() == 0) throw Error("interior_product: cannot contract a 0-form");
    if (static_cast<int>(v.size()) != a.dimension())
        throw Error("interior_product: dimension mismatch");
    InvariantForm r(a.dimension(), a.degree() - 1);
    for (const auto& [t, c] : a.coefficients())
        for (std::size_t pos = 0; pos < t.size(); ++pos) {
            IndexTuple rest;
            for (std::size_t q = 0; q < t.size(); ++q)
                if (q != pos) rest.push_back(t[q]);
            r.add_term(rest, (pos % 2 == 0 ? c : -c) * v[t[pos]]);
        }
    return r;
}

inline InvariantForm invariant_form_power(const InvariantForm& a, unsigned m) {
    if (m == 0) {
        InvariantForm one(a.dimension(), 0);
        one.add_term({}, Rational(1));
        return one;
    }
    InvariantForm r = a;
    for (unsigned i = 1; i < m; ++i) r = wedge(r, a);
    return r;
}

/// Chevalley-Eilenberg differential: d omega^k = -sum_{i<j} c_{ij}^k
/// omega^i ^ omega^j on covectors, extended as an antiderivation.
inline InvariantForm ce_differential(const LieAlgebra& g, const InvariantForm& a) {
    if (!check_jacobi(g)) throw Error("ce_differential: Jacobi identity fails");
    const int n = g.dimension();
    if (a.dimension() != n) throw Error("ce_differential: dimension mismatch");

    auto d_covector = [&](int k) {
        InvariantForm r(n, 2);
        for (const auto& [ij, comps] : g.brackets()) {
            auto it = comps.find(k);
            if (it == comps.end()) continue;
            r.add_term({ij.first, ij.second}, -it->second);
        }
        return r;
    };

    InvariantForm one(n, 0);
    one.add_term({}, Rational(1));

    InvariantForm r(n, a.degree() + 1);
    if (a.degree() + 1 > n) return r;
    for (const auto& [t, c] : a.coefficients()) {
        for (std::size_t pos = 0; pos < t.size(); ++pos) {
            // omega^{t0} ^ ... ^ d(omega^{t_pos}) ^ ... with sign (-1)^pos
            InvariantForm left = one, right = one;
            for (std::size_t q = 0; q < pos; ++q)
                left = wedge(left, InvariantForm::covector(n, t[q]));
            for (std::size_t q = pos + 1; q < t.size(); ++q)
                right = wedge(right, InvariantForm::covector(n, t[q]));
            InvariantForm mid = d_covector(t[pos]) * ((pos % 2 == 0) ? c : -c);
            r = r + wedge(wedge(left, mid), right);
        }
    }
    return r;
}

struct InvariantCpReport {
    bool jacobi = false;
    bool alpha_power_closed = false;
    bool eta_power_closed = false;
    bool volume_nonzero = false;
    Rational volume_constant{0};
    int h = 0, k = 0;

    bool passed() const {
        return jacobi && alpha_power_closed && eta_power_closed && volume_nonzero;
    }
};

/// Exact verification of the contact-pair conditions for constant-coefficient
/// invariant 1-forms: (d a)^{h+1} = 0, (d e)^{k+1} = 0, and
/// a ^ (d a)^h ^ e ^ (d e)^k = c * omega^1 ^ ... ^ omega^n with c != 0.
inline InvariantCpReport invariant_cp_check(const LieAlgebra& g, const InvariantForm& a,
                                            const InvariantForm& e, int h, int k) {
    const int n = g.dimension();
    if (a.degree() != 1 || e.degree() != 1)
        throw Error("invariant_cp_check: both forms must have degree 1");
    if (2 * h + 2 * k + 2 != n)
        throw Error("invariant_cp_check: 2h+2k+2 != algebra dimension");

    InvariantCpReport rep;
    rep.h = h;
    rep.k = k;
    rep.jacobi = check_jacobi(g);
    if (!rep.jacobi) return rep;

    InvariantForm da = ce_differential(g, a);
    InvariantForm de = ce_differential(g, e);
    rep.alpha_power_closed = invariant_form_power(da, h + 1).is_zero_form();
    rep.eta_power_closed = invariant_form_power(de, k + 1).is_zero_form();

    InvariantForm top = wedge(wedge(a, invariant_form_power(da, h)),
                              wedge(e, invariant_form_power(de, k)));
    if (!top.is_zero_form()) {
        IndexTuple full(n);
        for (int i = 0; i < n; ++i) full[i] = i;
        auto it = top.coefficients().find(full);
        if (it != top.coefficients().end()) {
            rep.volume_constant = it->second;
            rep.volume_nonzero = rep.volume_constant != 0;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Built-in algebras with their designated pairs.
// ---------------------------------------------------------------------------

struct LieCatalogEntry {
    std::string name;
    std::string description;
    LieAlgebra algebra;
    int alpha_index;  // 1-based dual-basis index of the first form
    int eta_index;    // 1-based dual-basis index of the second form
    int h, k;
};

inline std::vector<LieCatalogEntry> lie_catalog() {
    std::vector<LieCatalogEntry> out;
    {
        LieAlgebra g(4);
        g.set_bracket(0, 3, 2, Rational(1));  // [X1,X4] = X3
        g.set_bracket(0, 2, 1, Rational(1));  // [X1,X3] = X2
        out.push_back({"n4_1",
                       "4-dimensional nilpotent algebra; pair (w2, w4), type (1,0)", g, 2, 4,
                       1, 0});
    }
    {
        LieAlgebra g(6);
        g.set_bracket(0, 5, 4, Rational(1));  // [X1,X6] = X5
        g.set_bracket(0, 4, 3, Rational(1));  // [X1,X5] = X4
        g.set_bracket(1, 2, 3, Rational(1));  // [X2,X3] = X4
        out.push_back({"n6_12",
                       "6-dimensional nilpotent algebra; pair (w4, w6), type (2,0)", g, 4, 6,
                       2, 0});
    }
    {
        LieAlgebra g(6);
        g.set_bracket(0, 5, 4, Rational(1));  // [X1,X6] = X5
        g.set_bracket(0, 4, 3, Rational(1));  // [X1,X5] = X4
        g.set_bracket(0, 3, 2, Rational(1));  // [X1,X4] = X3
        g.set_bracket(4, 5, 1, Rational(1));  // [X5,X6] = X2
        out.push_back({"n6_13",
                       "6-dimensional nilpotent algebra; pair (w2, w3), type (1,1)", g, 2, 3,
                       1, 1});
    }
    return out;
}

inline const LieCatalogEntry& lie_catalog_lookup(const std::string& name) {
    static const std::vector<LieCatalogEntry> entries = lie_catalog();
    for (const auto& e : entries)
        if (e.name == name) return e;
    throw Error("unknown Lie algebra '" + name + "'");
}

}  // namespace cpair
