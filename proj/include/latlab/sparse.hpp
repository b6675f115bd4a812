#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "latlab/config.hpp"
#include "latlab/errors.hpp"
#include "latlab/rng.hpp"

namespace latlab {

using cplx = std::complex<double>;
using index_t = std::int64_t;

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

/// Dense complex vector of amplitudes.
struct StateVector {
    std::vector<cplx> amp;

    StateVector() = default;
    explicit StateVector(index_t dim) : amp(static_cast<std::size_t>(dim), cplx(0.0)) {}
    explicit StateVector(std::vector<cplx> a) : amp(std::move(a)) {}

    index_t dim() const { return static_cast<index_t>(amp.size()); }

    double norm2() const {
        double s = 0.0;
        for (const cplx& z : amp) s += std::norm(z);
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }

    StateVector& normalize() {
        const double n = norm();
        if (n == 0.0) throw ContractViolation("cannot normalize the zero vector");
        for (cplx& z : amp) z /= n;
        return *this;
    }
    bool is_normalized(double tol = 1e-12) const { return std::abs(norm() - 1.0) <= tol; }

    /// Standard basis vector e_i.
    static StateVector basis(index_t dim, index_t i) {
        StateVector v(dim);
        v.amp[static_cast<std::size_t>(i)] = 1.0;
        return v;
    }

    /// Normalized random vector with i.i.d. complex normal entries.
    static StateVector random(index_t dim, Rng& rng) {
        StateVector v(dim);
        for (cplx& z : v.amp) z = rng.normal_complex();
        return v.normalize();
    }
};

/// <a|b> with the conjugate on the left argument.
inline cplx inner(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw ContractViolation("inner: dimension mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.amp.size(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
    return s;
}

inline StateVector& axpy(StateVector& y, cplx alpha, const StateVector& x) {
    if (y.dim() != x.dim()) throw ContractViolation("axpy: dimension mismatch");
    for (std::size_t i = 0; i < y.amp.size(); ++i) y.amp[i] += alpha * x.amp[i];
    return y;
}

inline void scale(StateVector& v, cplx alpha) {
    for (cplx& z : v.amp) z *= alpha;
}

/// Distance between pure states up to global phase: sqrt(1 - |<a|b>|^2).
inline double trace_distance(const StateVector& a, const StateVector& b) {
    const double ov = std::abs(inner(a, b));
    return std::sqrt(std::max(0.0, 1.0 - ov * ov));
}

// ---------------------------------------------------------------------------
// SparseHermitian
// ---------------------------------------------------------------------------

struct Entry {
    index_t row, col;
    cplx val;
};

/// Sparse self-adjoint operator. Only the upper triangle (row <= col) is
/// stored; the conjugate mirror is implied, so every instance is Hermitian
/// by construction. Entries are kept sorted by (row, col) with no duplicates,
/// which makes equality checks and sums canonical.
class SparseHermitian {
public:
    SparseHermitian() = default;

    /// Builds from coordinate entries where each mirrored pair appears ONCE,
    /// in either triangle: lower-triangle input is folded onto the upper
    /// triangle via the conjugate mirror and duplicates are accumulated.
    /// Passing both (r,c,v) and (c,r,conj v) therefore double-counts; use
    /// GeneralSparse::as_hermitian for full-matrix input.
    static SparseHermitian build(index_t dim, std::vector<Entry> raw,
                                 double hermiticity_tol = 1e-12) {
        if (dim <= 0) throw ContractViolation("SparseHermitian: dim must be positive");
        for (Entry& e : raw) {
            if (e.row < 0 || e.col < 0 || e.row >= dim || e.col >= dim)
                throw ContractViolation("SparseHermitian: entry index out of range");
            if (e.row > e.col) {
                std::swap(e.row, e.col);
                e.val = std::conj(e.val);
            }
        }
        std::sort(raw.begin(), raw.end(), [](const Entry& a, const Entry& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        std::vector<Entry> folded;
        folded.reserve(raw.size());
        for (const Entry& e : raw) {
            if (!folded.empty() && folded.back().row == e.row && folded.back().col == e.col)
                folded.back().val += e.val;
            else
                folded.push_back(e);
        }
        std::vector<Entry> kept;
        kept.reserve(folded.size());
        double scale = 0.0;
        for (const Entry& e : folded) scale = std::max(scale, std::abs(e.val));
        for (Entry& e : folded) {
            if (e.row == e.col) {
                if (std::abs(e.val.imag()) > hermiticity_tol * std::max(1.0, scale))
                    throw ContractViolation("SparseHermitian: non-real diagonal entry");
                e.val = cplx(e.val.real(), 0.0);
            }
            if (e.val != cplx(0.0)) kept.push_back(e);
        }
        SparseHermitian a;
        a.dim_ = dim;
        a.entries_ = std::move(kept);
        return a;
    }

    static SparseHermitian zero(index_t dim) { return build(dim, {}); }

    static SparseHermitian identity(index_t dim) {
        std::vector<Entry> e;
        e.reserve(static_cast<std::size_t>(dim));
        for (index_t i = 0; i < dim; ++i) e.push_back({i, i, 1.0});
        return build(dim, std::move(e));
    }

    static SparseHermitian diagonal(const std::vector<double>& d) {
        std::vector<Entry> e;
        e.reserve(d.size());
        for (index_t i = 0; i < static_cast<index_t>(d.size()); ++i)
            e.push_back({i, i, d[static_cast<std::size_t>(i)]});
        return build(static_cast<index_t>(d.size()), std::move(e));
    }

    index_t dim() const { return dim_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t nnz() const { return entries_.size(); }

    bool is_diagonal() const {
        for (const Entry& e : entries_)
            if (e.row != e.col) return false;
        return true;
    }

    /// Diagonal as a real vector (includes implicit zeros).
    std::vector<double> diagonal_values() const {
        std::vector<double> d(static_cast<std::size_t>(dim_), 0.0);
        for (const Entry& e : entries_)
            if (e.row == e.col) d[static_cast<std::size_t>(e.row)] = e.val.real();
        return d;
    }

    /// y = A x, expanding the implicit lower triangle.
    void apply(const StateVector& x, StateVector& y) const {
        if (x.dim() != dim_) throw ContractViolation("apply: dimension mismatch");
        if (y.dim() != dim_) y = StateVector(dim_);
        else std::fill(y.amp.begin(), y.amp.end(), cplx(0.0));
        for (const Entry& e : entries_) {
            y.amp[static_cast<std::size_t>(e.row)] += e.val * x.amp[static_cast<std::size_t>(e.col)];
            if (e.row != e.col)
                y.amp[static_cast<std::size_t>(e.col)] +=
                    std::conj(e.val) * x.amp[static_cast<std::size_t>(e.row)];
        }
    }

    StateVector apply(const StateVector& x) const {
        StateVector y(dim_);
        apply(x, y);
        return y;
    }

    SparseHermitian scaled(double f) const {
        std::vector<Entry> e = entries_;
        for (Entry& x : e) x.val *= f;
        return build(dim_, std::move(e));
    }

    /// A + shift * I.
    SparseHermitian shifted(double shift) const {
        std::vector<Entry> e = entries_;
        for (index_t i = 0; i < dim_; ++i) e.push_back({i, i, shift});
        return build(dim_, std::move(e));
    }

    /// Upper bound on the largest eigenvalue from Gershgorin discs
    /// (off-diagonal radii count both triangles).
    double gershgorin_upper() const {
        std::vector<double> diag(static_cast<std::size_t>(dim_), 0.0);
        std::vector<double> radius(static_cast<std::size_t>(dim_), 0.0);
        for (const Entry& e : entries_) {
            if (e.row == e.col) {
                diag[static_cast<std::size_t>(e.row)] += e.val.real();
            } else {
                const double a = std::abs(e.val);
                radius[static_cast<std::size_t>(e.row)] += a;
                radius[static_cast<std::size_t>(e.col)] += a;
            }
        }
        double hi = -std::numeric_limits<double>::infinity();
        for (index_t i = 0; i < dim_; ++i)
            hi = std::max(hi, diag[static_cast<std::size_t>(i)] + radius[static_cast<std::size_t>(i)]);
        return hi;
    }

    double gershgorin_lower() const {
        return -scaled(-1.0).gershgorin_upper();
    }

    /// Largest |entry| difference against another operator of the same dim.
    double max_abs_diff(const SparseHermitian& other) const {
        if (dim_ != other.dim_) throw ContractViolation("max_abs_diff: dimension mismatch");
        double m = 0.0;
        std::size_t i = 0, j = 0;
        const auto& a = entries_;
        const auto& b = other.entries_;
        auto key = [](const Entry& e) { return std::pair<index_t, index_t>(e.row, e.col); };
        while (i < a.size() || j < b.size()) {
            if (j >= b.size() || (i < a.size() && key(a[i]) < key(b[j]))) {
                m = std::max(m, std::abs(a[i].val));
                ++i;
            } else if (i >= a.size() || key(b[j]) < key(a[i])) {
                m = std::max(m, std::abs(b[j].val));
                ++j;
            } else {
                m = std::max(m, std::abs(a[i].val - b[j].val));
                ++i;
                ++j;
            }
        }
        return m;
    }

private:
    index_t dim_ = 0;
    std::vector<Entry> entries_;
};

/// Sum of operators on a common space.
inline SparseHermitian sum(const std::vector<const SparseHermitian*>& terms) {
    if (terms.empty()) throw ContractViolation("sum: no terms");
    const index_t dim = terms.front()->dim();
    std::vector<Entry> all;
    std::size_t total = 0;
    for (const auto* t : terms) total += t->nnz();
    all.reserve(total);
    for (const auto* t : terms) {
        if (t->dim() != dim) throw ContractViolation("sum: dimension mismatch");
        all.insert(all.end(), t->entries().begin(), t->entries().end());
    }
    return SparseHermitian::build(dim, std::move(all));
}

inline SparseHermitian sum(const std::vector<SparseHermitian>& terms) {
    std::vector<const SparseHermitian*> p;
    p.reserve(terms.size());
    for (const auto& t : terms) p.push_back(&t);
    return sum(p);
}

inline SparseHermitian add(const SparseHermitian& a, const SparseHermitian& b) {
    return sum(std::vector<const SparseHermitian*>{&a, &b});
}

// ---------------------------------------------------------------------------
// Kronecker composition
// ---------------------------------------------------------------------------

namespace detail {

/// Full coordinate list including the mirrored lower triangle.
inline std::vector<Entry> full_entries(const SparseHermitian& a) {
    std::vector<Entry> out;
    out.reserve(2 * a.nnz());
    for (const Entry& e : a.entries()) {
        out.push_back(e);
        if (e.row != e.col) out.push_back({e.col, e.row, std::conj(e.val)});
    }
    return out;
}

} // namespace detail

/// Tensor product of the factors, first factor most significant:
/// index = i_0 * (d_1 * d_2 * ...) + i_1 * (d_2 * ...) + ...
/// Refuses if the product dimension exceeds `caps.sparse_cap`.
inline SparseHermitian kron_compose(const std::vector<const SparseHermitian*>& factors,
                                    const Caps& caps = Caps{}) {
    if (factors.empty()) throw ContractViolation("kron_compose: no factors");
    index_t dim = 1;
    std::string size_report;
    for (const auto* f : factors) {
        if (f->dim() < 1) throw ContractViolation("kron_compose: factor with dim < 1");
        if (dim > caps.sparse_cap / f->dim()) {
            for (const auto* g : factors)
                size_report += (size_report.empty() ? "" : " x ") + std::to_string(g->dim());
            throw CapExceeded("kron_compose: product dimension " + size_report +
                              " exceeds sparse cap " + std::to_string(caps.sparse_cap));
        }
        dim *= f->dim();
    }
    // Fold factors left to right over full coordinate lists.
    std::vector<Entry> acc{{0, 0, 1.0}};
    index_t acc_dim = 1;
    for (const auto* f : factors) {
        const std::vector<Entry> fe = detail::full_entries(*f);
        std::vector<Entry> next;
        next.reserve(acc.size() * fe.size());
        for (const Entry& a : acc)
            for (const Entry& b : fe)
                next.push_back({a.row * f->dim() + b.row, a.col * f->dim() + b.col, a.val * b.val});
        acc = std::move(next);
        acc_dim *= f->dim();
    }
    std::vector<Entry> upper;
    upper.reserve(acc.size() / 2 + 1);
    for (const Entry& e : acc)
        if (e.row <= e.col) upper.push_back(e);
    (void)acc_dim;
    return SparseHermitian::build(dim, std::move(upper));
}

inline SparseHermitian kron_compose(const std::vector<SparseHermitian>& factors,
                                    const Caps& caps = Caps{}) {
    std::vector<const SparseHermitian*> p;
    p.reserve(factors.size());
    for (const auto& f : factors) p.push_back(&f);
    return kron_compose(p, caps);
}

} // namespace latlab
