#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "latlab/sparse.hpp"

namespace latlab {

/// Row-major dense complex matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(index_t rows, index_t cols)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols), cplx(0.0)) {}

    static DenseMatrix identity(index_t n) {
        DenseMatrix m(n, n);
        for (index_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    static DenseMatrix from_sparse(const SparseHermitian& s) {
        DenseMatrix m(s.dim(), s.dim());
        for (const Entry& e : s.entries()) {
            m.at(e.row, e.col) += e.val;
            if (e.row != e.col) m.at(e.col, e.row) += std::conj(e.val);
        }
        return m;
    }

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }

    cplx& at(index_t r, index_t c) { return a_[static_cast<std::size_t>(r * cols_ + c)]; }
    const cplx& at(index_t r, index_t c) const {
        return a_[static_cast<std::size_t>(r * cols_ + c)];
    }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    DenseMatrix adjoint() const {
        DenseMatrix m(cols_, rows_);
        for (index_t r = 0; r < rows_; ++r)
            for (index_t c = 0; c < cols_; ++c) m.at(c, r) = std::conj(at(r, c));
        return m;
    }

    StateVector column(index_t c) const {
        StateVector v(rows_);
        for (index_t r = 0; r < rows_; ++r) v.amp[static_cast<std::size_t>(r)] = at(r, c);
        return v;
    }

    StateVector apply(const StateVector& x) const {
        if (x.dim() != cols_) throw ContractViolation("DenseMatrix::apply: dimension mismatch");
        StateVector y(rows_);
        for (index_t r = 0; r < rows_; ++r) {
            cplx s = 0.0;
            const cplx* row = &a_[static_cast<std::size_t>(r * cols_)];
            for (index_t c = 0; c < cols_; ++c) s += row[c] * x.amp[static_cast<std::size_t>(c)];
            y.amp[static_cast<std::size_t>(r)] = s;
        }
        return y;
    }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.cols_ != b.rows_) throw ContractViolation("DenseMatrix *: dimension mismatch");
        DenseMatrix c(a.rows_, b.cols_);
        for (index_t i = 0; i < a.rows_; ++i) {
            for (index_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a.at(i, k);
                if (aik == cplx(0.0)) continue;
                const cplx* brow = &b.a_[static_cast<std::size_t>(k * b.cols_)];
                cplx* crow = &c.a_[static_cast<std::size_t>(i * c.cols_)];
                for (index_t j = 0; j < b.cols_; ++j) crow[j] += aik * brow[j];
            }
        }
        return c;
    }

    /// Keeps every nonzero entry; intended for operators that are mostly full
    /// after a spectral transformation.
    SparseHermitian to_hermitian_sparse(double hermiticity_tol = 1e-11) const {
        if (rows_ != cols_) throw ContractViolation("to_hermitian_sparse: not square");
        std::vector<Entry> upper;
        upper.reserve(static_cast<std::size_t>(rows_) * (static_cast<std::size_t>(rows_) + 1) / 2);
        double scale = 0.0;
        for (const cplx& z : a_) scale = std::max(scale, std::abs(z));
        for (index_t r = 0; r < rows_; ++r) {
            for (index_t c = r; c < cols_; ++c) {
                const cplx up = at(r, c);
                const cplx lo = std::conj(at(c, r));
                if (std::abs(up - lo) > hermiticity_tol * std::max(1.0, scale))
                    throw ContractViolation("to_hermitian_sparse: matrix is not Hermitian");
                const cplx v = 0.5 * (up + lo);
                if (v != cplx(0.0)) upper.push_back({r, c, v});
            }
        }
        return SparseHermitian::build(rows_, std::move(upper), hermiticity_tol);
    }

private:
    index_t rows_ = 0, cols_ = 0;
    std::vector<cplx> a_;
};

// ---------------------------------------------------------------------------
// Symmetric tridiagonal QL with implicit shifts
// ---------------------------------------------------------------------------

namespace detail {

/// Diagonalizes the symmetric tridiagonal (d, e) in place; d returns the
/// eigenvalues. Every plane rotation is reported to `rot(i, c, s)` so the
/// caller can accumulate eigenvectors in whatever scalar type it uses.
template <class RotSink>
void tridiag_ql(std::vector<double>& d, std::vector<double>& e, RotSink&& rot) {
    const std::size_t n = d.size();
    if (n == 0) return;
    if (e.size() + 1 != n) throw ContractViolation("tridiag_ql: bad off-diagonal length");
    std::vector<double> ee(n, 0.0);
    std::copy(e.begin(), e.end(), ee.begin());

    // Running absolute deflation floor: inside a numerical kernel block the
    // relative test alone never fires, so couplings at the level of
    // eps * (overall scale) must also count as zero.
    double floor_b = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        floor_b = std::max(floor_b, std::numeric_limits<double>::epsilon() *
                                        (std::abs(d[l]) + std::abs(ee[l])));
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(ee[m]) <=
                    std::max(std::numeric_limits<double>::epsilon() * dd, floor_b))
                    break;
            }
            if (m != l) {
                if (iter++ == 64)
                    throw ConvergenceFailure("tridiag_ql: too many iterations", {ee[l]});
                double g = (d[l + 1] - d[l]) / (2.0 * ee[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + ee[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t ii = m; ii-- > l;) {
                    double f = s * ee[ii];
                    const double b = c * ee[ii];
                    r = std::hypot(f, g);
                    ee[ii + 1] = r;
                    if (r == 0.0) {
                        d[ii + 1] -= p;
                        ee[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[ii + 1] - p;
                    r = (d[ii] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[ii + 1] = g + p;
                    g = c * r - b;
                    rot(ii, c, s);
                }
                if (underflow) continue;
                d[l] -= p;
                ee[l] = g;
                ee[m] = 0.0;
            }
        } while (m != l);
    }
    std::copy(ee.begin(), ee.begin() + static_cast<std::ptrdiff_t>(n - 1), e.begin());
}

} // namespace detail

struct EigenDecomposition {
    std::vector<double> eigenvalues; ///< ascending
    DenseMatrix eigenvectors;        ///< column i pairs with eigenvalues[i]
};

/// Full eigendecomposition of a Hermitian matrix: Householder reduction to a
/// real symmetric tridiagonal followed by implicit-shift QL, accumulating the
/// unitary transform throughout. No external solver involved.
inline EigenDecomposition hermitian_eig(DenseMatrix a) {
    const index_t n = a.rows();
    if (n != a.cols()) throw ContractViolation("hermitian_eig: not square");
    if (n == 0) return {{}, DenseMatrix(0, 0)};

    DenseMatrix q = DenseMatrix::identity(n);
    std::vector<cplx> sub(static_cast<std::size_t>(std::max<index_t>(n - 1, 0)), cplx(0.0));

    std::vector<cplx> v(static_cast<std::size_t>(n));
    std::vector<cplx> p(static_cast<std::size_t>(n));
    std::vector<cplx> w(static_cast<std::size_t>(n));
    std::vector<cplx> u(static_cast<std::size_t>(n));

    for (index_t k = 0; k + 2 < n; ++k) {
        const index_t m = n - k - 1; // length of the column below the diagonal
        // Scale the column first: reflectors are scale-invariant in v, and
        // without this, denormal residues in rank-deficient trailing blocks
        // drive tau to infinity.
        double col_scale = 0.0;
        for (index_t i = 0; i < m; ++i) {
            const cplx z = a.at(k + 1 + i, k);
            col_scale = std::max({col_scale, std::abs(z.real()), std::abs(z.imag())});
        }
        if (col_scale == 0.0) {
            sub[static_cast<std::size_t>(k)] = 0.0;
            continue;
        }
        for (index_t i = 0; i < m; ++i)
            v[static_cast<std::size_t>(i)] = a.at(k + 1 + i, k) / col_scale;
        const cplx alpha_s = v[0];
        double tail2 = 0.0;
        for (index_t i = 1; i < m; ++i) tail2 += std::norm(v[static_cast<std::size_t>(i)]);
        if (tail2 == 0.0) {
            // Column already reduced.
            sub[static_cast<std::size_t>(k)] = a.at(k + 1, k);
            continue;
        }
        const double xnorm_s = std::sqrt(tail2 + std::norm(alpha_s));
        const cplx phase = alpha_s == cplx(0.0) ? cplx(1.0) : alpha_s / std::abs(alpha_s);
        const cplx beta = -phase * xnorm_s * col_scale;

        // Scaled Householder vector with H x = beta e_1, H = I - tau v v^dagger.
        v[0] += phase * xnorm_s;
        double vnorm2 = 0.0;
        for (index_t i = 0; i < m; ++i) vnorm2 += std::norm(v[static_cast<std::size_t>(i)]);
        const double tau = 2.0 / vnorm2;

        // Rank-2 update of the trailing Hermitian block B = A[k+1.., k+1..]:
        // p = tau B v;  w = p - (tau/2)(v^dagger p) v;  B -= v w^dagger + w v^dagger.
        for (index_t i = 0; i < m; ++i) {
            cplx s = 0.0;
            for (index_t j = 0; j < m; ++j) s += a.at(k + 1 + i, k + 1 + j) * v[static_cast<std::size_t>(j)];
            p[static_cast<std::size_t>(i)] = tau * s;
        }
        cplx vp = 0.0;
        for (index_t i = 0; i < m; ++i)
            vp += std::conj(v[static_cast<std::size_t>(i)]) * p[static_cast<std::size_t>(i)];
        const cplx kappa = 0.5 * tau * vp;
        for (index_t i = 0; i < m; ++i)
            w[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)] - kappa * v[static_cast<std::size_t>(i)];
        for (index_t i = 0; i < m; ++i) {
            const cplx vi = v[static_cast<std::size_t>(i)];
            const cplx wi = w[static_cast<std::size_t>(i)];
            for (index_t j = 0; j < m; ++j) {
                a.at(k + 1 + i, k + 1 + j) -= vi * std::conj(w[static_cast<std::size_t>(j)]) +
                                              wi * std::conj(v[static_cast<std::size_t>(j)]);
            }
        }
        sub[static_cast<std::size_t>(k)] = beta;
        for (index_t i = 1; i < m; ++i) a.at(k + 1 + i, k) = 0.0;

        // Q <- Q (I - tau v v^dagger) on columns k+1..n-1.
        for (index_t i = 0; i < n; ++i) {
            cplx s = 0.0;
            for (index_t j = 0; j < m; ++j) s += q.at(i, k + 1 + j) * v[static_cast<std::size_t>(j)];
            u[static_cast<std::size_t>(i)] = tau * s;
        }
        for (index_t i = 0; i < n; ++i) {
            const cplx ui = u[static_cast<std::size_t>(i)];
            for (index_t j = 0; j < m; ++j)
                q.at(i, k + 1 + j) -= ui * std::conj(v[static_cast<std::size_t>(j)]);
        }
    }
    if (n >= 2) sub[static_cast<std::size_t>(n - 2)] = a.at(n - 1, n - 2);

    // Make the subdiagonal real and non-negative by a diagonal phase change,
    // absorbed into Q.
    std::vector<double> d(static_cast<std::size_t>(n));
    std::vector<double> e(static_cast<std::size_t>(std::max<index_t>(n - 1, 0)));
    for (index_t i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = a.at(i, i).real();
    cplx phase_acc = 1.0;
    for (index_t k = 0; k + 1 < n; ++k) {
        const cplx s = sub[static_cast<std::size_t>(k)];
        const double mag = std::abs(s);
        e[static_cast<std::size_t>(k)] = mag;
        const cplx ph = mag == 0.0 ? cplx(1.0) : s / mag;
        phase_acc *= ph;
        for (index_t i = 0; i < n; ++i) q.at(i, k + 1) *= phase_acc;
    }

    detail::tridiag_ql(d, e, [&](std::size_t i, double c, double s) {
        for (index_t r = 0; r < n; ++r) {
            const cplx f = q.at(r, static_cast<index_t>(i) + 1);
            q.at(r, static_cast<index_t>(i) + 1) = s * q.at(r, static_cast<index_t>(i)) + c * f;
            q.at(r, static_cast<index_t>(i)) = c * q.at(r, static_cast<index_t>(i)) - s * f;
        }
    });

    // Sort ascending, permuting columns accordingly.
    std::vector<index_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), index_t(0));
    std::sort(order.begin(), order.end(), [&](index_t x, index_t y) {
        return d[static_cast<std::size_t>(x)] < d[static_cast<std::size_t>(y)];
    });
    EigenDecomposition out;
    out.eigenvalues.resize(static_cast<std::size_t>(n));
    out.eigenvectors = DenseMatrix(n, n);
    for (index_t c = 0; c < n; ++c) {
        out.eigenvalues[static_cast<std::size_t>(c)] = d[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])];
        for (index_t r = 0; r < n; ++r)
            out.eigenvectors.at(r, c) = q.at(r, order[static_cast<std::size_t>(c)]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Spectrum slices and the dense oracle
// ---------------------------------------------------------------------------

/// A consecutive run of eigenpairs, ascending, with explicit residual norms.
struct SpectrumSlice {
    std::vector<double> eigenvalues;
    std::vector<StateVector> eigenvectors;
    std::vector<double> residuals; ///< ||A v - lambda v|| per pair
};

/// Full spectrum of a sparse Hermitian operator by dense eigendecomposition.
/// Ground-truth reference for everything iterative; refuses above the cap.
inline SpectrumSlice dense_oracle(const SparseHermitian& a, const Caps& caps = Caps{}) {
    if (a.dim() > caps.dense_cap)
        throw CapExceeded("dense_oracle: dim " + std::to_string(a.dim()) +
                          " exceeds dense cap " + std::to_string(caps.dense_cap));
    EigenDecomposition eig = hermitian_eig(DenseMatrix::from_sparse(a));
    SpectrumSlice out;
    out.eigenvalues = eig.eigenvalues;
    const index_t n = a.dim();
    out.eigenvectors.reserve(static_cast<std::size_t>(n));
    out.residuals.reserve(static_cast<std::size_t>(n));
    for (index_t c = 0; c < n; ++c) {
        StateVector v = eig.eigenvectors.column(c);
        StateVector av = a.apply(v);
        axpy(av, -eig.eigenvalues[static_cast<std::size_t>(c)], v);
        out.residuals.push_back(av.norm());
        out.eigenvectors.push_back(std::move(v));
    }
    return out;
}

} // namespace latlab
