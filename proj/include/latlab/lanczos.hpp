#pragma once

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "latlab/dense.hpp"
#include "latlab/rng.hpp"
#include "latlab/sparse.hpp"

namespace latlab {

namespace detail {

/// Eigenvalues of a symmetric tridiagonal plus, per eigenvalue, the last row
/// of the eigenvector matrix (enough for Lanczos residual estimates).
inline void tridiag_eig_lastrow(std::vector<double> d, std::vector<double> e,
                                std::vector<double>& values, std::vector<double>& last_row) {
    const std::size_t m = d.size();
    std::vector<double> row(m, 0.0);
    row[m - 1] = 1.0;
    tridiag_ql(d, e, [&](std::size_t i, double c, double s) {
        const double f = row[i + 1];
        row[i + 1] = s * row[i] + c * f;
        row[i] = c * row[i] - s * f;
    });
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    values.resize(m);
    last_row.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        values[i] = d[order[i]];
        last_row[i] = row[order[i]];
    }
}

/// Full eigendecomposition of a symmetric tridiagonal (real eigenvectors).
inline void tridiag_eig_full(std::vector<double> d, std::vector<double> e,
                             std::vector<double>& values, std::vector<std::vector<double>>& vecs) {
    const std::size_t m = d.size();
    std::vector<std::vector<double>> z(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) z[i][i] = 1.0;
    tridiag_ql(d, e, [&](std::size_t i, double c, double s) {
        for (std::size_t r = 0; r < m; ++r) {
            const double f = z[r][i + 1];
            z[r][i + 1] = s * z[r][i] + c * f;
            z[r][i] = c * z[r][i] - s * f;
        }
    });
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    values.resize(m);
    vecs.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t c = 0; c < m; ++c) {
        values[c] = d[order[c]];
        for (std::size_t r = 0; r < m; ++r) vecs[c][r] = z[r][order[c]];
    }
}

} // namespace detail

/// Lowest-k eigenpairs by the Lanczos iteration with full reorthogonalization
/// and a seeded start vector. Exhausted Krylov subspaces (lucky breakdowns)
/// are continued with a fresh random direction, so repeated eigenvalues are
/// found with their multiplicity up to k. Throws ConvergenceFailure with the
/// best residuals if max_iter Krylov vectors do not suffice.
inline SpectrumSlice lanczos_extremal(const SparseHermitian& a, int k, double tol, int max_iter,
                                      std::uint64_t seed) {
    const index_t n = a.dim();
    if (k < 1) throw ContractViolation("lanczos_extremal: k must be >= 1");
    if (static_cast<index_t>(k) > n) throw ContractViolation("lanczos_extremal: k exceeds dim");
    if (tol <= 0) throw ContractViolation("lanczos_extremal: tol must be positive");

    Rng rng(seed);
    const std::size_t m_max = static_cast<std::size_t>(std::min<index_t>(n, max_iter));

    std::vector<StateVector> q; // orthonormal Krylov basis
    q.reserve(m_max);
    std::vector<double> alpha, beta; // beta[j] couples q[j] and q[j+1]

    auto orthogonalize = [&](StateVector& w) {
        for (int pass = 0; pass < 2; ++pass)
            for (const StateVector& qi : q) axpy(w, -inner(qi, w), qi);
    };

    auto fresh_direction = [&]() -> bool {
        // Restart direction for breakdowns; false when the space is exhausted.
        for (int attempt = 0; attempt < 32; ++attempt) {
            StateVector w = StateVector::random(n, rng);
            orthogonalize(w);
            const double nw = w.norm();
            if (nw > 1e-8) {
                scale(w, 1.0 / nw);
                q.push_back(std::move(w));
                return true;
            }
        }
        return false;
    };

    q.push_back(StateVector::random(n, rng));

    double breakdown_scale = 1.0;
    std::vector<double> ritz, last_row;
    std::vector<double> best_residuals;

    // Inner estimates use half the tolerance so the explicit residual check
    // at the end has headroom for assembly rounding.
    auto estimate_converged = [&](double beta_next) -> bool {
        detail::tridiag_eig_lastrow(alpha, beta, ritz, last_row);
        best_residuals.assign(static_cast<std::size_t>(k), 0.0);
        bool ok = true;
        for (int i = 0; i < k; ++i) {
            const double est = std::abs(beta_next * last_row[static_cast<std::size_t>(i)]);
            best_residuals[static_cast<std::size_t>(i)] = est;
            if (est > 0.5 * tol) ok = false;
        }
        return ok;
    };

    StateVector w(n);
    bool converged = false;
    // Small residual estimates alone do not certify the k-th eigenvalue: a
    // Krylov block converged on an invariant subspace can hide a degenerate
    // copy below it. Acceptance therefore requires the lowest Ritz values to
    // stay put after more of the space has been explored (extra steps, or a
    // fresh block after a breakdown).
    std::vector<double> candidate;
    std::size_t recheck_at = 0;
    while (q.size() <= m_max) {
        const std::size_t j = q.size() - 1;
        a.apply(q[j], w);
        const double aj = inner(q[j], w).real();
        alpha.push_back(aj);
        breakdown_scale = std::max({breakdown_scale, std::abs(aj)});
        orthogonalize(w);
        const double bj = w.norm();
        breakdown_scale = std::max(breakdown_scale, bj);

        const bool breakdown = bj <= 1e-13 * breakdown_scale;
        const bool space_full = q.size() == static_cast<std::size_t>(n);
        const bool enough = alpha.size() >= static_cast<std::size_t>(k);
        const bool check_now =
            enough && (space_full || breakdown || alpha.size() % 4 == 0 || q.size() == m_max ||
                       (!candidate.empty() && alpha.size() >= recheck_at));
        if (check_now && estimate_converged(bj)) {
            if (space_full) {
                converged = true;
                break;
            }
            std::vector<double> current(ritz.begin(), ritz.begin() + k);
            const double drift_tol = std::max(10.0 * tol, 1e-12 * breakdown_scale);
            if (candidate.empty()) {
                candidate = current;
                recheck_at = alpha.size() + static_cast<std::size_t>(k) + 4;
            } else {
                double drift = 0.0;
                for (int i = 0; i < k; ++i)
                    drift = std::max(drift, std::abs(current[static_cast<std::size_t>(i)] -
                                                     candidate[static_cast<std::size_t>(i)]));
                if (drift <= drift_tol && (alpha.size() >= recheck_at || breakdown)) {
                    converged = true;
                    break;
                }
                if (drift > drift_tol) {
                    candidate = current;
                    recheck_at = alpha.size() + static_cast<std::size_t>(k) + 4;
                }
            }
        }
        if (q.size() == m_max) break;

        if (breakdown) {
            // Invariant subspace found; continue in its orthogonal complement.
            if (!fresh_direction()) {
                converged = true; // whole space spanned, Ritz data exact
                break;
            }
            beta.push_back(0.0);
        } else {
            scale(w, 1.0 / bj);
            beta.push_back(bj);
            q.push_back(w);
        }
    }

    // Assemble Ritz pairs from the final basis.
    std::vector<double> values;
    std::vector<std::vector<double>> z;
    detail::tridiag_eig_full(alpha, beta, values, z);

    SpectrumSlice out;
    const std::size_t m = alpha.size();
    for (int i = 0; i < k; ++i) {
        StateVector x(n);
        for (std::size_t jj = 0; jj < m; ++jj)
            axpy(x, z[static_cast<std::size_t>(i)][jj], q[jj]);
        x.normalize();
        out.eigenvectors.push_back(std::move(x));
        out.eigenvalues.push_back(values[static_cast<std::size_t>(i)]);
    }
    // Pairwise orthonormalization guards against drift in degenerate clusters.
    for (std::size_t i = 0; i < out.eigenvectors.size(); ++i) {
        for (std::size_t l = 0; l < i; ++l)
            axpy(out.eigenvectors[i], -inner(out.eigenvectors[l], out.eigenvectors[i]),
                 out.eigenvectors[l]);
        out.eigenvectors[i].normalize();
    }
    double worst = 0.0;
    for (int i = 0; i < k; ++i) {
        StateVector r = a.apply(out.eigenvectors[static_cast<std::size_t>(i)]);
        axpy(r, -out.eigenvalues[static_cast<std::size_t>(i)], out.eigenvectors[static_cast<std::size_t>(i)]);
        const double res = r.norm();
        out.residuals.push_back(res);
        worst = std::max(worst, res);
    }
    (void)converged;
    if (worst > tol) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "lanczos_extremal: worst residual %.3e above tol %.3e after %zu iterations",
                      worst, tol, m);
        throw ConvergenceFailure(msg, out.residuals);
    }
    return out;
}

} // namespace latlab
