#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "latlab/dense.hpp"
#include "latlab/hilbert.hpp"

namespace latlab {

/// Schmidt data of a pure state across one cut. Coefficients are the squared
/// Schmidt values (they sum to 1), non-increasing. Entropy is base 2.
struct SchmidtProfile {
    index_t cut_left_dim = 0;
    index_t cut_right_dim = 0;
    std::vector<double> coefficients;       ///< lambda_i, non-increasing, sum 1
    double entropy = 0.0;                   ///< -sum lambda log2 lambda
    std::vector<StateVector> left_vectors;  ///< orthonormal, paired with coefficients

    double tail(std::size_t v) const {
        double s = 0.0;
        for (std::size_t i = v; i < coefficients.size(); ++i) s += coefficients[i];
        return s;
    }

    /// Number of Schmidt values (sqrt of coefficients) above eps * largest.
    std::size_t rank_eps(double eps) const {
        if (coefficients.empty()) return 0;
        const double top = std::sqrt(coefficients.front());
        std::size_t r = 0;
        for (const double c : coefficients)
            if (std::sqrt(c) > eps * top) ++r;
        return r;
    }
};

inline double entropy_of_coefficients(const std::vector<double>& lam) {
    double s = 0.0;
    for (const double l : lam)
        if (l > 0.0) s -= l * std::log2(l);
    return s;
}

namespace detail {

/// Schmidt profile from an explicit coefficient matrix m[left, right],
/// via the reduced density matrix on the smaller side.
inline SchmidtProfile schmidt_from_matrix(const DenseMatrix& m, bool want_left_vectors) {
    const index_t dl = m.rows(), dr = m.cols();
    SchmidtProfile prof;
    prof.cut_left_dim = dl;
    prof.cut_right_dim = dr;

    const bool left_smaller = dl <= dr;
    const index_t ds = left_smaller ? dl : dr;
    DenseMatrix rho(ds, ds);
    for (index_t i = 0; i < ds; ++i) {
        for (index_t j = i; j < ds; ++j) {
            cplx s = 0.0;
            if (left_smaller) {
                for (index_t k = 0; k < dr; ++k) s += m.at(i, k) * std::conj(m.at(j, k));
            } else {
                for (index_t k = 0; k < dl; ++k) s += std::conj(m.at(k, i)) * m.at(k, j);
            }
            rho.at(i, j) = s;
            rho.at(j, i) = std::conj(s);
        }
    }
    EigenDecomposition eig = hermitian_eig(std::move(rho));

    std::vector<std::pair<double, index_t>> lam;
    for (index_t i = 0; i < ds; ++i)
        lam.push_back({std::max(0.0, eig.eigenvalues[static_cast<std::size_t>(i)]), i});
    std::sort(lam.begin(), lam.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    for (const auto& [l, idx] : lam) prof.coefficients.push_back(l);
    prof.entropy = entropy_of_coefficients(prof.coefficients);

    if (want_left_vectors) {
        for (const auto& [l, idx] : lam) {
            if (left_smaller) {
                prof.left_vectors.push_back(eig.eigenvectors.column(idx));
            } else if (l > 1e-14) {
                // left vector = M y / sqrt(lambda)
                StateVector x(dl);
                for (index_t r = 0; r < dl; ++r) {
                    cplx s = 0.0;
                    for (index_t c = 0; c < dr; ++c) s += m.at(r, c) * eig.eigenvectors.at(c, idx);
                    x.amp[static_cast<std::size_t>(r)] = s / std::sqrt(l);
                }
                prof.left_vectors.push_back(std::move(x));
            }
        }
    }
    return prof;
}

} // namespace detail

/// Cut a chain state after `cut_sites` layout sites and return its Schmidt
/// data. The state must be normalized.
inline SchmidtProfile schmidt_cut(const StateVector& psi, const ChainLayout& layout,
                                  std::size_t cut_sites, bool want_left_vectors = true) {
    if (cut_sites == 0 || cut_sites >= layout.sites.size())
        throw ContractViolation("schmidt_cut: cut must be interior");
    if (!psi.is_normalized(1e-10))
        throw ContractViolation("schmidt_cut: state must be normalized");
    index_t dl = 1, dr = 1;
    for (std::size_t s = 0; s < cut_sites; ++s) dl *= layout.sites[s].dim();
    for (std::size_t s = cut_sites; s < layout.sites.size(); ++s) dr *= layout.sites[s].dim();
    if (dl * dr != psi.dim()) throw ContractViolation("schmidt_cut: layout does not match state");
    DenseMatrix m(dl, dr);
    for (index_t i = 0; i < dl; ++i)
        for (index_t j = 0; j < dr; ++j) m.at(i, j) = psi.amp[static_cast<std::size_t>(i * dr + j)];
    return detail::schmidt_from_matrix(m, want_left_vectors);
}

/// Tail weight above the first `v` Schmidt coefficients.
inline double schmidt_tail(const SchmidtProfile& prof, std::size_t v) { return prof.tail(v); }

/// How far psi sticks out of span(basis) x (everything): the expectation of
/// the complementary projector on the left factor. Basis must be orthonormal.
inline double viability(const std::vector<StateVector>& basis, const StateVector& psi,
                        index_t left_dim) {
    if (left_dim <= 0 || psi.dim() % left_dim != 0)
        throw ContractViolation("viability: left_dim does not divide the state dimension");
    const index_t right_dim = psi.dim() / left_dim;
    for (std::size_t a = 0; a < basis.size(); ++a) {
        if (basis[a].dim() != left_dim) throw ContractViolation("viability: basis dim mismatch");
        for (std::size_t b = 0; b <= a; ++b) {
            const cplx ov = inner(basis[a], basis[b]);
            const cplx want = a == b ? cplx(1.0) : cplx(0.0);
            if (std::abs(ov - want) > 1e-10)
                throw ContractViolation("viability: basis is not orthonormal");
        }
    }
    double kept = 0.0;
    for (const StateVector& v : basis) {
        for (index_t j = 0; j < right_dim; ++j) {
            cplx s = 0.0;
            for (index_t i = 0; i < left_dim; ++i)
                s += std::conj(v.amp[static_cast<std::size_t>(i)]) *
                     psi.amp[static_cast<std::size_t>(i * right_dim + j)];
            kept += std::norm(s);
        }
    }
    return std::max(0.0, psi.norm2() - kept);
}

/// Number of operator-Schmidt values of K across the (dl, dr) cut that
/// exceed eps * (largest), from the SVD of the cut-reshuffled dense matrix.
inline std::size_t operator_schmidt_rank_eps(const DenseMatrix& kd, index_t dl, index_t dr,
                                             double eps, const Caps& caps = Caps{}) {
    if (kd.rows() != kd.cols() || kd.rows() != dl * dr)
        throw ContractViolation("operator_schmidt_rank_eps: cut does not match the operator");
    if (kd.rows() > caps.op_svd_cap)
        throw CapExceeded("operator_schmidt_rank_eps: dim " + std::to_string(kd.rows()) +
                          " exceeds the operator-SVD cap " + std::to_string(caps.op_svd_cap));

    // Reshuffle K[(il ir),(jl jr)] -> R[(il jl),(ir jr)].
    DenseMatrix r(dl * dl, dr * dr);
    for (index_t il = 0; il < dl; ++il)
        for (index_t ir = 0; ir < dr; ++ir)
            for (index_t jl = 0; jl < dl; ++jl)
                for (index_t jr = 0; jr < dr; ++jr)
                    r.at(il * dl + jl, ir * dr + jr) = kd.at(il * dr + ir, jl * dr + jr);

    // Singular values from the smaller Gram matrix.
    const index_t rows = r.rows(), cols = r.cols();
    const bool rows_smaller = rows <= cols;
    const index_t ds = rows_smaller ? rows : cols;
    DenseMatrix gram(ds, ds);
    for (index_t i = 0; i < ds; ++i)
        for (index_t j = i; j < ds; ++j) {
            cplx s = 0.0;
            if (rows_smaller)
                for (index_t c = 0; c < cols; ++c) s += r.at(i, c) * std::conj(r.at(j, c));
            else
                for (index_t c = 0; c < rows; ++c) s += std::conj(r.at(c, i)) * r.at(c, j);
            gram.at(i, j) = s;
            gram.at(j, i) = std::conj(s);
        }
    EigenDecomposition eig = hermitian_eig(std::move(gram));
    double top = 0.0;
    for (const double v : eig.eigenvalues) top = std::max(top, v);
    if (top <= 0.0) return 0;
    // Gram eigenvalues below dim * eps * top are numerically zero singular
    // values; without the floor they would alias to sqrt(eps)-sized values.
    const double zero_floor = static_cast<double>(ds) * 1e-15 * top;
    std::size_t count = 0;
    for (const double v : eig.eigenvalues)
        if (v > zero_floor && std::sqrt(v) > eps * std::sqrt(top)) ++count;
    return count;
}

inline std::size_t operator_schmidt_rank_eps(const SparseHermitian& k, const ChainLayout& layout,
                                             std::size_t cut_sites, double eps,
                                             const Caps& caps = Caps{}) {
    if (cut_sites == 0 || cut_sites >= layout.sites.size())
        throw ContractViolation("operator_schmidt_rank_eps: cut must be interior");
    index_t dl = 1, dr = 1;
    for (std::size_t s = 0; s < cut_sites; ++s) dl *= layout.sites[s].dim();
    for (std::size_t s = cut_sites; s < layout.sites.size(); ++s) dr *= layout.sites[s].dim();
    if (dl * dr != k.dim())
        throw ContractViolation("operator_schmidt_rank_eps: layout does not match operator");
    if (k.dim() > caps.op_svd_cap)
        throw CapExceeded("operator_schmidt_rank_eps: dim " + std::to_string(k.dim()) +
                          " exceeds the operator-SVD cap " + std::to_string(caps.op_svd_cap));
    return operator_schmidt_rank_eps(DenseMatrix::from_sparse(k), dl, dr, eps, caps);
}

} // namespace latlab
