#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "latlab/dense.hpp"
#include "latlab/models.hpp"

namespace latlab {

/// A run of s consecutive paper sites (0-based ell .. ell+s-1) whose quantum
/// numbers get cut at lambda_in, inside a chain built at the reference cutoff
/// lambda_ref that stands in for the untruncated space.
struct Window {
    std::size_t ell = 0; ///< first window site
    int s = 1;           ///< window length in paper sites
    HalfInt lambda_in;
    HalfInt lambda_ref;

    void validate(int num_paper_sites) const {
        if (s <= 0 || ell + static_cast<std::size_t>(s) > static_cast<std::size_t>(num_paper_sites))
            throw ContractViolation("Window: window exceeds the chain");
        if (lambda_ref < lambda_in)
            throw ContractViolation("Window: lambda_in must not exceed lambda_ref");
    }
};

/// Product of the per-site quantum-number projectors over the window sites;
/// sites without a quantum number contribute the identity. Diagonal 0/1.
inline SparseHermitian window_projector(const ChainModel& model, const Window& window) {
    window.validate(model.spec.num_nodes);
    const ChainLayout& layout = model.layout;
    const std::vector<index_t> st = layout.strides();
    const index_t dim = model.hamiltonian.dim();
    const HalfIntInterval keep = HalfIntInterval::symmetric(window.lambda_in);

    std::vector<std::size_t> qn_sites;
    for (std::size_t p = window.ell; p < window.ell + static_cast<std::size_t>(window.s); ++p)
        if (model.qn_layout_site[p]) qn_sites.push_back(*model.qn_layout_site[p]);

    std::vector<double> diag(static_cast<std::size_t>(dim), 1.0);
    for (index_t i = 0; i < dim; ++i) {
        for (const std::size_t ls : qn_sites) {
            const index_t dig = layout.digit(i, ls, st);
            if (!keep.contains(layout.sites[ls].lambda[static_cast<std::size_t>(dig)])) {
                diag[static_cast<std::size_t>(i)] = 0.0;
                break;
            }
        }
    }
    return SparseHermitian::diagonal(diag);
}

/// Reindexing onto the image of a diagonal 0/1 projector. Restriction (as
/// opposed to sandwiching with the projector) keeps the spectrum free of
/// artificial zeros from the deleted states.
class Restriction {
public:
    explicit Restriction(const SparseHermitian& projector) {
        if (!projector.is_diagonal())
            throw ContractViolation("Restriction: projector must be diagonal");
        const std::vector<double> d = projector.diagonal_values();
        old_to_new_.assign(d.size(), -1);
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d[i] == 1.0) {
                old_to_new_[i] = static_cast<index_t>(kept_.size());
                kept_.push_back(static_cast<index_t>(i));
            } else if (d[i] != 0.0) {
                throw ContractViolation("Restriction: projector entries must be 0 or 1");
            }
        }
        if (kept_.empty()) throw ContractViolation("Restriction: projector has rank 0");
        full_dim_ = projector.dim();
    }

    index_t sub_dim() const { return static_cast<index_t>(kept_.size()); }
    index_t full_dim() const { return full_dim_; }
    const std::vector<index_t>& kept() const { return kept_; }

    /// The restriction of A to the image subspace, reindexed.
    SparseHermitian restrict_op(const SparseHermitian& a) const {
        if (a.dim() != full_dim_) throw ContractViolation("restrict_op: dimension mismatch");
        std::vector<Entry> ents;
        ents.reserve(a.nnz());
        for (const Entry& e : a.entries()) {
            const index_t r = old_to_new_[static_cast<std::size_t>(e.row)];
            const index_t c = old_to_new_[static_cast<std::size_t>(e.col)];
            if (r >= 0 && c >= 0) ents.push_back({r, c, e.val});
        }
        return SparseHermitian::build(sub_dim(), std::move(ents));
    }

    /// Zero-pads a subspace vector back into the full space.
    StateVector embed(const StateVector& sub) const {
        if (sub.dim() != sub_dim()) throw ContractViolation("embed: dimension mismatch");
        StateVector full(full_dim_);
        for (std::size_t i = 0; i < kept_.size(); ++i)
            full.amp[static_cast<std::size_t>(kept_[i])] = sub.amp[i];
        return full;
    }

private:
    std::vector<index_t> kept_;
    std::vector<index_t> old_to_new_;
    index_t full_dim_ = 0;
};

inline SparseHermitian restrict_operator(const SparseHermitian& a, const SparseHermitian& projector) {
    return Restriction(projector).restrict_op(a);
}

/// Result of the eigenvalue flattening A -> A P_t + ||A P_t|| (I - P_t).
struct SpectralTruncation {
    SparseHermitian op;
    bool nothing_below = false; ///< no eigenvalue was <= t; op is zero and outside the usual regime
    double kept_norm = 0.0;     ///< ||A P_t||
    index_t kept_count = 0;
};

/// Flattens every eigenvalue above `t` to ||A P_t||, keeping eigenvectors.
/// Exact early out when nothing lies above t. Needs a dense eigenbasis, so
/// the dimension must stay within the dense cap; callers may pass a cached
/// decomposition to avoid repeating it across a t-scan.
inline SpectralTruncation spectral_truncate(const SparseHermitian& a, double t,
                                            const Caps& caps = Caps{},
                                            const EigenDecomposition* precomputed = nullptr) {
    if (a.dim() > caps.dense_cap)
        throw CapExceeded("spectral_truncate: dim " + std::to_string(a.dim()) +
                          " exceeds dense cap");
    EigenDecomposition local;
    const EigenDecomposition* eig = precomputed;
    if (!eig) {
        local = hermitian_eig(DenseMatrix::from_sparse(a));
        eig = &local;
    }
    const index_t n = a.dim();
    index_t kept = 0;
    while (kept < n && eig->eigenvalues[static_cast<std::size_t>(kept)] <= t) ++kept;

    SpectralTruncation out;
    out.kept_count = kept;
    if (kept == n) {
        out.op = a; // entrywise identical, not just spectrally
        out.kept_norm = std::max(std::abs(eig->eigenvalues.front()), std::abs(eig->eigenvalues.back()));
        return out;
    }
    if (kept == 0) {
        out.nothing_below = true;
        out.op = SparseHermitian::zero(n);
        return out;
    }
    double c = 0.0;
    for (index_t i = 0; i < kept; ++i)
        c = std::max(c, std::abs(eig->eigenvalues[static_cast<std::size_t>(i)]));
    out.kept_norm = c;
    // A^{<=t} = c I + sum_{kept} (lambda_i - c) v_i v_i^dagger
    DenseMatrix b(n, n);
    for (index_t i = 0; i < n; ++i) b.at(i, i) = c;
    for (index_t i = 0; i < kept; ++i) {
        const double w = eig->eigenvalues[static_cast<std::size_t>(i)] - c;
        for (index_t r = 0; r < n; ++r) {
            const cplx vr = eig->eigenvectors.at(r, i);
            if (vr == cplx(0.0)) continue;
            for (index_t cc = 0; cc < n; ++cc)
                b.at(r, cc) += w * vr * std::conj(eig->eigenvectors.at(cc, i));
        }
    }
    out.op = b.to_hermitian_sparse(1e-9);
    return out;
}

/// H'' from the restricted named terms: the two boundary blocks are
/// spectrally flattened at t, the interior window terms pass through.
/// `terms` is ordered {L, W_1, ..., W_s, R}; every term must already be
/// shifted positive semi-definite.
struct DoublePrime {
    SparseHermitian op;
    SpectralTruncation left, right;
};

inline DoublePrime assemble_double_prime(const std::vector<SparseHermitian>& terms, double t,
                                         const Caps& caps = Caps{},
                                         const EigenDecomposition* left_eig = nullptr,
                                         const EigenDecomposition* right_eig = nullptr) {
    if (terms.size() < 4)
        throw ContractViolation("assemble_double_prime: need L, at least two window terms, R");
    const std::size_t s = terms.size() - 2;
    DoublePrime out;
    out.left = spectral_truncate(add(terms[0], terms[1]), t, caps, left_eig);
    out.right = spectral_truncate(add(terms[s], terms[s + 1]), t, caps, right_eig);
    std::vector<const SparseHermitian*> parts{&out.left.op, &out.right.op};
    for (std::size_t j = 2; j <= s - 1; ++j) parts.push_back(&terms[j]);
    out.op = sum(parts);
    return out;
}

/// delta_1 = ||(I - P')psi||, delta_2 = ||P' H (I - P')psi||, evaluated with
/// matvecs against the diagonal projector mask.
inline std::pair<double, double> truncation_errors(const SparseHermitian& h, const StateVector& psi,
                                                   const SparseHermitian& projector) {
    if (!projector.is_diagonal()) throw ContractViolation("truncation_errors: projector not diagonal");
    if (psi.dim() != h.dim() || psi.dim() != projector.dim())
        throw ContractViolation("truncation_errors: dimension mismatch");
    const std::vector<double> mask = projector.diagonal_values();
    StateVector outside(psi.dim());
    for (std::size_t i = 0; i < psi.amp.size(); ++i)
        outside.amp[i] = (1.0 - mask[i]) * psi.amp[i];
    const double delta1 = outside.norm();
    StateVector hw = h.apply(outside);
    for (std::size_t i = 0; i < hw.amp.size(); ++i) hw.amp[i] *= mask[i];
    return {delta1, hw.norm()};
}

/// Smallest cutoff on the grid satisfying
///   Lambda^(1-r) >= (2 lambda_bar)^(1-r) + c1 * log^2(s/delta) / gap
/// together with the energy cutoff
///   t = max(c_t * N(Lambda) * log(1/delta), c_t * N(Lambda)^2 / gap^2).
struct ScheduleResult {
    HalfInt lambda;
    double t;
    double threshold; ///< right-hand side the cutoff had to clear
};

inline ScheduleResult parameter_schedule(double gap, int s, double delta, double r,
                                         double lambda_bar,
                                         const std::function<double(HalfInt)>& norm_of_lambda,
                                         const std::vector<HalfInt>& grid,
                                         const BoundConstants& consts = BoundConstants{}) {
    if (gap <= 0) throw ContractViolation("parameter_schedule: gap must be positive");
    if (delta <= 0 || delta >= 1) throw ContractViolation("parameter_schedule: delta in (0,1)");
    if (r < 0 || r >= 1) throw ContractViolation("parameter_schedule: r in [0,1)");
    if (grid.empty()) throw ContractViolation("parameter_schedule: empty grid");
    const double lg = std::log(static_cast<double>(s) / delta);
    const double threshold =
        std::pow(2.0 * lambda_bar, 1.0 - r) + consts.c1 * lg * lg / gap;
    for (const HalfInt& lam : grid) {
        if (std::pow(lam.value(), 1.0 - r) >= threshold) {
            const double nl = norm_of_lambda(lam);
            const double t = std::max(consts.c_t * nl * std::log(1.0 / delta),
                                      consts.c_t * nl * nl / (gap * gap));
            return {lam, t, threshold};
        }
    }
    throw Error("parameter_schedule: grid exhausted; threshold " + std::to_string(threshold) +
                " not reached by largest cutoff " + grid.back().str());
}

/// One truncation experiment's numbers: error functionals, the three ground
/// energies and gaps, and the pairwise ground-state distances.
struct TruncationReport {
    HalfInt lambda_in;
    double t = 0.0;
    double delta1 = 0.0, delta2 = 0.0;
    double eps0 = 0.0, eps0_p = 0.0, eps0_pp = 0.0;
    double gap = 0.0, gap_p = 0.0, gap_pp = 0.0;
    double dist_0_p = 0.0;  ///< D(psi0, psi0')
    double dist_p_pp = 0.0; ///< D(psi0', psi0'')
    double dist_0_pp = 0.0; ///< D(psi0, psi0'')
    bool within_lemma_regime = false; ///< delta2/(1-delta1^2) <= gap/4 and all stages non-degenerate
    double lemma_ratio = 0.0;         ///< delta2/(1-delta1^2)
    bool degenerate = false;
    bool spectral_block_emptied = false;
    double shift_total = 0.0; ///< added to H by the positive semi-definite shifts
};

} // namespace latlab
