#pragma once

#include <cmath>
#include <vector>

#include "latlab/lanczos.hpp"
#include "latlab/models.hpp"

namespace latlab {

/// Decomposition H = H_W + H_R at one site: H_W collects the terms that
/// change the site's quantum number, H_R everything else.
struct WalkPreserveSplit {
    std::size_t paper_site = 0;
    SparseHermitian h_w, h_r;
    double measured_chi = 0.0; ///< max over cutoffs of ||H_W P_cutoff|| / (cutoff+1)^r
    double declared_r = 0.0;
};

/// Numerical check of a claimed split against the three conditions:
/// exact decomposition, |quantum number change| <= 1 on H_W, and no change at
/// all on H_R. All three are entrywise statements for diagonal quantum
/// numbers, so the violations returned are exact maxima over stored entries.
struct SplitCheck {
    double decomposition_error = 0.0;
    double walk_range_violation = 0.0; ///< largest |entry| of H_W with |d lambda| > 1
    double preserve_violation = 0.0;   ///< largest |entry| of H_R with d lambda != 0
    bool ok(double tol = 1e-12) const {
        return decomposition_error <= tol && walk_range_violation <= tol &&
               preserve_violation <= tol;
    }
};

inline SplitCheck check_split(const ChainModel& model, std::size_t paper_site,
                              const SparseHermitian& h_w, const SparseHermitian& h_r) {
    SplitCheck out;
    out.decomposition_error = add(h_w, h_r).max_abs_diff(model.hamiltonian);
    if (!model.qn_layout_site[paper_site]) {
        // No quantum number: only the decomposition itself is checkable, and
        // any nonzero H_W would change a number that does not exist.
        for (const Entry& e : h_w.entries())
            out.walk_range_violation = std::max(out.walk_range_violation, std::abs(e.val));
        return out;
    }
    const std::size_t ls = *model.qn_layout_site[paper_site];
    const std::vector<index_t> st = model.layout.strides();
    const LocalSite& site = model.layout.sites[ls];
    auto lam_twice = [&](index_t global) {
        return site.lambda[static_cast<std::size_t>(model.layout.digit(global, ls, st))].twice();
    };
    for (const Entry& e : h_w.entries()) {
        const std::int64_t d = std::abs(lam_twice(e.row) - lam_twice(e.col));
        if (d > 2) out.walk_range_violation = std::max(out.walk_range_violation, std::abs(e.val));
    }
    for (const Entry& e : h_r.entries()) {
        if (lam_twice(e.row) != lam_twice(e.col))
            out.preserve_violation = std::max(out.preserve_violation, std::abs(e.val));
    }
    return out;
}

namespace detail {

/// ||A P|| for a Hermitian block operator and diagonal projector on the same
/// block, via the top eigenvalue of P A^2 P.
inline double norm_times_projector(const SparseHermitian& a, const SparseHermitian& proj) {
    const GeneralSparse ga = GeneralSparse::from_hermitian(a);
    const GeneralSparse gp = GeneralSparse::from_hermitian(proj);
    const SparseHermitian m = (gp * ga * ga * gp).as_hermitian(1e-9);
    if (m.nnz() == 0) return 0.0;
    if (m.dim() <= 600) {
        const EigenDecomposition eig = hermitian_eig(DenseMatrix::from_sparse(m));
        return std::sqrt(std::max(0.0, eig.eigenvalues.back()));
    }
    const SpectrumSlice top = lanczos_extremal(m.scaled(-1.0), 1, 1e-9, 3000, 12345);
    return std::sqrt(std::max(0.0, -top.eigenvalues[0]));
}

/// Projector onto |lambda| <= cutoff on the block factor `which` of a piece
/// support block, identity on the other factors.
inline SparseHermitian block_window_projector(const ChainLayout& layout, std::size_t s0,
                                              std::size_t count, std::size_t qn_site,
                                              HalfInt cutoff) {
    std::vector<SparseHermitian> f;
    const HalfIntInterval keep = HalfIntInterval::symmetric(cutoff);
    for (std::size_t s = s0; s < s0 + count; ++s) {
        if (s == qn_site)
            f.push_back(site_projector(layout.sites[s], keep));
        else
            f.push_back(SparseHermitian::identity(layout.sites[s].dim()));
    }
    return kron_compose(f);
}

} // namespace detail

/// Builds and verifies the walk/preserve split at one paper site. The split
/// assigns the gauge-matter hop (or the boson-fermion coupling) at that site
/// to H_W; everything else preserves the site's quantum number. Throws if the
/// built model violates any of the three conditions, since that would be a
/// construction bug rather than a property of the model.
inline WalkPreserveSplit walk_preserve_split(const ChainModel& model, std::size_t paper_site) {
    if (paper_site >= static_cast<std::size_t>(model.spec.num_nodes))
        throw ContractViolation("walk_preserve_split: bad site");
    const PieceRole walk_role = model.spec.family == ModelFamily::HubbardHolstein
                                    ? PieceRole::BosonCoupling
                                    : PieceRole::Hop;
    WalkPreserveSplit out;
    out.paper_site = paper_site;
    out.declared_r = model.spec.family == ModelFamily::HubbardHolstein ? 0.5 : 0.0;

    std::vector<const SparseHermitian*> walk, rest;
    const Piece* walk_piece = nullptr;
    for (const Piece& pc : model.pieces) {
        if (pc.role == walk_role && pc.paper_site == paper_site) {
            walk.push_back(&pc.lifted);
            walk_piece = &pc;
        } else {
            rest.push_back(&pc.lifted);
        }
    }
    const index_t dim = model.hamiltonian.dim();
    out.h_w = walk.empty() ? SparseHermitian::zero(dim) : sum(walk);
    out.h_r = rest.empty() ? SparseHermitian::zero(dim) : sum(rest);

    const SplitCheck check = check_split(model, paper_site, out.h_w, out.h_r);
    if (!check.ok(1e-12))
        throw Error("walk_preserve_split: built model violates the split conditions");

    if (walk_piece && model.qn_layout_site[paper_site]) {
        const std::size_t qn = *model.qn_layout_site[paper_site];
        const std::int64_t step = model.spec.family == ModelFamily::SU2LGT ? 1 : 2;
        for (std::int64_t tw = 0; tw <= model.spec.cutoff.twice(); tw += step) {
            const HalfInt cut = HalfInt::from_twice(tw);
            const SparseHermitian proj = detail::block_window_projector(
                model.layout, walk_piece->support_first, walk_piece->support_count, qn, cut);
            const double nrm = detail::norm_times_projector(walk_piece->local, proj);
            const double weight = std::pow(cut.value() + 1.0, out.declared_r);
            out.measured_chi = std::max(out.measured_chi, nrm / weight);
        }
    }
    return out;
}

/// One row of the locality audit: cutoff, truncated site dimension, and the
/// truncated norm of the worst local term.
struct AssumptionRow {
    HalfInt lambda;
    index_t local_dim = 0;
    double truncated_norm = 0.0;
};

/// Tabulates d(Lambda) and N(Lambda) = max_p ||t_p P^(p)_Lambda|| over a
/// cutoff list, with the projector acting on the quantum-number factor of
/// paper site p inside the term's support block.
inline std::vector<AssumptionRow> verify_assumption1(const ChainModel& model,
                                                     const std::vector<HalfInt>& lambdas,
                                                     const Caps& caps = Caps{}) {
    std::vector<AssumptionRow> rows;
    const ChainLayout& layout = model.layout;
    const int n = model.spec.num_nodes;

    for (const HalfInt& lam : lambdas) {
        AssumptionRow row;
        row.lambda = lam;
        // truncated one-site dimension: fermion factor times cut carrier
        index_t qn_dim = 1;
        switch (model.spec.family) {
            case ModelFamily::U1LGT: qn_dim = u1_link_site(lam.twice() / 2).dim(); break;
            case ModelFamily::SU2LGT: qn_dim = su2_link_site(lam).dim(); break;
            case ModelFamily::HubbardHolstein: qn_dim = boson_site(lam.twice() / 2).dim(); break;
        }
        row.local_dim = layout.sites[0].dim() * qn_dim;

        for (int p = 0; p < n; ++p) {
            // union support block of the term's pieces
            std::size_t b0 = layout.sites.size(), b1 = 0;
            bool any = false;
            for (const Piece& pc : model.pieces) {
                if (pc.term != p) continue;
                any = true;
                b0 = std::min(b0, pc.support_first);
                b1 = std::max(b1, pc.support_first + pc.support_count);
            }
            if (!any) continue;
            std::vector<const SparseHermitian*> embedded;
            std::vector<SparseHermitian> storage;
            storage.reserve(8);
            for (const Piece& pc : model.pieces) {
                if (pc.term != p) continue;
                storage.push_back(detail::embed_in_block(layout, pc.support_first,
                                                         pc.support_count, pc.local, b0, b1 - b0,
                                                         caps));
            }
            for (const SparseHermitian& s : storage) embedded.push_back(&s);
            const SparseHermitian t_block = sum(embedded);
            const std::optional<std::size_t> qn = model.qn_layout_site[static_cast<std::size_t>(p)];
            SparseHermitian proj =
                qn && *qn >= b0 && *qn < b1
                    ? detail::block_window_projector(layout, b0, b1 - b0, *qn, lam)
                    : SparseHermitian::identity(t_block.dim());
            row.truncated_norm =
                std::max(row.truncated_norm, detail::norm_times_projector(t_block, proj));
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace latlab
