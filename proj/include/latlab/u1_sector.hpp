#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "latlab/entanglement.hpp"
#include "latlab/models.hpp"

namespace latlab {

/// The Gauss-law sector G_q = 0 (all q) of the U(1) chain. Every Gauss
/// generator is diagonal in the product basis and commutes with the
/// Hamiltonian, so this is an exactly invariant subspace: each basis state is
/// a fermion configuration with every link field fixed by the charges to its
/// left. This gives chains far beyond the full-space cap an exact ground
/// state, gap (within the sector), and entropy.
struct U1GaussSector {
    ModelSpec spec;
    std::vector<std::uint32_t> fermion_configs; ///< bit p = occupation of node p
    std::vector<std::vector<std::int64_t>> link_fields; ///< per config, E_0..E_{N-2}
    SparseHermitian h_sector;

    index_t dim() const { return static_cast<index_t>(fermion_configs.size()); }
};

namespace detail {

inline double u1_diag_energy(const ModelSpec& spec, std::uint32_t config,
                             const std::vector<std::int64_t>& fields) {
    const Couplings& c = spec.couplings;
    double e = 0.0;
    for (int p = 0; p < spec.num_nodes; ++p)
        if ((config >> p) & 1u) e += c.g_m * staggered_sign(static_cast<std::size_t>(p));
    for (const std::int64_t k : fields)
        e += c.g_e * static_cast<double>(k) * static_cast<double>(k);
    return e; // the Gauss penalty vanishes identically on the sector
}

} // namespace detail

/// Enumerates the sector with the prescribed Gauss eigenvalues (one per
/// node; empty means all zero) and builds the restricted Hamiltonian. The
/// field on link p is pinned to the partial sum of staggered charges plus
/// Gauss values, and the trailing generator fixes the total charge, so each
/// basis state is a single fermion configuration. Configurations whose
/// induced field exceeds the cutoff anywhere are excluded, exactly as the
/// truncated chain excludes them.
inline U1GaussSector u1_gauss_sector(const ModelSpec& spec,
                                     const std::vector<std::int64_t>& gauss_values = {}) {
    spec.validate();
    if (spec.family != ModelFamily::U1LGT)
        throw ContractViolation("u1_gauss_sector: U(1) only");
    if (spec.num_nodes > 28) throw CapExceeded("u1_gauss_sector: too many nodes");
    const int n = spec.num_nodes;
    const std::int64_t lam = spec.cutoff.twice() / 2;
    std::vector<std::int64_t> gv(static_cast<std::size_t>(n), 0);
    if (!gauss_values.empty()) {
        if (gauss_values.size() != static_cast<std::size_t>(n))
            throw ContractViolation("u1_gauss_sector: need one Gauss value per node");
        gv = gauss_values;
    }
    double penalty = 0.0;
    for (const std::int64_t g : gv)
        penalty += spec.couplings.lambda_g * static_cast<double>(g) * static_cast<double>(g);

    U1GaussSector sector;
    sector.spec = spec;
    std::map<std::uint32_t, index_t> index_of;
    for (std::uint32_t cfg = 0; cfg < (1u << n); ++cfg) {
        std::vector<std::int64_t> fields(static_cast<std::size_t>(std::max(0, n - 1)), 0);
        std::int64_t e = 0;
        bool ok = true;
        for (int p = 0; p < n; ++p) {
            const std::int64_t occ = (cfg >> p) & 1u;
            const std::int64_t rho =
                occ + static_cast<std::int64_t>(detail::staggered_offset(static_cast<std::size_t>(p)));
            e += rho + gv[static_cast<std::size_t>(p)];
            if (p <= n - 2) {
                if (std::abs(e) > lam) {
                    ok = false;
                    break;
                }
                fields[static_cast<std::size_t>(p)] = e;
            } else if (e != 0) {
                ok = false; // the trailing Gauss generator fixes the total
            }
        }
        if (!ok) continue;
        index_of[cfg] = sector.dim();
        sector.fermion_configs.push_back(cfg);
        sector.link_fields.push_back(std::move(fields));
    }
    if (sector.fermion_configs.empty())
        throw Error("u1_gauss_sector: empty sector (cutoff too small?)");

    std::vector<Entry> entries;
    for (index_t i = 0; i < sector.dim(); ++i) {
        const std::uint32_t cfg = sector.fermion_configs[static_cast<std::size_t>(i)];
        const auto& fields = sector.link_fields[static_cast<std::size_t>(i)];
        entries.push_back({i, i, detail::u1_diag_energy(spec, cfg, fields) + penalty});
        // hop p -> p+1 with the raising link keeps the sector invariant; both
        // directions are covered by Hermitian mirroring.
        for (int p = 0; p + 1 < n; ++p) {
            const bool occ_p = (cfg >> p) & 1u;
            const bool occ_q = (cfg >> (p + 1)) & 1u;
            if (occ_p || !occ_q) continue; // phi_p^dagger phi_{p+1} needs (0, 1)
            if (std::abs(fields[static_cast<std::size_t>(p)] + 1) > lam) continue;
            const std::uint32_t cfg2 = cfg ^ (1u << p) ^ (1u << (p + 1));
            const auto it = index_of.find(cfg2);
            if (it == index_of.end()) continue; // neighbor left the truncated sector
            // adjacent modes: the Jordan-Wigner string contributes no sign
            entries.push_back({it->second, i, spec.couplings.g_gm});
        }
    }
    sector.h_sector = SparseHermitian::build(sector.dim(), std::move(entries));
    return sector;
}

inline U1GaussSector u1_gauss_zero_sector(const ModelSpec& spec) {
    return u1_gauss_sector(spec);
}

/// Low-lying energies across the physical sector and every single-defect
/// Gauss sector: a validated stand-in for the unrestricted spectrum when the
/// full chain is too large to diagonalize directly.
struct SectorSpectrum {
    double eps0 = 0.0;           ///< physical-sector ground energy
    double gap_in_sector = 0.0;  ///< first excitation within the sector
    double defect_floor = 0.0;   ///< lowest single-defect energy minus eps0
    double gap = 0.0;            ///< min of the two
    StateVector psi0;            ///< physical-sector ground state
    U1GaussSector sector;        ///< the physical sector itself
};

inline SectorSpectrum u1_sector_spectrum(const ModelSpec& spec, const Caps& caps = Caps{}) {
    SectorSpectrum out;
    out.sector = u1_gauss_zero_sector(spec);
    const SpectrumSlice eig = dense_oracle(out.sector.h_sector, caps);
    out.eps0 = eig.eigenvalues[0];
    out.gap_in_sector = eig.eigenvalues.size() > 1
                            ? eig.eigenvalues[1] - eig.eigenvalues[0]
                            : std::numeric_limits<double>::infinity();
    out.psi0 = eig.eigenvectors[0];
    out.defect_floor = std::numeric_limits<double>::infinity();
    for (int q = 0; q < spec.num_nodes; ++q) {
        for (const std::int64_t sign : {+1, -1}) {
            std::vector<std::int64_t> gv(static_cast<std::size_t>(spec.num_nodes), 0);
            gv[static_cast<std::size_t>(q)] = sign;
            try {
                const U1GaussSector defect = u1_gauss_sector(spec, gv);
                const SpectrumSlice deig = dense_oracle(defect.h_sector, caps);
                out.defect_floor = std::min(out.defect_floor, deig.eigenvalues[0] - out.eps0);
            } catch (const Error&) {
                // an empty defect sector cannot host the first excitation
            }
        }
    }
    out.gap = std::min(out.gap_in_sector, out.defect_floor);
    return out;
}

/// Global composite index of one sector basis state in the full chain space.
inline index_t sector_global_index(const U1GaussSector& sector, index_t i,
                                   const ChainLayout& layout) {
    const std::vector<index_t> st = layout.strides();
    const std::uint32_t cfg = sector.fermion_configs[static_cast<std::size_t>(i)];
    const auto& fields = sector.link_fields[static_cast<std::size_t>(i)];
    const std::int64_t lam = sector.spec.cutoff.twice() / 2;
    index_t g = 0;
    for (int p = 0; p < sector.spec.num_nodes; ++p) {
        g += st[static_cast<std::size_t>(2 * p)] * (((cfg >> p) & 1u) ? 1 : 0);
        if (p <= sector.spec.num_nodes - 2)
            g += st[static_cast<std::size_t>(2 * p + 1)] *
                 (fields[static_cast<std::size_t>(p)] + lam);
    }
    return g;
}

/// Mid-cut Schmidt profile of a sector state, computed from its sparse
/// full-space representation: each sector basis state is one full-space
/// product state, so the coefficient matrix across the cut has one entry per
/// basis state. `cut_paper_sites` counts paper sites on the left; the cut
/// falls after that site's link.
inline SchmidtProfile sector_schmidt_cut(const U1GaussSector& sector, const StateVector& psi,
                                         int cut_paper_sites) {
    const int n = sector.spec.num_nodes;
    if (cut_paper_sites <= 0 || cut_paper_sites >= n)
        throw ContractViolation("sector_schmidt_cut: cut must be interior");
    if (psi.dim() != sector.dim())
        throw ContractViolation("sector_schmidt_cut: state dim mismatch");

    // Left label: (fermion bits 0..cut-1, fields 0..cut-1); right label: rest.
    // Distinct labels are indexed on the fly; the resulting matrix is tiny.
    std::map<std::pair<std::uint32_t, std::vector<std::int64_t>>, index_t> left_ix, right_ix;
    std::vector<std::pair<index_t, index_t>> pos(static_cast<std::size_t>(sector.dim()));
    for (index_t i = 0; i < sector.dim(); ++i) {
        const std::uint32_t cfg = sector.fermion_configs[static_cast<std::size_t>(i)];
        const auto& fields = sector.link_fields[static_cast<std::size_t>(i)];
        const std::uint32_t mask = (1u << cut_paper_sites) - 1u;
        std::vector<std::int64_t> lf(fields.begin(), fields.begin() + cut_paper_sites);
        std::vector<std::int64_t> rf(fields.begin() + cut_paper_sites, fields.end());
        auto [li, l_new] = left_ix.try_emplace({cfg & mask, std::move(lf)},
                                               static_cast<index_t>(left_ix.size()));
        auto [ri, r_new] = right_ix.try_emplace({cfg >> cut_paper_sites, std::move(rf)},
                                                static_cast<index_t>(right_ix.size()));
        pos[static_cast<std::size_t>(i)] = {li->second, ri->second};
    }
    DenseMatrix m(static_cast<index_t>(left_ix.size()), static_cast<index_t>(right_ix.size()));
    for (index_t i = 0; i < sector.dim(); ++i)
        m.at(pos[static_cast<std::size_t>(i)].first, pos[static_cast<std::size_t>(i)].second) +=
            psi.amp[static_cast<std::size_t>(i)];
    return detail::schmidt_from_matrix(m, false);
}

} // namespace latlab
