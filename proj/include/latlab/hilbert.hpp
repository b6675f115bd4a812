#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "latlab/halfint.hpp"
#include "latlab/opalg.hpp"
#include "latlab/sparse.hpp"

namespace latlab {

enum class SiteKind { U1Link, SU2Link, BosonMode, FermionModes };

inline const char* to_string(SiteKind k) {
    switch (k) {
        case SiteKind::U1Link: return "U1Link";
        case SiteKind::SU2Link: return "SU2Link";
        case SiteKind::BosonMode: return "BosonMode";
        case SiteKind::FermionModes: return "FermionModes";
    }
    return "?";
}

/// One lattice site's finite basis after a cutoff, together with the
/// quantum-number eigenvalue attached to each basis label.
struct LocalSite {
    SiteKind kind = SiteKind::FermionModes;
    HalfInt cutoff;                        ///< Lambda; 0 for fermion sites
    int fermion_mode_count = 0;            ///< only for FermionModes
    std::vector<std::string> basis_labels; ///< one per basis state
    std::vector<HalfInt> lambda;           ///< quantum number per basis state
    std::vector<std::array<HalfInt, 3>> su2_jmm; ///< (j, m, m') per state; SU2Link only

    index_t dim() const { return static_cast<index_t>(basis_labels.size()); }
};

/// Gauge-link site in the electric basis: |k>, k = -Lambda..Lambda, with the
/// field value k as the local quantum number.
inline LocalSite u1_link_site(std::int64_t cutoff) {
    if (cutoff < 0) throw ContractViolation("u1_link_site: cutoff must be >= 0");
    LocalSite s;
    s.kind = SiteKind::U1Link;
    s.cutoff = HalfInt::from_int(cutoff);
    for (std::int64_t k = -cutoff; k <= cutoff; ++k) {
        s.basis_labels.push_back("k=" + std::to_string(k));
        s.lambda.push_back(HalfInt::from_int(k));
    }
    return s;
}

/// Bosonic mode truncated at occupation `cutoff`; quantum number is the
/// occupation itself.
inline LocalSite boson_site(std::int64_t cutoff) {
    if (cutoff < 0) throw ContractViolation("boson_site: cutoff must be >= 0");
    LocalSite s;
    s.kind = SiteKind::BosonMode;
    s.cutoff = HalfInt::from_int(cutoff);
    for (std::int64_t n = 0; n <= cutoff; ++n) {
        s.basis_labels.push_back("n=" + std::to_string(n));
        s.lambda.push_back(HalfInt::from_int(n));
    }
    return s;
}

/// Rigid-rotator link truncated by total angular momentum j <= Lambda
/// (inclusive). Basis |j m m'>, blocks ascending in j, lexicographic (m, m')
/// within a block; the quantum number is j.
inline LocalSite su2_link_site(HalfInt cutoff) {
    if (cutoff.twice() < 0) throw ContractViolation("su2_link_site: cutoff must be >= 0");
    LocalSite s;
    s.kind = SiteKind::SU2Link;
    s.cutoff = cutoff;
    for (std::int64_t tj = 0; tj <= cutoff.twice(); ++tj) {
        const HalfInt j = HalfInt::from_twice(tj);
        for (std::int64_t tm = -tj; tm <= tj; tm += 2) {
            for (std::int64_t tmp = -tj; tmp <= tj; tmp += 2) {
                const HalfInt m = HalfInt::from_twice(tm), mp = HalfInt::from_twice(tmp);
                s.basis_labels.push_back("j=" + j.str() + ",m=" + m.str() + ",m'=" + mp.str());
                s.lambda.push_back(j);
                s.su2_jmm.push_back({j, m, mp});
            }
        }
    }
    return s;
}

/// `count` fermionic modes on one site (dim 2^count). Fermion sites carry no
/// quantum number. Within-site mode 0 is the most significant occupation bit.
inline LocalSite fermion_site(int count) {
    if (count < 1 || count > 20) throw ContractViolation("fermion_site: bad mode count");
    LocalSite s;
    s.kind = SiteKind::FermionModes;
    s.cutoff = HalfInt::from_int(0);
    s.fermion_mode_count = count;
    const index_t d = index_t(1) << count;
    for (index_t n = 0; n < d; ++n) {
        std::string bits;
        for (int b = count - 1; b >= 0; --b) bits += ((n >> b) & 1) ? '1' : '0';
        s.basis_labels.push_back("f=" + bits);
        s.lambda.push_back(HalfInt::from_int(0));
    }
    return s;
}

/// Diagonal operator with the site's quantum-number eigenvalues.
inline SparseHermitian quantum_number_operator(const LocalSite& site) {
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(site.dim()));
    for (const HalfInt& l : site.lambda) d.push_back(l.value());
    return SparseHermitian::diagonal(d);
}

/// Spectral projector onto basis states whose quantum number satisfies the
/// predicate. Diagonal 0/1 and hence idempotent by construction.
inline SparseHermitian site_projector(const LocalSite& site,
                                      const std::function<bool(HalfInt)>& keep) {
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(site.dim()));
    for (const HalfInt& l : site.lambda) d.push_back(keep(l) ? 1.0 : 0.0);
    return SparseHermitian::diagonal(d);
}

inline SparseHermitian site_projector(const LocalSite& site, HalfIntInterval window) {
    return site_projector(site, [window](HalfInt l) { return window.contains(l); });
}

// ---------------------------------------------------------------------------
// Chains
// ---------------------------------------------------------------------------

/// Position of one fermionic mode: which site, and which mode within it.
struct FermionModeRef {
    std::size_t site;
    int mode;
};

/// An ordered line of sites plus the global ordering of fermionic modes that
/// fixes the Jordan-Wigner string. Site 0 is the most significant factor of
/// the composite index.
struct ChainLayout {
    std::vector<LocalSite> sites;
    std::vector<FermionModeRef> fermion_order;

    std::size_t num_sites() const { return sites.size(); }

    index_t total_dim(const Caps& caps = Caps{}) const {
        index_t d = 1;
        for (const LocalSite& s : sites) {
            if (d > caps.sparse_cap / s.dim()) {
                std::string rep;
                for (const LocalSite& t : sites)
                    rep += (rep.empty() ? "" : " x ") + std::to_string(t.dim());
                throw CapExceeded("ChainLayout: total dimension " + rep + " exceeds sparse cap " +
                                  std::to_string(caps.sparse_cap));
            }
            d *= s.dim();
        }
        return d;
    }

    /// stride[s]: index step of site s's digit (site 0 most significant).
    std::vector<index_t> strides() const {
        std::vector<index_t> st(sites.size(), 1);
        for (std::size_t s = sites.size(); s-- > 1;)
            st[s - 1] = st[s] * sites[s].dim();
        return st;
    }

    index_t digit(index_t global_index, std::size_t site, const std::vector<index_t>& st) const {
        return (global_index / st[site]) % sites[site].dim();
    }
};

/// I x ... x A x ... x I with A at position `site`.
inline SparseHermitian lift_to_chain(const ChainLayout& layout, std::size_t site,
                                     const SparseHermitian& a, const Caps& caps = Caps{}) {
    if (site >= layout.sites.size()) throw ContractViolation("lift_to_chain: bad site index");
    if (a.dim() != layout.sites[site].dim())
        throw ContractViolation("lift_to_chain: operator dim does not match site dim");
    std::vector<SparseHermitian> factors;
    factors.reserve(layout.sites.size());
    for (std::size_t s = 0; s < layout.sites.size(); ++s)
        factors.push_back(s == site ? a : SparseHermitian::identity(layout.sites[s].dim()));
    return kron_compose(factors, caps);
}

/// Tensor product over the whole chain with the given per-site factors;
/// missing sites default to the identity. The workhorse for second-quantized
/// strings before they are hermitized.
inline GeneralSparse chain_product_op(const ChainLayout& layout,
                                      const std::vector<std::pair<std::size_t, GeneralSparse>>& factors) {
    std::vector<const GeneralSparse*> per_site(layout.sites.size(), nullptr);
    for (const auto& [s, op] : factors) {
        if (s >= layout.sites.size()) throw ContractViolation("chain_product_op: bad site");
        if (op.dim() != layout.sites[s].dim())
            throw ContractViolation("chain_product_op: factor dim mismatch");
        per_site[s] = &op;
    }
    GeneralSparse acc = GeneralSparse::identity(1);
    for (std::size_t s = 0; s < layout.sites.size(); ++s) {
        if (per_site[s])
            acc = acc.kron(*per_site[s]);
        else
            acc = acc.kron(GeneralSparse::identity(layout.sites[s].dim()));
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Fermionic operators (Jordan-Wigner)
// ---------------------------------------------------------------------------

namespace fermion {

/// Local operator on a FermionModes(m) site: Z on the modes in `z_mask`,
/// and optionally a raising/lowering factor at one mode.
/// action: 0 none, -1 annihilate, +1 create.
inline GeneralSparse local_op(int m, unsigned z_mask, int action_mode, int action) {
    GeneralSparse acc = GeneralSparse::identity(1);
    for (int k = 0; k < m; ++k) {
        GeneralSparse f = GeneralSparse::identity(2);
        const bool z_here = (z_mask >> k) & 1u;
        if (k == action_mode && action != 0) {
            // basis |0>, |1>; annihilation |0><1|, creation |1><0|. The string
            // never lands on the action mode itself.
            std::vector<Entry> e;
            if (action < 0)
                e.push_back({0, 1, 1.0});
            else
                e.push_back({1, 0, 1.0});
            f = GeneralSparse(2, std::move(e));
        } else if (z_here) {
            f = GeneralSparse(2, {{0, 0, 1.0}, {1, 1, -1.0}});
        }
        acc = acc.kron(f);
    }
    return acc;
}

/// Chain-level annihilation operator for fermion_order[mode_index], with the
/// full Jordan-Wigner string over all earlier modes.
inline GeneralSparse annihilation(const ChainLayout& layout, std::size_t mode_index) {
    if (mode_index >= layout.fermion_order.size())
        throw ContractViolation("fermion::annihilation: bad mode index");
    // Per site: which of its modes carry a Z (earlier in the global order),
    // and whether the target mode lives there.
    std::vector<unsigned> z_mask(layout.sites.size(), 0u);
    for (std::size_t i = 0; i < mode_index; ++i) {
        const FermionModeRef& r = layout.fermion_order[i];
        z_mask[r.site] |= 1u << r.mode;
    }
    const FermionModeRef target = layout.fermion_order[mode_index];
    std::vector<std::pair<std::size_t, GeneralSparse>> factors;
    for (std::size_t s = 0; s < layout.sites.size(); ++s) {
        const LocalSite& site = layout.sites[s];
        if (site.kind != SiteKind::FermionModes) continue;
        const bool has_target = s == target.site;
        if (z_mask[s] == 0u && !has_target) continue;
        factors.emplace_back(s, local_op(site.fermion_mode_count, z_mask[s],
                                         has_target ? target.mode : -1, has_target ? -1 : 0));
    }
    return chain_product_op(layout, factors);
}

} // namespace fermion

} // namespace latlab
