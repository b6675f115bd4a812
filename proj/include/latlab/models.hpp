#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "latlab/hilbert.hpp"
#include "latlab/lanczos.hpp"
#include "latlab/su2.hpp"

namespace latlab {

enum class ModelFamily { HubbardHolstein, U1LGT, SU2LGT };

inline const char* to_string(ModelFamily f) {
    switch (f) {
        case ModelFamily::HubbardHolstein: return "hubbard_holstein";
        case ModelFamily::U1LGT: return "u1_lgt";
        case ModelFamily::SU2LGT: return "su2_lgt";
    }
    return "?";
}

inline ModelFamily model_family_from_string(const std::string& s) {
    if (s == "hubbard_holstein") return ModelFamily::HubbardHolstein;
    if (s == "u1_lgt") return ModelFamily::U1LGT;
    if (s == "su2_lgt") return ModelFamily::SU2LGT;
    throw ContractViolation("unknown model family: " + s);
}

struct Couplings {
    // lattice gauge theories
    double g_m = 1.0;
    double g_gm = 1.0;
    double g_e = 1.0;
    double lambda_g = 1.0; ///< Gauss-law penalty weight (U(1) only)
    // Hubbard-Holstein
    double t_hop = 1.0;
    double u_hub = 1.0;
    double g = 1.0;
    double omega0 = 1.0;
};

/// A named model instance: family, chain length in nodes, per-site cutoff,
/// couplings. Boundaries are open.
struct ModelSpec {
    ModelFamily family = ModelFamily::U1LGT;
    int num_nodes = 2;
    HalfInt cutoff = HalfInt::from_int(1);
    Couplings couplings;

    void validate() const {
        if (num_nodes < 1) throw ContractViolation("ModelSpec: num_nodes must be >= 1");
        if (cutoff.twice() < 0) throw ContractViolation("ModelSpec: cutoff must be >= 0");
        auto finite = [](double x) { return std::isfinite(x); };
        if (!finite(couplings.g_m) || !finite(couplings.g_gm) || !finite(couplings.g_e) ||
            !finite(couplings.lambda_g) || !finite(couplings.t_hop) || !finite(couplings.u_hub) ||
            !finite(couplings.g) || !finite(couplings.omega0))
            throw ContractViolation("ModelSpec: couplings must be finite");
        if (family != ModelFamily::HubbardHolstein && couplings.g_e <= 0)
            throw ContractViolation("ModelSpec: g_e must be positive for gauge theories");
        if (family == ModelFamily::HubbardHolstein && couplings.omega0 <= 0)
            throw ContractViolation("ModelSpec: omega0 must be positive");
        if (family == ModelFamily::SU2LGT && num_nodes >= 2 && cutoff.twice() < 1)
            throw ContractViolation("ModelSpec: SU(2) links need cutoff >= 1/2");
        if (family != ModelFamily::SU2LGT && !cutoff.is_integer())
            throw ContractViolation("ModelSpec: integer cutoff required");
    }
};

enum class PieceRole { Mass, Hop, Electric, GaussPenalty, BosonEnergy, BosonCoupling, HubbardU };

/// One primitive summand of the Hamiltonian, kept both as a local operator on
/// its contiguous support block and lifted to the chain.
struct Piece {
    int term = 0;                ///< geometric term index p; t_p couples paper sites p, p+1
    std::size_t paper_site = 0;  ///< site whose quantum number the piece modifies or lives on
    PieceRole role = PieceRole::Mass;
    std::size_t support_first = 0; ///< first layout site of the support block
    std::size_t support_count = 1;
    SparseHermitian local;  ///< on the support block
    SparseHermitian lifted; ///< on the whole chain
};

/// A built model: layout, primitive pieces, their sum, and bookkeeping that
/// maps paper sites (node + link, or node + boson) onto layout sites.
struct ChainModel {
    ModelSpec spec;
    ChainLayout layout;
    std::vector<Piece> pieces;
    SparseHermitian hamiltonian;
    int num_terms = 0;
    /// layout index of the quantum-number carrier (link or boson) per paper site
    std::vector<std::optional<std::size_t>> qn_layout_site;

    /// Geometric term t_p as a chain operator (sum of its pieces).
    SparseHermitian term(int p) const {
        std::vector<const SparseHermitian*> parts;
        for (const Piece& pc : pieces)
            if (pc.term == p) parts.push_back(&pc.lifted);
        if (parts.empty()) return SparseHermitian::zero(hamiltonian.dim());
        return sum(parts);
    }

    /// Sum of the geometric terms with indices in [first, last].
    SparseHermitian term_range(int first, int last) const {
        std::vector<const SparseHermitian*> parts;
        for (const Piece& pc : pieces)
            if (pc.term >= first && pc.term <= last) parts.push_back(&pc.lifted);
        if (parts.empty()) return SparseHermitian::zero(hamiltonian.dim());
        return sum(parts);
    }
};

namespace detail {

/// Lifts a local operator on contiguous layout sites [s0, s0+k) to the chain.
inline SparseHermitian lift_block(const ChainLayout& layout, std::size_t s0, std::size_t count,
                                  const SparseHermitian& local, const Caps& caps) {
    index_t dim_l = 1, dim_r = 1;
    for (std::size_t s = 0; s < s0; ++s) dim_l *= layout.sites[s].dim();
    for (std::size_t s = s0 + count; s < layout.sites.size(); ++s) dim_r *= layout.sites[s].dim();
    std::vector<SparseHermitian> f;
    if (dim_l > 1) f.push_back(SparseHermitian::identity(dim_l));
    f.push_back(local);
    if (dim_r > 1) f.push_back(SparseHermitian::identity(dim_r));
    return kron_compose(f, caps);
}

/// Re-embeds a piece's local operator into a larger contiguous block
/// [b0, b0+bcount) of the same layout.
inline SparseHermitian embed_in_block(const ChainLayout& layout, std::size_t piece_first,
                                      std::size_t piece_count, const SparseHermitian& local,
                                      std::size_t b0, std::size_t bcount, const Caps& caps) {
    if (piece_first < b0 || piece_first + piece_count > b0 + bcount)
        throw ContractViolation("embed_in_block: piece support outside block");
    index_t dim_l = 1, dim_r = 1;
    for (std::size_t s = b0; s < piece_first; ++s) dim_l *= layout.sites[s].dim();
    for (std::size_t s = piece_first + piece_count; s < b0 + bcount; ++s)
        dim_r *= layout.sites[s].dim();
    std::vector<SparseHermitian> f;
    if (dim_l > 1) f.push_back(SparseHermitian::identity(dim_l));
    f.push_back(local);
    if (dim_r > 1) f.push_back(SparseHermitian::identity(dim_r));
    return kron_compose(f, caps);
}

inline GeneralSparse u1_link_raising(std::int64_t cutoff) {
    // V |k> = |k+1>, the adjoint of the lowering convention; basis index k + cutoff.
    std::vector<Entry> e;
    for (std::int64_t i = 0; i + 1 <= 2 * cutoff; ++i) e.push_back({i + 1, i, 1.0});
    return GeneralSparse(2 * cutoff + 1, std::move(e));
}

inline GeneralSparse boson_ladder_x(std::int64_t cutoff) {
    // b^dagger + b on occupations 0..cutoff.
    std::vector<Entry> e;
    for (std::int64_t n = 0; n < cutoff; ++n) {
        const double v = std::sqrt(static_cast<double>(n + 1));
        e.push_back({n + 1, n, v});
        e.push_back({n, n + 1, v});
    }
    return GeneralSparse(cutoff + 1, std::move(e));
}

/// Staggered charge offset for 0-based node q: ((-1)^(q+1) - 1) / 2.
inline double staggered_offset(std::size_t q) { return (q % 2 == 0) ? -1.0 : 0.0; }

/// Staggered mass sign for 0-based node q: (-1)^(q+1).
inline double staggered_sign(std::size_t q) { return (q % 2 == 0) ? -1.0 : 1.0; }

} // namespace detail

/// Builds the Hamiltonian and its geometric decomposition H = sum_p t_p,
/// where t_p couples paper sites p and p+1 (terms are clipped at the open
/// boundaries). Fermions are realized through the Jordan-Wigner string fixed
/// by the layout's left-to-right mode order.
inline ChainModel build_hamiltonian(const ModelSpec& spec, const Caps& caps = Caps{}) {
    spec.validate();
    const int n = spec.num_nodes;
    const Couplings& c = spec.couplings;

    ChainModel model;
    model.spec = spec;
    model.num_terms = n;
    ChainLayout& layout = model.layout;

    const bool is_lgt = spec.family != ModelFamily::HubbardHolstein;
    const int fmodes = spec.family == ModelFamily::U1LGT ? 1 : 2;

    for (int p = 0; p < n; ++p) {
        layout.sites.push_back(fermion_site(fmodes));
        for (int m = 0; m < fmodes; ++m)
            layout.fermion_order.push_back({layout.sites.size() - 1, m});
        if (is_lgt) {
            if (p < n - 1) {
                if (spec.family == ModelFamily::U1LGT)
                    layout.sites.push_back(u1_link_site(spec.cutoff.twice() / 2));
                else
                    layout.sites.push_back(su2_link_site(spec.cutoff));
                model.qn_layout_site.push_back(layout.sites.size() - 1);
            } else {
                model.qn_layout_site.push_back(std::nullopt);
            }
        } else {
            layout.sites.push_back(boson_site(spec.cutoff.twice() / 2));
            model.qn_layout_site.push_back(layout.sites.size() - 1);
        }
    }
    layout.total_dim(caps); // enforce the cap before any lift

    auto add_piece = [&](int term, std::size_t paper_site, PieceRole role, std::size_t s0,
                         std::size_t count, SparseHermitian local) {
        Piece pc;
        pc.term = term;
        pc.paper_site = paper_site;
        pc.role = role;
        pc.support_first = s0;
        pc.support_count = count;
        pc.lifted = detail::lift_block(layout, s0, count, local, caps);
        pc.local = std::move(local);
        model.pieces.push_back(std::move(pc));
    };

    const std::size_t sites_per_node = 2; // fermion site + (link | boson) site, last node bare
    auto fsite = [&](int p) { return static_cast<std::size_t>(p) * sites_per_node; };
    auto qsite = [&](int p) { return static_cast<std::size_t>(p) * sites_per_node + 1; };

    if (spec.family == ModelFamily::U1LGT) {
        const std::int64_t lam = spec.cutoff.twice() / 2;
        const GeneralSparse v_raise = detail::u1_link_raising(lam);
        const GeneralSparse sigma_minus(2, {{0, 1, 1.0}});
        const GeneralSparse sigma_plus(2, {{1, 0, 1.0}});

        for (int p = 0; p < n; ++p) {
            // mass
            const double sgn = detail::staggered_sign(static_cast<std::size_t>(p));
            add_piece(p, static_cast<std::size_t>(p), PieceRole::Mass, fsite(p), 1,
                      SparseHermitian::diagonal({0.0, c.g_m * sgn}));
            if (p < n - 1) {
                // gauge-matter hop on link p; the link operator raises the
                // field so every Gauss generator commutes with the term
                GeneralSparse hop =
                    sigma_plus.kron(v_raise).kron(sigma_minus).scaled(c.g_gm);
                add_piece(p, static_cast<std::size_t>(p), PieceRole::Hop, fsite(p), 3,
                          hop.plus_adjoint());
                // electric energy
                std::vector<double> e2;
                for (std::int64_t k = -lam; k <= lam; ++k)
                    e2.push_back(c.g_e * static_cast<double>(k) * static_cast<double>(k));
                add_piece(p, static_cast<std::size_t>(p), PieceRole::Electric, qsite(p), 1,
                          SparseHermitian::diagonal(e2));
            }
        }
        if (c.lambda_g != 0.0) {
            // Gauss penalty lambda_G G_q^2; G_q = E_q - E_{q-1} - rho_q with
            // absent boundary links treated as zero field. G_0 rides with
            // term 0, G_q (q >= 1) with term q-1.
            for (int q = 0; q < n; ++q) {
                const bool has_prev = q >= 1;
                const bool has_cur = q <= n - 2;
                const std::size_t s0 = has_prev ? qsite(q - 1) : fsite(q);
                const std::size_t s1 = has_cur ? qsite(q) : fsite(q);
                const std::size_t count = s1 - s0 + 1;
                index_t bdim = 1;
                for (std::size_t s = s0; s < s0 + count; ++s) bdim *= layout.sites[s].dim();
                std::vector<double> diag(static_cast<std::size_t>(bdim), 0.0);
                // decode block digits: [E_{q-1}] [n_q] [E_q]
                for (index_t i = 0; i < bdim; ++i) {
                    index_t rest = i;
                    double e_prev = 0.0, e_cur = 0.0, occ = 0.0;
                    std::vector<double> vals;
                    for (std::size_t s = s0 + count; s-- > s0;) {
                        const index_t d = layout.sites[s].dim();
                        const index_t dig = rest % d;
                        rest /= d;
                        if (s == s0 && has_prev)
                            e_prev = layout.sites[s].lambda[static_cast<std::size_t>(dig)].value();
                        else if (has_cur && s == s0 + count - 1)
                            e_cur = layout.sites[s].lambda[static_cast<std::size_t>(dig)].value();
                        else
                            occ = static_cast<double>(dig);
                    }
                    const double rho = occ + detail::staggered_offset(static_cast<std::size_t>(q));
                    const double gval = e_cur - e_prev - rho;
                    diag[static_cast<std::size_t>(i)] = c.lambda_g * gval * gval;
                }
                add_piece(q >= 1 ? q - 1 : 0, static_cast<std::size_t>(q), PieceRole::GaussPenalty,
                          s0, count, SparseHermitian::diagonal(diag));
            }
        }
    } else if (spec.family == ModelFamily::SU2LGT) {
        su2::LinkOperators link = n >= 2 ? su2::link_operators(spec.cutoff) : su2::LinkOperators{};
        for (int p = 0; p < n; ++p) {
            const double sgn = detail::staggered_sign(static_cast<std::size_t>(p));
            add_piece(p, static_cast<std::size_t>(p), PieceRole::Mass, fsite(p), 1,
                      SparseHermitian::diagonal({0.0, c.g_m * sgn, c.g_m * sgn, 2.0 * c.g_m * sgn}));
            if (p < n - 1) {
                GeneralSparse hop = GeneralSparse::zero(
                    4 * layout.sites[qsite(p)].dim() * 4);
                for (int l = 0; l < 2; ++l) {
                    for (int lp = 0; lp < 2; ++lp) {
                        // c^dagger_(p,l) c_(p+1,l') with the intra-block string
                        const GeneralSparse left = fermion::local_op(2, l == 0 ? 0b10u : 0u, l, +1);
                        const GeneralSparse right = fermion::local_op(2, lp == 1 ? 0b01u : 0u, lp, -1);
                        hop = hop + left.kron(link.u[static_cast<std::size_t>(l)][static_cast<std::size_t>(lp)])
                                        .kron(right);
                    }
                }
                add_piece(p, static_cast<std::size_t>(p), PieceRole::Hop, fsite(p), 3,
                          hop.scaled(c.g_gm).plus_adjoint());
                add_piece(p, static_cast<std::size_t>(p), PieceRole::Electric, qsite(p), 1,
                          link.e_squared.scaled(c.g_e));
            }
        }
    } else { // Hubbard-Holstein
        const std::int64_t lam = spec.cutoff.twice() / 2;
        for (int p = 0; p < n; ++p) {
            std::vector<double> nb;
            for (std::int64_t k = 0; k <= lam; ++k) nb.push_back(c.omega0 * static_cast<double>(k));
            add_piece(p, static_cast<std::size_t>(p), PieceRole::BosonEnergy, qsite(p), 1,
                      SparseHermitian::diagonal(nb));
            // g (b^dagger + b)(n_up + n_down - 1)
            const GeneralSparse parity_charge(4, {{0, 0, -1.0}, {3, 3, 1.0}}); // n_up + n_down - 1
            const GeneralSparse coupling =
                parity_charge.kron(detail::boson_ladder_x(lam)).scaled(c.g);
            add_piece(p, static_cast<std::size_t>(p), PieceRole::BosonCoupling, fsite(p), 2,
                      coupling.as_hermitian());
            add_piece(p, static_cast<std::size_t>(p), PieceRole::HubbardU, fsite(p), 1,
                      SparseHermitian::diagonal({0.0, 0.0, 0.0, c.u_hub}));
            if (p < n - 1) {
                const index_t bdim = layout.sites[qsite(p)].dim();
                const GeneralSparse ib = GeneralSparse::identity(bdim);
                // strings: the up hop crosses the down mode at p, the down
                // hop crosses the up mode at p+1
                const GeneralSparse up =
                    fermion::local_op(2, 0b10u, 0, +1).kron(ib).kron(fermion::local_op(2, 0u, 0, -1));
                const GeneralSparse down =
                    fermion::local_op(2, 0u, 1, +1).kron(ib).kron(fermion::local_op(2, 0b01u, 1, -1));
                add_piece(p, static_cast<std::size_t>(p), PieceRole::Hop, fsite(p), 3,
                          (up + down).scaled(-c.t_hop).plus_adjoint());
            }
        }
    }

    std::vector<const SparseHermitian*> parts;
    parts.reserve(model.pieces.size());
    for (const Piece& pc : model.pieces) parts.push_back(&pc.lifted);
    model.hamiltonian = sum(parts);
    return model;
}

/// Chain-level Gauss-law generators G_q (diagonal) for the U(1) model.
inline std::vector<SparseHermitian> gauss_generators(const ChainModel& model,
                                                     const Caps& caps = Caps{}) {
    if (model.spec.family != ModelFamily::U1LGT)
        throw ContractViolation("gauss_generators: U(1) only");
    const ChainLayout& layout = model.layout;
    const int n = model.spec.num_nodes;
    const std::vector<index_t> st = layout.strides();
    const index_t dim = model.hamiltonian.dim();
    std::vector<SparseHermitian> out;
    for (int q = 0; q < n; ++q) {
        std::vector<double> diag(static_cast<std::size_t>(dim), 0.0);
        for (index_t i = 0; i < dim; ++i) {
            const std::size_t fs = static_cast<std::size_t>(q) * 2;
            double e_prev = 0.0, e_cur = 0.0;
            if (q >= 1) {
                const std::size_t ls = fs - 1;
                e_prev = layout.sites[ls]
                             .lambda[static_cast<std::size_t>(layout.digit(i, ls, st))]
                             .value();
            }
            if (q <= n - 2) {
                const std::size_t ls = fs + 1;
                e_cur = layout.sites[ls]
                            .lambda[static_cast<std::size_t>(layout.digit(i, ls, st))]
                            .value();
            }
            const double occ = static_cast<double>(layout.digit(i, fs, st));
            diag[static_cast<std::size_t>(i)] =
                e_cur - e_prev - occ - detail::staggered_offset(static_cast<std::size_t>(q));
        }
        out.push_back(SparseHermitian::diagonal(diag));
    }
    (void)caps;
    return out;
}

/// Ground-state mean of |lambda| on one quantum-number site.
inline double mean_abs_quantum_number(const ChainModel& model, const StateVector& psi,
                                      std::size_t paper_site) {
    if (!model.qn_layout_site[paper_site])
        throw ContractViolation("mean_abs_quantum_number: site carries no quantum number");
    const std::size_t ls = *model.qn_layout_site[paper_site];
    const std::vector<index_t> st = model.layout.strides();
    const LocalSite& site = model.layout.sites[ls];
    double acc = 0.0;
    for (index_t i = 0; i < psi.dim(); ++i) {
        const double w = std::norm(psi.amp[static_cast<std::size_t>(i)]);
        if (w == 0.0) continue;
        const index_t dig = model.layout.digit(i, ls, st);
        acc += w * std::abs(site.lambda[static_cast<std::size_t>(dig)].value());
    }
    return acc;
}

} // namespace latlab
