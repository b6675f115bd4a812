#pragma once

#include <cmath>
#include <vector>

#include "latlab/dense.hpp"
#include "latlab/models.hpp"

namespace latlab {

// ---------------------------------------------------------------------------
// Closed-form mean-|quantum number| bounds
// ---------------------------------------------------------------------------

/// Ground-state bound <|lambda_x|> <= 2 sqrt(|g_GM| / g_E) for a gauge link.
inline double mean_abs_bound_lgt(double g_gm, double g_e) {
    if (g_e <= 0) throw ContractViolation("mean_abs_bound_lgt: g_e must be positive");
    return 2.0 * std::sqrt(std::abs(g_gm) / g_e);
}

/// <0| 2|g| |X| |0> for the oscillator ground state: 2|g|/sqrt(pi).
inline double ho_ground_mean_2g_abs_x(double g) {
    return 2.0 * std::abs(g) / std::sqrt(3.14159265358979323846);
}

/// Ground-state bound <n_x> <= 1/2 + 4|g|/(omega0 sqrt(pi)) + 4 g^2/omega0^2
/// for a Holstein boson mode.
inline double mean_abs_bound_hh(double g, double omega0) {
    if (omega0 <= 0) throw ContractViolation("mean_abs_bound_hh: omega0 must be positive");
    const double a = std::abs(g);
    return 0.5 + 4.0 * a / (omega0 * std::sqrt(3.14159265358979323846)) +
           4.0 * a * a / (omega0 * omega0);
}

// ---------------------------------------------------------------------------
// Tail envelopes (shape only; the hidden decay constant is never claimed)
// ---------------------------------------------------------------------------

/// Exponent argument sqrt(chi^-1 gap (Lambda^(1-r) - (2 lambda_bar)^(1-r))).
inline double tail_envelope(double gap, double chi, double r, double lambda_bar, double lambda) {
    if (chi <= 0) throw ContractViolation("tail_envelope: chi must be positive");
    if (gap <= 0) throw ContractViolation("tail_envelope: gap must be positive");
    if (r < 0 || r >= 1) throw ContractViolation("tail_envelope: r in [0,1)");
    const double head = std::pow(lambda, 1.0 - r) - std::pow(2.0 * lambda_bar, 1.0 - r);
    if (head < 0)
        throw ContractViolation("tail_envelope: cutoff below 2*lambda_bar");
    return std::sqrt(gap * head / chi);
}

/// Multi-site version: sqrt(s) e^(-arg).
inline double multisite_envelope(int s, double envelope_arg) {
    return std::sqrt(static_cast<double>(s)) * std::exp(-envelope_arg);
}

/// Hamiltonian-weighted version: s^(3/2) N(Lambda) e^(-arg).
inline double delta2_envelope(int s, double norm_lambda, double envelope_arg) {
    return std::pow(static_cast<double>(s), 1.5) * norm_lambda * std::exp(-envelope_arg);
}

// ---------------------------------------------------------------------------
// Variational bound machinery
// ---------------------------------------------------------------------------

/// Convex non-decreasing lower-bound function L with H_A - K_A >= L(|Xi|),
/// either a x^2 - b or a x - b on x >= 0 (a > 0).
struct ConvexLowerBound {
    enum class Form { QuadraticMinusConstant, LinearMinusConstant };
    Form form = Form::QuadraticMinusConstant;
    double a = 1.0, b = 0.0;

    double eval(double x) const {
        return form == Form::QuadraticMinusConstant ? a * x * x - b : a * x - b;
    }
    double inverse(double y) const {
        if (form == Form::QuadraticMinusConstant) return std::sqrt(std::max(0.0, (y + b) / a));
        return (y + b) / a;
    }
    /// Convexity and monotonicity sanity on a grid (a > 0 makes both true;
    /// kept as an executable check rather than an assumption).
    bool convex_nondecreasing_on(const std::vector<double>& xs) const {
        for (std::size_t i = 1; i < xs.size(); ++i) {
            if (eval(xs[i]) + 1e-12 < eval(xs[i - 1])) return false;
            if (i + 1 < xs.size()) {
                const double mid = eval(0.5 * (xs[i - 1] + xs[i + 1]));
                const double chord = 0.5 * (eval(xs[i - 1]) + eval(xs[i + 1]));
                if (mid > chord + 1e-12) return false;
            }
        }
        return true;
    }
};

/// |A| = sqrt(A^dagger A) for a Hermitian operator, through its eigenbasis.
inline SparseHermitian abs_operator(const SparseHermitian& a, const Caps& caps = Caps{}) {
    if (a.dim() > caps.dense_cap) throw CapExceeded("abs_operator: dim exceeds dense cap");
    EigenDecomposition eig = hermitian_eig(DenseMatrix::from_sparse(a));
    const index_t n = a.dim();
    DenseMatrix b(n, n);
    for (index_t i = 0; i < n; ++i) {
        const double w = std::abs(eig.eigenvalues[static_cast<std::size_t>(i)]);
        if (w == 0.0) continue;
        for (index_t r = 0; r < n; ++r) {
            const cplx vr = eig.eigenvectors.at(r, i);
            if (vr == cplx(0.0)) continue;
            for (index_t c = 0; c < n; ++c)
                b.at(r, c) += w * vr * std::conj(eig.eigenvectors.at(c, i));
        }
    }
    return b.to_hermitian_sparse(1e-10);
}

/// One-site witness for the variational expectation bound: the site part of
/// the energy H_A, a dominator K_A with |coupling| <= K_A, a trial state, and
/// the convex minorant L.
struct VariationalWitness {
    SparseHermitian h_a; ///< on the quantum-number site factor
    SparseHermitian k_a; ///< same factor, positive semi-definite as used
    StateVector psi_a;   ///< trial state on that factor
    ConvexLowerBound minorant;
};

struct VariationalCheck {
    double lhs = 0.0; ///< <Psi| H_A - K_A |Psi> on the chain
    double rhs = 0.0; ///< <psi_A| H_A + K_A |psi_A> on the site
    bool holds = false;
};

/// Evaluates <Psi|(H_A - K_A)|Psi> <= <psi_A|(H_A + K_A)|psi_A> on a built
/// model's ground state for the quantum-number site of `paper_site`.
inline VariationalCheck check_variational_lemma(const ChainModel& model, const StateVector& ground,
                                                std::size_t paper_site,
                                                const VariationalWitness& witness,
                                                const Caps& caps = Caps{}) {
    if (!model.qn_layout_site[paper_site])
        throw ContractViolation("check_variational_lemma: site has no quantum number");
    const std::size_t ls = *model.qn_layout_site[paper_site];
    if (witness.h_a.dim() != model.layout.sites[ls].dim())
        throw ContractViolation("check_variational_lemma: witness dim mismatch");

    // K_A must be positive semi-definite for the domination to make sense.
    const EigenDecomposition keig = hermitian_eig(DenseMatrix::from_sparse(witness.k_a));
    if (keig.eigenvalues.front() < -1e-10)
        throw ContractViolation("check_variational_lemma: K_A has a negative eigenvalue");

    std::vector<Entry> diff_entries;
    for (const Entry& e : witness.h_a.entries()) diff_entries.push_back(e);
    for (const Entry& e : witness.k_a.entries()) diff_entries.push_back({e.row, e.col, -e.val});
    const SparseHermitian diff = SparseHermitian::build(witness.h_a.dim(), std::move(diff_entries));
    const SparseHermitian lifted = lift_to_chain(model.layout, ls, diff, caps);

    VariationalCheck out;
    out.lhs = inner(ground, lifted.apply(ground)).real();
    const SparseHermitian sum_ak = add(witness.h_a, witness.k_a);
    StateVector trial = witness.psi_a;
    trial.normalize();
    out.rhs = inner(trial, sum_ak.apply(trial)).real();
    out.holds = out.lhs <= out.rhs + 1e-10;
    return out;
}

} // namespace latlab
