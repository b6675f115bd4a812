#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <vector>

#include "latlab/chebyshev.hpp"
#include "latlab/spectra.hpp"

namespace latlab {

/// A Chebyshev approximate ground-state projector K = f_l(H) for a gapped
/// operator: K fixes the ground state, shrinks everything orthogonal to it by
/// at most 1/T_l(x0), and is applied purely through matvecs.
struct AgspInstance {
    SparseHermitian h;
    int degree = 0;
    double anchor = 0.0;             ///< ground energy, where the filter is 1
    double band_lo = 0.0;            ///< first excited energy
    double band_hi = 0.0;            ///< upper bound on the spectrum
    StateVector psi0;                ///< ground state being fixed
    double sigma_bound = 1.0;        ///< 1/|T_l(x0)|
    double ground_fix_error = 0.0;   ///< ||K psi0 - psi0||
    double measured_sigma = 1.0;     ///< filled by measure_shrinking
    std::optional<double> exact_sigma; ///< dense evaluation when available

    StateVector apply(const StateVector& v) const {
        return chebyshev_apply(h, band_lo, band_hi, anchor, degree, v);
    }

    /// Scalar filter value at energy x.
    double filter(double x) const {
        return ChebyshevFilter(band_lo, band_hi, anchor, degree)(x);
    }
};

/// Builds the filter from a ground record of `h`. The spectrum ceiling comes
/// from a Gershgorin bound unless the caller supplies a tighter one. Refuses
/// when the gap is below tol, where no shrinking band exists.
inline AgspInstance build_agsp(const SparseHermitian& h, const GroundRecord& rec, int degree,
                               std::optional<double> spectrum_upper = std::nullopt,
                               double gap_tol = 1e-10) {
    if (rec.gap <= gap_tol) throw ContractViolation("build_agsp: gap below tolerance");
    AgspInstance inst;
    inst.h = h;
    inst.degree = degree;
    inst.anchor = rec.eps0;
    inst.band_lo = rec.eps1;
    double hi = spectrum_upper ? *spectrum_upper : h.gershgorin_upper();
    if (hi <= inst.band_lo)
        hi = inst.band_lo + std::max(1e-12, 1e-12 * std::abs(inst.band_lo));
    inst.band_hi = hi;
    inst.psi0 = rec.psi0;
    inst.sigma_bound = ChebyshevFilter(inst.band_lo, inst.band_hi, inst.anchor, degree)
                           .suppression_bound();
    StateVector k_psi = inst.apply(inst.psi0);
    axpy(k_psi, -1.0, inst.psi0);
    inst.ground_fix_error = k_psi.norm();
    return inst;
}

struct ShrinkingMeasurement {
    double probe_max = 0.0;            ///< max ||K phi|| over random phi orthogonal to psi0
    std::optional<double> exact;       ///< max |f(lambda_i)| over excited eigenvalues
};

/// Worst-case shrinking on the orthogonal complement: probes plus, when the
/// dimension allows, the exact value from the dense spectrum. Updates the
/// instance's measured_sigma with the best available number.
inline ShrinkingMeasurement measure_shrinking(AgspInstance& inst, int n_probe, std::uint64_t seed,
                                              const Caps& caps = Caps{}) {
    if (n_probe < 1) throw ContractViolation("measure_shrinking: need at least one probe");
    ShrinkingMeasurement out;
    Rng rng(seed);
    for (int p = 0; p < n_probe; ++p) {
        Rng probe_rng = rng.fork(static_cast<std::uint64_t>(p) + 1);
        StateVector phi = StateVector::random(inst.h.dim(), probe_rng);
        axpy(phi, -inner(inst.psi0, phi), inst.psi0);
        const double nn = phi.norm();
        if (nn < 1e-8) continue;
        scale(phi, 1.0 / nn);
        out.probe_max = std::max(out.probe_max, inst.apply(phi).norm());
    }
    if (inst.h.dim() <= caps.dense_cap) {
        const SpectrumSlice full = dense_oracle(inst.h, caps);
        double worst = 0.0;
        for (std::size_t i = 1; i < full.eigenvalues.size(); ++i)
            worst = std::max(worst, std::abs(inst.filter(full.eigenvalues[i])));
        out.exact = worst;
    }
    inst.measured_sigma = out.exact ? std::max(*out.exact, out.probe_max) : out.probe_max;
    inst.exact_sigma = out.exact;
    return out;
}

/// log R (natural log) for the entanglement-rank shape
/// R = (l d)^(l/s + s), scaled by the free constant c_rank.
inline double rank_formula(double ell, double s, double d, const BoundConstants& consts = {}) {
    if (ell < 1 || s < 1 || d < 1) throw ContractViolation("rank_formula: args must be >= 1");
    return consts.c_rank * (ell / s + s) * std::log(ell * d);
}

struct BudgetRow {
    int s = 0;
    double log_r = 0.0;
    double worst_margin = 0.0; ///< max over k of log sigma_k + k (log 2 + log R); <= 0 qualifies
    bool qualifies = false;
};

struct BudgetResult {
    int s = 0;
    double entropy_bound = 0.0; ///< bits
    std::vector<BudgetRow> table;
};

/// Scans window sizes for the smallest s whose AGSP powers satisfy
/// sigma_k <= (2R)^-k for k = 1..k_max (compared in log space, ties accepted).
/// The entropy bound is log2 R plus the schedule overhead sum_k k * k^-3 from
/// the target-space accuracy sequence delta_k = k^-3. Returns s = 0 with the
/// full diagnostic table when nothing qualifies.
inline BudgetResult area_law_budget_table(const std::function<double(int, int)>& log_sigma_of_s_k,
                                          const std::function<double(int)>& log_r_of_s,
                                          const std::vector<int>& s_grid,
                                          const BoundConstants& consts = {}) {
    if (s_grid.empty()) throw ContractViolation("area_law_budget: empty grid");
    BudgetResult out;
    for (const int s : s_grid) {
        BudgetRow row;
        row.s = s;
        row.log_r = log_r_of_s(s);
        row.worst_margin = -std::numeric_limits<double>::infinity();
        for (int k = 1; k <= consts.k_max; ++k) {
            const double margin =
                log_sigma_of_s_k(s, k) + static_cast<double>(k) * (std::log(2.0) + row.log_r);
            row.worst_margin = std::max(row.worst_margin, margin);
        }
        row.qualifies = row.worst_margin <= 0.0;
        out.table.push_back(row);
        if (row.qualifies && out.s == 0) {
            out.s = s;
            double overhead = 0.0;
            for (int k = 1; k <= consts.k_max; ++k)
                overhead += 1.0 / (static_cast<double>(k) * static_cast<double>(k));
            out.entropy_bound = row.log_r / std::log(2.0) + overhead;
        }
    }
    return out;
}

/// Same scan, but an exhausted grid is an explicit failure.
inline BudgetResult area_law_budget(const std::function<double(int, int)>& log_sigma_of_s_k,
                                    const std::function<double(int)>& log_r_of_s,
                                    const std::vector<int>& s_grid,
                                    const BoundConstants& consts = {}) {
    BudgetResult out = area_law_budget_table(log_sigma_of_s_k, log_r_of_s, s_grid, consts);
    if (out.s == 0) {
        std::ostringstream msg;
        msg << "area_law_budget: no window size on the grid qualifies\n";
        msg << "  s    logR        worst_margin\n";
        for (const BudgetRow& r : out.table)
            msg << "  " << r.s << "  " << r.log_r << "  " << r.worst_margin << "\n";
        throw Error(msg.str());
    }
    return out;
}

} // namespace latlab
