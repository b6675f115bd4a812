#pragma once

#include <array>
#include <cmath>
#include <map>

#include "latlab/dense.hpp"
#include "latlab/hilbert.hpp"
#include "latlab/opalg.hpp"

namespace latlab {
namespace su2 {

/// Clebsch-Gordan coefficient <j m; 1/2 l | J M> for coupling with a spin
/// half, Condon-Shortley phases. `l` is +-1/2 and M = m + l implicitly.
inline double cg_half(HalfInt j, HalfInt m, HalfInt l, HalfInt J) {
    const double tj = static_cast<double>(j.twice());
    const double tm = static_cast<double>(m.twice());
    const bool up = l.twice() == 1;
    if (!up && l.twice() != -1) throw ContractViolation("cg_half: l must be +-1/2");
    if (J.twice() == j.twice() + 1) {
        return up ? std::sqrt((tj + tm + 2.0) / (2.0 * (tj + 1.0)))
                  : std::sqrt((tj - tm + 2.0) / (2.0 * (tj + 1.0)));
    }
    if (J.twice() == j.twice() - 1) {
        return up ? -std::sqrt((tj - tm) / (2.0 * (tj + 1.0)))
                  : std::sqrt((tj + tm) / (2.0 * (tj + 1.0)));
    }
    return 0.0;
}

/// The four components of the fundamental link operator on a rigid-rotator
/// site, as matrices over the |j m m'> basis truncated at j <= Lambda. The
/// component (l, l') multiplies the wavefunction on the group by the matrix
/// element D^{1/2}_{l l'}; in the truncated basis
///   <J M M' | U^{ll'} | j m m'> =
///     sqrt((2j+1)/(2J+1)) <j m; 1/2 l | J M> <j m'; 1/2 l' | J M'>
/// with J = j +- 1/2 kept only when J <= Lambda, so the top block couples
/// only downward. Entries vanish unless |J - j| <= 1/2, and compression of a
/// multiplication operator keeps the norm at most 1; both properties are
/// verified before returning.
struct LinkOperators {
    SparseHermitian e_squared;                 ///< diag j(j+1)
    std::array<std::array<GeneralSparse, 2>, 2> u; ///< u[l-1][l'-1]
};

inline LinkOperators link_operators(HalfInt cutoff) {
    if (cutoff.twice() < 1)
        throw ContractViolation("su2::link_operators: cutoff must be at least 1/2");
    const LocalSite site = su2_link_site(cutoff);
    const index_t d = site.dim();

    std::vector<double> e2(static_cast<std::size_t>(d));
    std::map<std::array<std::int64_t, 3>, index_t> index_of;
    for (index_t i = 0; i < d; ++i) {
        const auto& [j, m, mp] = site.su2_jmm[static_cast<std::size_t>(i)];
        e2[static_cast<std::size_t>(i)] = j.value() * (j.value() + 1.0);
        index_of[{j.twice(), m.twice(), mp.twice()}] = i;
    }

    LinkOperators ops;
    ops.e_squared = SparseHermitian::diagonal(e2);

    const std::array<HalfInt, 2> halves = {HalfInt::from_twice(1), HalfInt::from_twice(-1)};
    for (int li = 0; li < 2; ++li) {
        for (int lpi = 0; lpi < 2; ++lpi) {
            const HalfInt l = halves[static_cast<std::size_t>(li)];
            const HalfInt lp = halves[static_cast<std::size_t>(lpi)];
            std::vector<Entry> entries;
            for (index_t col = 0; col < d; ++col) {
                const auto& [j, m, mp] = site.su2_jmm[static_cast<std::size_t>(col)];
                for (const std::int64_t dj : {+1, -1}) {
                    const HalfInt J = HalfInt::from_twice(j.twice() + dj);
                    if (J.twice() < 0 || J > cutoff) continue;
                    const HalfInt M = m + l, Mp = mp + lp;
                    if (M.abs() > J || Mp.abs() > J) continue;
                    const double w = std::sqrt((j.twice() + 1.0) / (J.twice() + 1.0));
                    const double val = w * cg_half(j, m, l, J) * cg_half(j, mp, lp, J);
                    if (val == 0.0) continue;
                    entries.push_back({index_of.at({J.twice(), M.twice(), Mp.twice()}), col, val});
                }
            }
            ops.u[static_cast<std::size_t>(li)][static_cast<std::size_t>(lpi)] =
                GeneralSparse(d, std::move(entries));
        }
    }

    // Block selection rule |j1 - j2| <= 1/2, entrywise.
    for (int li = 0; li < 2; ++li)
        for (int lpi = 0; lpi < 2; ++lpi)
            for (const Entry& e : ops.u[static_cast<std::size_t>(li)][static_cast<std::size_t>(lpi)].entries()) {
                const auto& jr = site.su2_jmm[static_cast<std::size_t>(e.row)][0];
                const auto& jc = site.su2_jmm[static_cast<std::size_t>(e.col)][0];
                if (std::abs(jr.twice() - jc.twice()) > 1)
                    throw Error("su2::link_operators: selection rule violated");
            }
    // Spectral norm at most 1 for each component.
    for (int li = 0; li < 2; ++li)
        for (int lpi = 0; lpi < 2; ++lpi) {
            const GeneralSparse& m = ops.u[static_cast<std::size_t>(li)][static_cast<std::size_t>(lpi)];
            const SparseHermitian gram = (m.adjoint() * m).as_hermitian(1e-11);
            const EigenDecomposition eig = hermitian_eig(DenseMatrix::from_sparse(gram));
            const double top = eig.eigenvalues.back();
            if (top > 1.0 + 1e-10)
                throw Error("su2::link_operators: component norm exceeds 1: " +
                            std::to_string(std::sqrt(top)));
        }
    return ops;
}

} // namespace su2
} // namespace latlab
