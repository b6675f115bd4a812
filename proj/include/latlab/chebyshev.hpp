#pragma once

#include <cmath>
#include <vector>

#include "latlab/sparse.hpp"

namespace latlab {

/// Chebyshev polynomial T_l(x), valid on and off [-1, 1].
inline double chebyshev_t(int l, double x) {
    if (l == 0) return 1.0;
    double tm = 1.0, t = x;
    for (int j = 2; j <= l; ++j) {
        const double tn = 2.0 * x * t - tm;
        tm = t;
        t = tn;
    }
    return t;
}

/// Degree-l spectral filter: the Chebyshev polynomial on [lo, hi] rescaled so
/// the filter equals 1 at `anchor`. On [lo, hi] its modulus is bounded by
/// 1/|T_l(x0)| where x0 is the affine image of the anchor.
struct ChebyshevFilter {
    double lo, hi, anchor;
    int degree;

    ChebyshevFilter(double lo_, double hi_, double anchor_, int degree_)
        : lo(lo_), hi(hi_), anchor(anchor_), degree(degree_) {
        if (hi <= lo) throw ContractViolation("ChebyshevFilter: hi must exceed lo");
        if (!(anchor < lo)) throw ContractViolation("ChebyshevFilter: anchor must lie below lo");
        if (degree < 0) throw ContractViolation("ChebyshevFilter: negative degree");
    }

    double map(double x) const { return (2.0 * x - hi - lo) / (hi - lo); }

    double anchor_image() const { return map(anchor); }

    /// 1/|T_l(x0)|: the guaranteed bound for |filter| on [lo, hi].
    double suppression_bound() const {
        return 1.0 / std::abs(chebyshev_t(degree, anchor_image()));
    }

    /// Scalar evaluation of the filter.
    double operator()(double x) const {
        return chebyshev_t(degree, map(x)) / chebyshev_t(degree, anchor_image());
    }
};

/// Applies the filter to a vector via the three-term recurrence on the
/// affinely mapped operator; never forms a matrix function explicitly.
inline StateVector chebyshev_apply(const SparseHermitian& a, double lo, double hi, double anchor,
                                   int degree, const StateVector& v) {
    const ChebyshevFilter f(lo, hi, anchor, degree);
    if (v.dim() != a.dim()) throw ContractViolation("chebyshev_apply: dimension mismatch");

    const double scale_a = 2.0 / (hi - lo);
    const double shift = -(hi + lo) / (hi - lo);
    auto apply_mapped = [&](const StateVector& x, StateVector& y) {
        a.apply(x, y);
        for (std::size_t i = 0; i < y.amp.size(); ++i)
            y.amp[i] = scale_a * y.amp[i] + shift * x.amp[i];
    };

    StateVector t_prev = v; // T_0(B) v
    if (degree == 0) return t_prev;
    StateVector t_cur(a.dim());
    apply_mapped(v, t_cur); // T_1(B) v
    StateVector work(a.dim());
    for (int j = 2; j <= degree; ++j) {
        apply_mapped(t_cur, work);
        for (std::size_t i = 0; i < work.amp.size(); ++i)
            work.amp[i] = 2.0 * work.amp[i] - t_prev.amp[i];
        std::swap(t_prev, t_cur);
        std::swap(t_cur, work);
    }
    const double tl = chebyshev_t(degree, f.anchor_image());
    scale(t_cur, 1.0 / tl);
    return t_cur;
}

} // namespace latlab
