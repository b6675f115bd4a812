#pragma once

#include <cstdint>

namespace latlab {

/// Size caps and scan constants. Everything here is a config key, not a
/// hard-coded constant: experiment configs may override any field.
struct Caps {
    /// Largest total state-space dimension any chain operator may have.
    std::int64_t sparse_cap = std::int64_t(1) << 24;
    /// Largest dimension accepted by the dense eigensolver.
    std::int64_t dense_cap = 4000;
    /// Largest total dimension for operator Schmidt-rank SVDs.
    std::int64_t op_svd_cap = 256;
};

/// Constants left free by the truncation/AGSP bound shapes. Defaults are 1;
/// scans vary the inputs rather than trusting any particular value.
struct BoundConstants {
    double c1 = 1.0;     ///< cutoff threshold scale in the (Lambda, t) schedule
    double c_t = 1.0;    ///< energy-cutoff scale in the (Lambda, t) schedule
    double c_rank = 1.0; ///< entanglement-rank exponent scale
    int k_max = 8;       ///< AGSP powers tested in the budget scan
};

} // namespace latlab
