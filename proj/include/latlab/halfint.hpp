#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

#include "latlab/errors.hpp"

namespace latlab {

/// Half-integer stored exactly as twice its value. Quantum-number labels
/// (electric field k, angular momentum j, occupation n) live here so that
/// projector-set membership never touches floating point equality.
class HalfInt {
public:
    constexpr HalfInt() = default;
    static constexpr HalfInt from_twice(std::int64_t t) { return HalfInt(t); }
    static constexpr HalfInt from_int(std::int64_t n) { return HalfInt(2 * n); }

    /// Nearest half-integer to `x`; throws if `x` is not within 1e-9 of one.
    static HalfInt from_double(double x) {
        const double t = 2.0 * x;
        const double r = std::round(t);
        if (std::abs(t - r) > 1e-9)
            throw ContractViolation("HalfInt::from_double: " + std::to_string(x) +
                                    " is not a half-integer");
        return HalfInt(static_cast<std::int64_t>(r));
    }

    constexpr std::int64_t twice() const { return twice_; }
    constexpr double value() const { return 0.5 * static_cast<double>(twice_); }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }

    constexpr HalfInt abs() const { return HalfInt(twice_ < 0 ? -twice_ : twice_); }

    friend constexpr auto operator<=>(HalfInt a, HalfInt b) = default;
    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt(a.twice_ + b.twice_); }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return HalfInt(a.twice_ - b.twice_); }
    friend constexpr HalfInt operator-(HalfInt a) { return HalfInt(-a.twice_); }

    std::string str() const {
        if (is_integer()) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

private:
    constexpr explicit HalfInt(std::int64_t t) : twice_(t) {}
    std::int64_t twice_ = 0;
};

/// Closed interval [lo, hi] of half-integers, e.g. a quantum-number window.
struct HalfIntInterval {
    HalfInt lo, hi;
    constexpr bool contains(HalfInt x) const { return lo <= x && x <= hi; }
    static HalfIntInterval symmetric(HalfInt cutoff) { return {-cutoff, cutoff}; }
};

} // namespace latlab
