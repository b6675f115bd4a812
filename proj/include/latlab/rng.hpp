#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace latlab {

/// Deterministic random source. Wraps mt19937_64 but generates floating-point
/// samples from raw bits directly, so streams are reproducible across standard
/// library implementations (std::normal_distribution is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer in [0, n).
    std::uint64_t index(std::uint64_t n) { return gen_() % n; }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    std::complex<double> normal_complex() { return {normal(), normal()}; }

    /// Derives an independent stream keyed on the parent seed and a salt.
    /// Fork results do not depend on how much of the parent was consumed,
    /// so work items can be distributed across threads deterministically.
    Rng fork(std::uint64_t salt) const {
        std::uint64_t s = seed_ ^ (salt * 0x9e3779b97f4a7c15ull + 0x243f6a8885a308d3ull);
        return Rng(s);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace latlab
