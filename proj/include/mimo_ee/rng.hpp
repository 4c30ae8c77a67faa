// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random number generation. Every stream is a pure function
// of (seed, stream id), so trials can be distributed over workers in any
// order and still reproduce bit-identical draws.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace mimo_ee {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

} // namespace detail

/// splitmix64 sequence seeded from (seed, stream). Use one stream per
/// independent unit of work (one fading drop, one Monte Carlo trial).
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : state_(detail::mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1)) ^
                 detail::mix64(stream + 0x2545f4914f6cdd1dULL)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return detail::mix64(state_);
    }

    /// Uniform in (0, 1]; never returns 0, so log() is always safe.
    double next_unit() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (one value per call, pair cached).
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Circularly-symmetric complex normal with unit variance (E|z|^2 = 1).
    std::complex<double> next_cnormal() {
        const double re = next_normal();
        const double im = next_normal();
        return {re * 0.70710678118654752440, im * 0.70710678118654752440};
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace mimo_ee
