// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace phaselens {

/// SplitMix64 finalizer. Used as the key-derivation mix so that every
/// (master_seed, index...) tuple owns an independent stream.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a) noexcept {
    return mix64(mix64(master) ^ a);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b) noexcept {
    return mix64(derive_seed(master, a) ^ b);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b, std::uint64_t c) noexcept {
    return mix64(derive_seed(master, a, b) ^ c);
}

/// Seeded stream of standard normals and complex Gaussians.
///
/// Normal sampling is Box-Muller on top of std::mt19937_64 uniforms (not
/// std::normal_distribution, whose output is implementation-defined), so a
/// fixed seed reproduces the identical stream on every platform this builds
/// on. Complex draws consume exactly one Box-Muller pair per entry:
/// z = (n0 + i*n1)/sqrt(2), giving E|z|^2 = 1.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// N(0, 1). Caches the second Box-Muller variate.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        auto [n0, n1] = normal_pair();
        spare_ = n1;
        have_spare_ = true;
        return n0;
    }

    /// Complex Gaussian with E|z|^2 = 1 (re, im independent N(0, 1/2)).
    /// Independent of the normal() cache: always burns a fresh pair.
    std::complex<double> complex_gaussian() {
        auto [n0, n1] = normal_pair();
        constexpr double inv_sqrt2 = 0.70710678118654752440;
        return {n0 * inv_sqrt2, n1 * inv_sqrt2};
    }

    /// Rademacher +/-1.
    double rademacher() { return (gen_() & 1ULL) ? 1.0 : -1.0; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // rejection sampling keeps the stream unbiased
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % n;
    }

private:
    std::pair<double, double> normal_pair() {
        // u1 in (0,1] so log(u1) is finite
        const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * M_PI * u2;
        return {r * std::cos(t), r * std::sin(t)};
    }

    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace phaselens
