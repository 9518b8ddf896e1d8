// rng.hpp — deterministic random number generation.
//
// All stochastic pieces of the lab draw from the xoshiro256++ generator
// seeded through SplitMix64, with Gaussians produced by explicit Box–Muller.
// Nothing here depends on std::normal_distribution or any other
// implementation-defined facility, so a (seed, index) pair reproduces the
// same bytes on every build and at every thread count.
//
// Complex Gaussian convention: E|g|^2 = 1, i.e. real and imaginary parts are
// independent N(0, 1/2).  Real Gaussian: N(0, 1).

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace fnlslab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless mix of (seed, index); used for per-sample / per-cell sub-seeding
// so parallel work is reproducible regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in (0, 1]; never returns 0 so log() below is safe.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard complex Gaussian, E|g|^2 = 1.
    std::complex<double> gaussian_complex() {
        const double r = std::sqrt(-std::log(uniform01()));
        const double th = 2.0 * pi_ * uniform01();
        return {r * std::cos(th), r * std::sin(th)};
    }

    // Standard real Gaussian, variance 1.
    double gaussian_real() {
        const double r = std::sqrt(-2.0 * std::log(uniform01()));
        return r * std::cos(2.0 * pi_ * uniform01());
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    static constexpr double pi_ = 3.14159265358979323846;
    std::uint64_t s_[4];
};

}  // namespace fnlslab
