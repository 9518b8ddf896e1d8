// picard.hpp — the second Picard iterate of the renormalized flow seeded by
// the band-limited random linear solution, and its L^2 size.
//
// Band: B = { n in Z : N^{1-delta} < |n| < N }, both signs, strict bounds.
// Random data a_n = g_n <<n>>^{-alpha/2}, i.i.d. standard complex Gaussians.
// With chi == 1 on [0, t] the oscillatory time factor has the closed form
//
//   Theta(t, Phi) = \int_0^t e^{i t' Phi} dt' = (e^{i t Phi} - 1)/(i Phi),
//   Theta(t, 0)   = t,
//
// and the iterate in frequency space is, for <k> <= N,
//
//   Z_k(t) = -i e^{-i t |k|^alpha} [ sum_{(k1,k2,k3) in Gamma(k), B^3}
//              Theta(t,Phi) a_{k1} conj(a_{k2}) a_{k3}
//              - Theta(t,0) |a_k|^2 a_k 1_{k in B} ],
//   Phi = |k1|^alpha - |k2|^alpha + |k3|^alpha - |k|^alpha.
//
// E||Z||^2 (the Wick sum, coefficient l^2 norm) follows from the complex
// Gaussian contraction rules.  For the Gamma-part only the direct pairing
// {k1=k1', k3=k3', k2=k2'} and the swap {k1=k3', k3=k1', k2=k2'} survive
// ( k2 can never pair against k1/k3 slots), giving a factor 2 on the ordered
// triple sum; the resonant term is independent of the Gamma-part
// (cross-pairings need k1 = k2, excluded) and contributes E|g|^6 = 6:
//
//   E||Z||^2 = sum_{<k><=N} [ 2 sum_{Gamma(k) cap B^3} |Theta(t,Phi)|^2
//                (<<k1>><<k2>><<k3>>)^{-alpha}
//              + 6 t^2 <<k>>^{-3 alpha} 1_{k in B} ].
//
// These contraction coefficients (2, 6, vanishing cross term) are pinned by
// the Monte Carlo cross-check in the test suite.

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "fnlslab/rng.hpp"
#include "fnlslab/spectral.hpp"

namespace fnlslab::picard {

using spectral::cplx;
using spectral::SpectralField;

// Band frequency content: `both` admits N^{1-delta} < |n| < N (symmetric,
// the lab default); `positive` admits N^{1-delta} < n < N only, which is the
// band the divergence computation for alpha = 1 is written with (on the
// positive cone the alpha = 1 resonance function vanishes identically).
enum class BandSigns { both, positive };

struct PicardQuery {
    int N;         // band top, N >= 4
    double delta;  // band floor exponent, in (0, 1)
    double alpha;
    double t;
    BandSigns signs = BandSigns::both;

    PicardQuery(int N_, double delta_, double alpha_, double t_,
                BandSigns signs_ = BandSigns::both);

    int band_min_abs = 0;  // smallest admitted |n|
    int band_max_abs = 0;  // largest admitted |n| (= N - 1)
    bool in_band(long long n) const {
        if (signs == BandSigns::positive && n < 0) return false;
        const long long a = n < 0 ? -n : n;
        return a >= band_min_abs && a <= band_max_abs;
    }
};

// \int_0^t e^{i t' phi} dt'; continuous at phi = 0 (series for |t phi| small).
cplx theta(double t, double phi);

// |theta(t, phi)|^2 without forming the complex value.
double theta_abs2(double t, double phi);

// One random realisation of Z(t) as a spectral field (coefficients Z_k).
// include_outer_phase=false drops the unimodular factor e^{-i t |k|^alpha}
// (used to assert that the L^2 size does not depend on it).
SpectralField picard2_sample(const PicardQuery& q, Rng& rng,
                             bool include_outer_phase = true);

// Deterministic E||Z(t)||^2 (coefficient l^2 norm squared) by the Wick sum.
double picard2_wick_norm(const PicardQuery& q, int threads = 1);

// Per-output-frequency breakdown of the Wick sum, index k + (N-1);
// sums to picard2_wick_norm.  Plain loops, no symmetry folding.
std::vector<double> picard2_wick_profile(const PicardQuery& q);

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t draws = 0;
};

// Monte Carlo mean of ||Z||^2 over `draws` realisations; per-draw sub-seeds
// derive_seed(seed, i).
McEstimate picard2_mc_norm(const PicardQuery& q, std::size_t draws,
                           std::uint64_t seed, int threads = 1);

struct ScalingRecord {
    double alpha;
    int N;
    double wick_norm;
    double mc_norm;      // NaN when MC was skipped at this size
    double mc_stderr;    // NaN when MC was skipped
    double slope_so_far; // least-squares slope of log(wick) vs log(N)
    double ratio_log3;   // wick / (log N)^3
};

// Sweeps picard2_wick_norm over Ns for each alpha.  MC cross-checks are run
// for N <= mc_max_N with `mc_draws` draws.
std::vector<ScalingRecord> scaling_study(const std::vector<double>& alphas,
                                         const std::vector<int>& Ns, double delta,
                                         double t, std::uint64_t seed,
                                         std::size_t mc_draws = 0, int mc_max_N = 0,
                                         int threads = 1,
                                         BandSigns signs = BandSigns::both);

}  // namespace fnlslab::picard
