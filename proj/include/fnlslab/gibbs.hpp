// gibbs.hpp — the massive Gaussian free measure and its Gibbs reweightings.
//
// The Gaussian base measure is exp(-\int_T (|D^{a/2}u|^2 + |u|^2) dx) du.
// Under the project's Fourier convention that integral equals
// (2 pi)^{-1} sum_k <<k>>^alpha |u_k|^2, so a sample is
//
//     u_k = sqrt(2 pi) * g_k / <<k>>^{alpha/2},   <k> <= N,
//
// with i.i.d. standard complex Gaussians g_k (E|g|^2 = 1).  Per-mode variance
// E|u_k|^2 = 2 pi <<k>>^{-alpha}.  This normalisation is the one for which
// the Gibbs density below is exactly invariant under the truncated flow in
// dynamics.hpp, which is what the invariance experiment measures.
//
// Gibbs log-density relative to the base measure:
//   defocusing:  -(1/2) \int |u|^4 dx
//   focusing:    +(1/2) \int |u|^4 dx  if ||u||_{L^2} <= K, else -infinity.
//
// Expectations under the Gibbs measure are computed by self-normalised
// importance sampling from the Gaussian ensemble.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fnlslab/rng.hpp"
#include "fnlslab/spectral.hpp"

namespace fnlslab::gibbs {

using spectral::Dispersion;
using spectral::SpectralField;

enum class Sign { defocusing, focusing };

// E|u_k|^2 of the Gaussian sample at mode k.
double mode_variance(long long k, const Dispersion& d);

// Draws sum_{<n> <= N} sqrt(2 pi) g_n <<n>>^{-alpha/2} e^{inx}.
// Modes are drawn in the fixed order k = -kmax..kmax.
SpectralField sample_gff(const Dispersion& d, double N, Rng& rng);

// Log Radon-Nikodym density of the Gibbs measure w.r.t. the Gaussian base.
double gibbs_log_weight(const SpectralField& u, Sign sign,
                        std::optional<double> cutoff_K = std::nullopt);

struct GibbsEnsemble {
    std::vector<SpectralField> samples;
    std::vector<double> log_weights;
    Sign sign = Sign::defocusing;
    std::optional<double> cutoff_K;
    std::uint64_t seed = 0;
    double alpha = 1.5;
    double N = 1.0;
};

// Draws `count` samples with per-sample sub-seeds derive_seed(seed, i) and
// attaches Gibbs weights.  gibbs_weights=false leaves log_weights at 0
// (plain GFF ensemble).
GibbsEnsemble build_ensemble(const Dispersion& d, double N, Sign sign,
                             std::optional<double> cutoff_K, std::uint64_t seed,
                             std::size_t count, int threads = 1,
                             bool gibbs_weights = true);

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Self-normalised importance-sampling mean of `observable` with the
// delta-method standard error.  Throws if every weight is -infinity.
Estimate weighted_expectation(const GibbsEnsemble& e,
                              const std::function<double(const SpectralField&)>& observable);

// Same, but for precomputed per-sample observable values.
Estimate weighted_expectation(const std::vector<double>& log_weights,
                              const std::vector<double>& values);

// Monte Carlo L^p/L^2 norm ratio of a random degree-`degree` polynomial in
// i.i.d. standard *real* Gaussians (the Wiener-chaos setting); the chaos
// estimate bounds the ratio by (p-1)^{degree/2}.
double chaos_moment_check(int degree, int p, std::size_t trials, Rng& rng);

// Ensemble (de)serialisation: one-line JSON header followed by raw
// little-endian doubles (per sample: 2*(2*kmax+1) coefficient entries,
// then the log-weight).
void save_ensemble(const GibbsEnsemble& e, const std::string& path);
GibbsEnsemble load_ensemble(const std::string& path);

}  // namespace fnlslab::gibbs
