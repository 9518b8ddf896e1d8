#include "fnlslab/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "fnlslab/parallel.hpp"
#include "json.hpp"

namespace fnlslab::gibbs {

using spectral::TWO_PI;

double mode_variance(long long k, const Dispersion& d) {
    return TWO_PI * std::pow(d.jbb(k), -d.alpha);
}

SpectralField sample_gff(const Dispersion& d, double N, Rng& rng) {
    const int km = std::max(0, spectral::band_kmax(N));
    SpectralField u(km);
    if (spectral::band_kmax(N) < 0) return u;  // N = 1/2: zero field
    for (int k = -km; k <= km; ++k) {
        if (spectral::jb(k) > N) continue;
        const double sigma = std::sqrt(mode_variance(k, d));
        u.set(k, sigma * rng.gaussian_complex());
    }
    return u;
}

double gibbs_log_weight(const SpectralField& u, Sign sign,
                        std::optional<double> cutoff_K) {
    const double q4 = spectral::quartic_integral(u);
    if (sign == Sign::defocusing) return -0.5 * q4;
    if (!cutoff_K)
        throw std::invalid_argument("gibbs_log_weight: focusing needs cutoff_K");
    if (spectral::l2_norm(u) > *cutoff_K)
        return -std::numeric_limits<double>::infinity();
    return 0.5 * q4;
}

GibbsEnsemble build_ensemble(const Dispersion& d, double N, Sign sign,
                             std::optional<double> cutoff_K, std::uint64_t seed,
                             std::size_t count, int threads, bool gibbs_weights) {
    if (count == 0) throw std::invalid_argument("build_ensemble: count == 0");
    if (sign == Sign::focusing && !cutoff_K)
        throw std::invalid_argument("build_ensemble: focusing needs cutoff_K");
    GibbsEnsemble e;
    e.sign = sign;
    e.cutoff_K = cutoff_K;
    e.seed = seed;
    e.alpha = d.alpha;
    e.N = N;
    e.samples.resize(count);
    e.log_weights.assign(count, 0.0);
    parallel_for(count, threads, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        e.samples[i] = sample_gff(d, N, rng);
        if (gibbs_weights) e.log_weights[i] = gibbs_log_weight(e.samples[i], sign, cutoff_K);
    });
    return e;
}

Estimate weighted_expectation(const std::vector<double>& log_weights,
                              const std::vector<double>& values) {
    if (log_weights.size() != values.size() || values.empty())
        throw std::invalid_argument("weighted_expectation: size mismatch");
    double max_lw = -std::numeric_limits<double>::infinity();
    for (double lw : log_weights) max_lw = std::max(max_lw, lw);
    if (!std::isfinite(max_lw))
        throw std::runtime_error("weighted_expectation: degenerate ensemble (all weights zero)");
    double wsum = 0.0, fsum = 0.0;
    std::vector<double> w(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        w[i] = std::isfinite(log_weights[i]) ? std::exp(log_weights[i] - max_lw) : 0.0;
        wsum += w[i];
        fsum += w[i] * values[i];
    }
    Estimate est;
    est.mean = fsum / wsum;
    // delta-method variance of the self-normalised estimator
    double s2 = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double r = w[i] * (values[i] - est.mean);
        s2 += r * r;
    }
    est.stderr_ = std::sqrt(s2) / wsum;
    return est;
}

Estimate weighted_expectation(const GibbsEnsemble& e,
                              const std::function<double(const SpectralField&)>& observable) {
    std::vector<double> vals(e.samples.size());
    for (std::size_t i = 0; i < e.samples.size(); ++i) vals[i] = observable(e.samples[i]);
    return weighted_expectation(e.log_weights, vals);
}

double chaos_moment_check(int degree, int p, std::size_t trials, Rng& rng) {
    if (degree < 1 || p < 2 || p % 2 != 0)
        throw std::invalid_argument("chaos_moment_check: need degree >= 1, even p >= 2");
    // Fixed random polynomial: `nterms` monomials of exactly `degree` factors
    // drawn from a pool of `nvars` independent real Gaussians.
    const int nvars = 8;
    const int nterms = 12;
    std::vector<double> coeff(nterms);
    std::vector<std::vector<int>> vars(nterms, std::vector<int>(degree));
    for (int t = 0; t < nterms; ++t) {
        coeff[t] = rng.gaussian_real();
        for (int j = 0; j < degree; ++j)
            vars[t][j] = static_cast<int>(rng.next_u64() % nvars);
    }
    double m2 = 0.0, mp = 0.0;
    std::vector<double> g(nvars);
    for (std::size_t tr = 0; tr < trials; ++tr) {
        for (auto& x : g) x = rng.gaussian_real();
        double P = 0.0;
        for (int t = 0; t < nterms; ++t) {
            double term = coeff[t];
            for (int j = 0; j < degree; ++j) term *= g[vars[t][j]];
            P += term;
        }
        const double P2 = P * P;
        m2 += P2;
        mp += std::pow(P2, p / 2);
    }
    m2 /= static_cast<double>(trials);
    mp /= static_cast<double>(trials);
    return std::pow(mp, 1.0 / p) / std::sqrt(m2);
}

void save_ensemble(const GibbsEnsemble& e, const std::string& path) {
    nlohmann::json header;
    header["alpha"] = e.alpha;
    header["N"] = e.N;
    header["sign"] = (e.sign == Sign::defocusing) ? "defocusing" : "focusing";
    if (e.cutoff_K) header["K"] = *e.cutoff_K;
    header["seed"] = e.seed;
    header["count"] = e.samples.size();
    header["kmax"] = e.samples.empty() ? 0 : e.samples.front().kmax;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_ensemble: cannot open " + path);
    out << header.dump() << '\n';
    for (std::size_t i = 0; i < e.samples.size(); ++i) {
        const auto& s = e.samples[i];
        for (const auto& c : s.coeffs) {
            const double re = c.real(), im = c.imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof(double));
            out.write(reinterpret_cast<const char*>(&im), sizeof(double));
        }
        const double lw = e.log_weights[i];
        out.write(reinterpret_cast<const char*>(&lw), sizeof(double));
    }
}

GibbsEnsemble load_ensemble(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_ensemble: cannot open " + path);
    std::string header_line;
    std::getline(in, header_line);
    const auto header = nlohmann::json::parse(header_line);
    GibbsEnsemble e;
    e.alpha = header.at("alpha").get<double>();
    e.N = header.at("N").get<double>();
    e.sign = header.at("sign").get<std::string>() == "focusing" ? Sign::focusing
                                                                : Sign::defocusing;
    if (header.contains("K")) e.cutoff_K = header.at("K").get<double>();
    e.seed = header.at("seed").get<std::uint64_t>();
    const auto count = header.at("count").get<std::size_t>();
    const auto kmax = header.at("kmax").get<int>();
    e.samples.assign(count, SpectralField(kmax));
    e.log_weights.assign(count, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        for (auto& c : e.samples[i].coeffs) {
            double re = 0.0, im = 0.0;
            in.read(reinterpret_cast<char*>(&re), sizeof(double));
            in.read(reinterpret_cast<char*>(&im), sizeof(double));
            c = {re, im};
        }
        in.read(reinterpret_cast<char*>(&e.log_weights[i]), sizeof(double));
    }
    if (!in) throw std::runtime_error("load_ensemble: truncated file " + path);
    return e;
}

}  // namespace fnlslab::gibbs
