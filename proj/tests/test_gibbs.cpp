#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "fnlslab/gibbs.hpp"

using namespace fnlslab;
using namespace fnlslab::gibbs;
using spectral::cplx;
using spectral::SpectralField;
using spectral::TWO_PI;

TEST_CASE("gff sampler basics") {
    const Dispersion d(1.5);
    Rng rng0(1);
    CHECK(spectral::coeff_mass(sample_gff(d, 0.5, rng0)) == 0.0);

    Rng r1(42), r2(42);
    const auto a = sample_gff(d, 8.0, r1);
    const auto b = sample_gff(d, 8.0, r2);
    REQUIRE(a.kmax == b.kmax);
    for (int k = -a.kmax; k <= a.kmax; ++k) CHECK(a.at(k) == b.at(k));
}

TEST_CASE("gff per-mode variance calibration") {
    const Dispersion d(1.5);
    const std::size_t n = 100000;
    const double N = 8.0;
    const int km = spectral::band_kmax(N);
    std::vector<double> acc(static_cast<std::size_t>(2 * km + 1), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(derive_seed(2024, i));
        const auto u = sample_gff(d, N, rng);
        for (int k = -km; k <= km; ++k)
            acc[static_cast<std::size_t>(k + km)] += std::norm(u.at(k));
    }
    // |u_k|^2 / var is Exp(1): sd of the mean estimate is var/sqrt(n)
    for (int k = -km; k <= km; ++k) {
        const double var = mode_variance(k, d);
        const double mean = acc[static_cast<std::size_t>(k + km)] / n;
        CHECK(std::abs(mean - var) < 4.0 * var / std::sqrt(static_cast<double>(n)));
    }
    // spot value at k = 2: 2 pi <<2>>^{-1.5}
    CHECK(mode_variance(2, d) ==
          doctest::Approx(TWO_PI * std::pow(d.jbb(2), -1.5)).epsilon(1e-14));
}

TEST_CASE("gibbs log weights") {
    CHECK(gibbs_log_weight(SpectralField(0), Sign::defocusing) == 0.0);

    const cplx c(0.8, 0.1);
    SpectralField v(0);
    v.set(0, TWO_PI * c);  // u = c
    const double pi = TWO_PI / 2.0;
    CHECK(gibbs_log_weight(v, Sign::defocusing) ==
          doctest::Approx(-pi * std::pow(std::abs(c), 4.0)).epsilon(1e-13));

    // focusing indicator
    CHECK_THROWS_AS(gibbs_log_weight(v, Sign::focusing), std::invalid_argument);
    const double l2 = spectral::l2_norm(v);
    CHECK(std::isinf(gibbs_log_weight(v, Sign::focusing, l2 * 0.5)));
    CHECK(gibbs_log_weight(v, Sign::focusing, l2 * 2.0) ==
          doctest::Approx(pi * std::pow(std::abs(c), 4.0)).epsilon(1e-13));
}

TEST_CASE("weighted expectation basics") {
    const Dispersion d(1.5);
    auto ens = build_ensemble(d, 4.0, Sign::defocusing, std::nullopt, 5, 500, 1);

    // constant observable
    auto est = weighted_expectation(ens, [](const SpectralField&) { return 3.0; });
    CHECK(est.mean == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(est.stderr_ == doctest::Approx(0.0).epsilon(1e-15));

    // uniform weights reduce to the plain sample mean
    GibbsEnsemble flat = ens;
    for (auto& lw : flat.log_weights) lw = 0.0;
    auto m = weighted_expectation(flat, [](const SpectralField& u) {
        return spectral::coeff_mass(u);
    });
    double plain = 0.0;
    for (const auto& s : flat.samples) plain += spectral::coeff_mass(s);
    plain /= static_cast<double>(flat.samples.size());
    CHECK(m.mean == doctest::Approx(plain).epsilon(1e-14));

    // degenerate ensemble
    GibbsEnsemble dead = ens;
    for (auto& lw : dead.log_weights) lw = -std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(weighted_expectation(dead, [](const SpectralField&) { return 1.0; }),
                    std::runtime_error);
}

TEST_CASE("defocusing reweighting against a rejection-sampling oracle") {
    const Dispersion d(1.5);
    const double N = 4.0;
    const std::size_t count = 60000;
    auto ens = build_ensemble(d, N, Sign::defocusing, std::nullopt, 99, count, 1);
    const auto massf = [](const SpectralField& u) { return spectral::l2_integral(u); };

    const auto gibbs_est = weighted_expectation(
        ens, [&](const SpectralField& u) { return massf(u); });

    // rejection oracle: accept sample i with prob exp(lw_i - max lw)
    double max_lw = -1e300;
    for (double lw : ens.log_weights) max_lw = std::max(max_lw, lw);
    double acc_sum = 0.0, acc_sq = 0.0;
    std::size_t acc_n = 0;
    Rng coin(7);
    for (std::size_t i = 0; i < count; ++i) {
        if (coin.uniform01() <= std::exp(ens.log_weights[i] - max_lw)) {
            const double v = massf(ens.samples[i]);
            acc_sum += v;
            acc_sq += v * v;
            ++acc_n;
        }
    }
    REQUIRE(acc_n > 100);
    const double rej_mean = acc_sum / acc_n;
    const double rej_sd =
        std::sqrt((acc_sq / acc_n - rej_mean * rej_mean) / acc_n);
    const double tol =
        3.0 * std::sqrt(gibbs_est.stderr_ * gibbs_est.stderr_ + rej_sd * rej_sd);
    CHECK(std::abs(gibbs_est.mean - rej_mean) < tol);

    // and the reweighted mass is strictly below the GFF mass
    GibbsEnsemble flat = ens;
    for (auto& lw : flat.log_weights) lw = 0.0;
    const auto gff_est = weighted_expectation(
        flat, [&](const SpectralField& u) { return massf(u); });
    CHECK(gibbs_est.mean < gff_est.mean);
}

TEST_CASE("wiener chaos moment ratios") {
    Rng rng(2718);
    CHECK(chaos_moment_check(1, 2, 2000, rng) == doctest::Approx(1.0).epsilon(1e-12));

    // single real Gaussian, p = 4: ratio -> (E g^4)^{1/4} = 3^{1/4}
    Rng rng2(314);
    const double r14 = chaos_moment_check(1, 4, 400000, rng2);
    CHECK(std::abs(r14 - std::pow(3.0, 0.25)) < 0.02);
    CHECK(r14 <= std::sqrt(3.0));

    Rng rng3(999);
    const double r34 = chaos_moment_check(3, 4, 200000, rng3);
    CHECK(r34 <= std::pow(3.0, 1.5) * 1.05);
}

TEST_CASE("ensemble serialisation round trip") {
    const Dispersion d(1.2);
    auto ens = build_ensemble(d, 4.0, Sign::focusing, 5.0, 31337, 17, 1);
    const std::string path = "ensemble_roundtrip.bin";
    save_ensemble(ens, path);
    const auto back = load_ensemble(path);
    std::remove(path.c_str());
    REQUIRE(back.samples.size() == ens.samples.size());
    CHECK(back.alpha == ens.alpha);
    CHECK(back.N == ens.N);
    CHECK(back.seed == ens.seed);
    REQUIRE(back.cutoff_K.has_value());
    CHECK(*back.cutoff_K == 5.0);
    for (std::size_t i = 0; i < ens.samples.size(); ++i) {
        CHECK(back.log_weights[i] == ens.log_weights[i]);
        for (int k = -ens.samples[i].kmax; k <= ens.samples[i].kmax; ++k)
            CHECK(back.samples[i].at(k) == ens.samples[i].at(k));
    }
}
