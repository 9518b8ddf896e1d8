#include "doctest.h"

#include <cmath>
#include <complex>

#include "fnlslab/rng.hpp"
#include "fnlslab/spectral.hpp"

using namespace fnlslab;
using namespace fnlslab::spectral;

namespace {

SpectralField random_field(int kmax, std::uint64_t seed) {
    Rng rng(seed);
    SpectralField u(kmax);
    for (int k = -kmax; k <= kmax; ++k) u.set(k, rng.gaussian_complex());
    return u;
}

// O(kmax^3) direct convolution oracle for the cubic product |u|^2 u,
// independent of the grid route: ((|u|^2 u))_k = (2 pi)^{-2} sum_{a-b+c=k}.
cplx cubic_direct(const SpectralField& u, int k) {
    cplx acc(0.0);
    for (int a = -u.kmax; a <= u.kmax; ++a)
        for (int b = -u.kmax; b <= u.kmax; ++b) {
            const int c = k - a + b;
            if (c < -u.kmax || c > u.kmax) continue;
            acc += u.at(a) * std::conj(u.at(b)) * u.at(c);
        }
    return acc / (TWO_PI * TWO_PI);
}

// quadruple-sum oracle for \int |u|^4: (2 pi)^{-3} sum_{a-b+c-d=0}
double quartic_direct(const SpectralField& u) {
    cplx acc(0.0);
    for (int a = -u.kmax; a <= u.kmax; ++a)
        for (int b = -u.kmax; b <= u.kmax; ++b)
            for (int c = -u.kmax; c <= u.kmax; ++c) {
                const int d = a - b + c;
                if (d < -u.kmax || d > u.kmax) continue;
                acc += u.at(a) * std::conj(u.at(b)) * u.at(c) * std::conj(u.at(d));
            }
    return acc.real() / (TWO_PI * TWO_PI * TWO_PI);
}

}  // namespace

TEST_CASE("dispersion multipliers") {
    CHECK_THROWS_AS(Dispersion(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Dispersion(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(Dispersion(2.5), std::invalid_argument);

    const Dispersion d15(1.5);
    CHECK(d15.jbb(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(Dispersion(2.0).jbb(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    // extended-precision oracle for (1 + 3^1.5)^(2/3)
    const long double oracle =
        powl(1.0L + powl(3.0L, 1.5L), 2.0L / 3.0L);
    CHECK(d15.jbb(3) == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-14));
    CHECK(d15.jbb(-3) == d15.jbb(3));
    CHECK(d15.multiplier(0) == 0.0);
    CHECK(d15.multiplier(-2) == d15.multiplier(2));
    // jbb strictly increasing in |k|
    for (int k = 0; k < 20; ++k) CHECK(d15.jbb(k) < d15.jbb(k + 1));
}

TEST_CASE("projection uses <k> and is idempotent") {
    auto u = random_field(4, 7);
    // N = 1/2 kills everything
    CHECK(coeff_mass(project(u, 0.5)) == 0.0);
    // single k=0 mode survives N = 1
    SpectralField v(0);
    v.set(0, cplx(1.0, 0.0));
    CHECK(project(v, 1.0).at(0) == cplx(1.0, 0.0));
    // N = 2: <2> = sqrt(5) > 2, so only k in {0, +-1} survive
    auto p = project(u, 2.0);
    CHECK(p.at(2) == cplx(0.0));
    CHECK(p.at(-2) == cplx(0.0));
    CHECK(p.at(1) == u.at(1));
    CHECK(p.at(0) == u.at(0));
    // idempotent
    auto pp = project(p, 2.0);
    for (int k = -pp.kmax; k <= pp.kmax; ++k) CHECK(pp.at(k) == p.at(k));
}

TEST_CASE("dyadic deltas sum to the projection") {
    auto u = random_field(16, 11);
    SpectralField acc(0);
    for (double N = 1.0; N <= 16.0; N *= 2.0) acc += delta(u, N);
    const auto p = project(u, 16.0);
    for (int k = -16; k <= 16; ++k)
        CHECK(std::abs(acc.at(k) - p.at(k)) <= 1e-15 * std::abs(p.at(k)));
}

TEST_CASE("to_physical conventions and round trip") {
    SpectralField v(0);
    v.set(0, cplx(1.0, 0.0));
    const auto grid = to_physical(v, 8);
    for (const auto& g : grid)
        CHECK(std::abs(g - cplx(1.0 / TWO_PI, 0.0)) < 1e-15);

    auto u = random_field(16, 23);
    const auto g65 = to_physical(u, 65);  // odd size exercises the direct path
    const auto back = from_physical(g65, 16);
    for (int k = -16; k <= 16; ++k)
        CHECK(std::abs(back.at(k) - u.at(k)) <= 1e-12 * std::max(1.0, std::abs(u.at(k))));

    CHECK_THROWS_AS(to_physical(u, 32), DealiasError);  // 32 < 2*16+1
}

TEST_CASE("Parseval between coefficient mass and quadrature") {
    auto u = random_field(12, 31);
    for (int M : {25, 32, 64, 101}) {
        const auto grid = to_physical(u, M);
        double quad = 0.0;
        for (const auto& g : grid) quad += std::norm(g);
        quad *= TWO_PI / M;  // \int |u|^2 dx
        CHECK(coeff_mass(u) == doctest::Approx(TWO_PI * quad).epsilon(1e-12));
    }
}

TEST_CASE("dealiased cubic product equals direct convolution") {
    auto u = random_field(4, 43);
    const int M = next_pow2(4 * u.kmax + 1);
    auto grid = detail::synth_pow2(u, M);
    for (auto& g : grid) g *= std::norm(g);
    const auto cubic = detail::analyze_pow2(grid, 3 * u.kmax);
    for (int k = -3 * u.kmax; k <= 3 * u.kmax; ++k)
        CHECK(std::abs(cubic.at(k) - cubic_direct(u, k)) < 1e-12);
}

TEST_CASE("quartic integral against the quadruple-sum oracle") {
    CHECK(quartic_integral(SpectralField(0)) == 0.0);

    // constant field u = c: single k = 0 coefficient 2 pi c
    const cplx c(0.7, -0.3);
    SpectralField v(0);
    v.set(0, TWO_PI * c);
    CHECK(quartic_integral(v) ==
          doctest::Approx(TWO_PI * std::pow(std::abs(c), 4.0)).epsilon(1e-13));

    auto u = random_field(4, 57);
    CHECK(quartic_integral(u) == doctest::Approx(quartic_direct(u)).epsilon(1e-10));

    // scaling and positivity
    SpectralField w = u;
    w *= 1.7;
    CHECK(quartic_integral(w) ==
          doctest::Approx(std::pow(1.7, 4.0) * quartic_integral(u)).epsilon(1e-12));
    CHECK(quartic_integral(u) >= 0.0);
}

TEST_CASE("sobolev norm") {
    CHECK(sobolev_norm(SpectralField(0), 2.0) == 0.0);
    SpectralField v(0);
    v.set(0, cplx(1.0, 0.0));
    CHECK(sobolev_norm(v, 3.7) == doctest::Approx(1.0).epsilon(1e-15));
    SpectralField w(1);
    w.set(-1, cplx(1.0, 0.0));
    w.set(0, cplx(1.0, 0.0));
    w.set(1, cplx(1.0, 0.0));
    CHECK(sobolev_norm(w, 1.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
}
