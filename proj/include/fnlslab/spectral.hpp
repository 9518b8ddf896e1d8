// spectral.hpp — frequency-space fields on the torus T = R/(2*pi*Z).
//
// Conventions (fixed once, everything else follows from them):
//   coefficients   f_k = \int_T f(x) e^{-ikx} dx
//   synthesis      f(x) = (2*pi)^{-1} \sum_k f_k e^{ikx}
//   Parseval       \sum_k |f_k|^2 = 2*pi * \int_T |f|^2 dx
//
// A SpectralField stores the coefficients f_k for |k| <= kmax; everything
// outside the band is identically zero.  Derived quantities:
//   coeff_mass(u)     = sum |u_k|^2
//   l2_integral(u)    = \int |u|^2 dx        = coeff_mass / (2*pi)
//   quartic_integral  = \int |u|^4 dx   (dealiased quadrature, exact)
//
// Multipliers for dispersion exponent alpha in (0, 2]:
//   multiplier(k) = |k|^alpha
//   jb(k)   = <k>  = (1 + k^2)^{1/2}
//   jbb(k)  = (1 + |k|^alpha)^{1/alpha}
//
// Projections use <k> <= N (the counting module uses |k| <= N bounds; the
// two truncations are never converted silently into one another).

#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace fnlslab::spectral {

using cplx = std::complex<double>;

inline constexpr double TWO_PI = 6.283185307179586476925286766559;

struct DealiasError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Dispersion: the exponent alpha and its derived frequency weights.
// ---------------------------------------------------------------------------
struct Dispersion {
    double alpha;

    explicit Dispersion(double a) : alpha(a) {
        if (!(a > 0.0) || a > 2.0)
            throw std::invalid_argument("Dispersion: alpha must lie in (0, 2]");
    }

    // |k|^alpha
    double multiplier(long long k) const {
        if (k == 0) return 0.0;
        return std::pow(std::abs(static_cast<double>(k)), alpha);
    }

    // (1 + |k|^alpha)^(1/alpha), >= 1, even in k, strictly increasing in |k|
    double jbb(long long k) const {
        return std::pow(1.0 + multiplier(k), 1.0 / alpha);
    }
};

// <k> = (1 + k^2)^{1/2}
inline double jb(long long k) {
    const double kd = static_cast<double>(k);
    return std::sqrt(1.0 + kd * kd);
}

inline double jbb(long long k, const Dispersion& d) { return d.jbb(k); }

// Largest integer |k| admitted by the projection <k> <= N; -1 if none.
inline int band_kmax(double N) {
    if (N < 1.0) return -1;
    int k = static_cast<int>(std::floor(std::sqrt(N * N - 1.0)));
    while (jb(k + 1) <= N) ++k;
    while (k >= 0 && jb(k) > N) --k;
    return k;
}

// ---------------------------------------------------------------------------
// SpectralField: band-limited coefficient vector, index k in [-kmax, kmax].
// ---------------------------------------------------------------------------
struct SpectralField {
    int kmax = 0;
    std::vector<cplx> coeffs;  // size 2*kmax+1, entry [k + kmax]

    SpectralField() : coeffs(1, cplx(0.0)) {}
    explicit SpectralField(int km)
        : kmax(km), coeffs(2 * static_cast<std::size_t>(km) + 1, cplx(0.0)) {
        if (km < 0) throw std::invalid_argument("SpectralField: kmax < 0");
    }

    cplx at(int k) const {
        if (k < -kmax || k > kmax) return cplx(0.0);
        return coeffs[static_cast<std::size_t>(k + kmax)];
    }
    void set(int k, cplx v) {
        if (k < -kmax || k > kmax)
            throw std::out_of_range("SpectralField::set: k outside band");
        coeffs[static_cast<std::size_t>(k + kmax)] = v;
    }

    int num_modes() const { return 2 * kmax + 1; }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s) {
        for (auto& c : coeffs) c *= s;
        return *this;
    }
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);

// sum_k |u_k|^2
double coeff_mass(const SpectralField& u);

// \int_T |u|^2 dx = coeff_mass / (2 pi)
inline double l2_integral(const SpectralField& u) { return coeff_mass(u) / TWO_PI; }
inline double l2_norm(const SpectralField& u) { return std::sqrt(l2_integral(u)); }

// (Pi_N u)_k = u_k * 1_{<k> <= N}.  The result keeps the admitted band.
SpectralField project(const SpectralField& u, double N);

// delta_N u = Pi_N u - Pi_{N/2} u
SpectralField delta(const SpectralField& u, double N);

// Physical-space samples u(x_j), x_j = 2 pi j / gridsize, j = 0..gridsize-1.
// Requires gridsize >= 2*kmax+1 (faithful round trip); callers that feed the
// result into a cubic product must use gridsize >= 4*kmax+1 themselves.
std::vector<cplx> to_physical(const SpectralField& u, int gridsize);

// Inverse of to_physical: recovers the coefficients of a band-limited field
// from its grid samples.  kmax defaults to the largest band the grid resolves.
SpectralField from_physical(const std::vector<cplx>& grid);
SpectralField from_physical(const std::vector<cplx>& grid, int kmax);

// (sum_k <k>^{2s} |u_k|^2)^{1/2}
double sobolev_norm(const SpectralField& u, double s);

// \int_T |u|^4 dx via dealiased quadrature (grid of >= 4*kmax+1 points,
// rounded up to a power of two), exact for band-limited u.
double quartic_integral(const SpectralField& u);

// Smallest power of two >= n (transform-friendly grid length).
int next_pow2(int n);

namespace detail {
// In-place radix-2 FFT, sign = -1 forward (e^{-i...}), +1 inverse (no 1/M).
void fft_pow2(std::vector<cplx>& a, int sign);

// Synthesis onto a power-of-two grid: returns (2 pi)^{-1} sum u_k e^{ikx_j}.
std::vector<cplx> synth_pow2(const SpectralField& u, int gridsize);

// Analysis from a power-of-two grid: u_k = (2 pi / M) sum_j g_j e^{-ikx_j}.
SpectralField analyze_pow2(const std::vector<cplx>& grid, int kmax);
}  // namespace detail

}  // namespace fnlslab::spectral
