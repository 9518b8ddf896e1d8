#include "fnlslab/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace fnlslab::spectral {

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    if (o.kmax > kmax) {
        SpectralField grown(o.kmax);
        for (int k = -kmax; k <= kmax; ++k) grown.set(k, at(k));
        *this = std::move(grown);
    }
    for (int k = -o.kmax; k <= o.kmax; ++k)
        coeffs[static_cast<std::size_t>(k + kmax)] += o.at(k);
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    SpectralField neg = o;
    neg *= -1.0;
    return (*this += neg);
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }

double coeff_mass(const SpectralField& u) {
    double m = 0.0;
    for (const auto& c : u.coeffs) m += std::norm(c);
    return m;
}

SpectralField project(const SpectralField& u, double N) {
    const int km = std::min(u.kmax, std::max(0, band_kmax(N)));
    SpectralField out(std::max(km, 0));
    if (band_kmax(N) < 0) return out;  // Pi_{1/2} = 0
    for (int k = -km; k <= km; ++k)
        if (jb(k) <= N) out.set(k, u.at(k));
    return out;
}

SpectralField delta(const SpectralField& u, double N) {
    return project(u, N) - project(u, N / 2.0);
}

int next_pow2(int n) {
    int m = 1;
    while (m < n) m <<= 1;
    return m;
}

namespace detail {

void fft_pow2(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (n < 2) return;
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * TWO_PI / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cplx even = a[i + j];
                const cplx odd = a[i + j + len / 2] * w;
                a[i + j] = even + odd;
                a[i + j + len / 2] = even - odd;
                w *= wlen;
            }
        }
    }
}

std::vector<cplx> synth_pow2(const SpectralField& u, int gridsize) {
    std::vector<cplx> bins(static_cast<std::size_t>(gridsize), cplx(0.0));
    for (int k = -u.kmax; k <= u.kmax; ++k) {
        const int m = ((k % gridsize) + gridsize) % gridsize;
        bins[static_cast<std::size_t>(m)] += u.at(k);
    }
    fft_pow2(bins, +1);  // sum_m bins_m e^{+2 pi i j m / M} = sum_k u_k e^{ikx_j}
    for (auto& v : bins) v /= TWO_PI;
    return bins;
}

SpectralField analyze_pow2(const std::vector<cplx>& grid, int kmax) {
    const int M = static_cast<int>(grid.size());
    std::vector<cplx> work = grid;
    fft_pow2(work, -1);
    SpectralField u(kmax);
    const double scale = TWO_PI / static_cast<double>(M);
    for (int k = -kmax; k <= kmax; ++k) {
        const int m = ((k % M) + M) % M;
        u.set(k, work[static_cast<std::size_t>(m)] * scale);
    }
    return u;
}

}  // namespace detail

std::vector<cplx> to_physical(const SpectralField& u, int gridsize) {
    if (gridsize < 2 * u.kmax + 1)
        throw DealiasError("to_physical: gridsize " + std::to_string(gridsize) +
                           " < 2*kmax+1 = " + std::to_string(2 * u.kmax + 1));
    if ((gridsize & (gridsize - 1)) == 0)
        return detail::synth_pow2(u, gridsize);
    std::vector<cplx> grid(static_cast<std::size_t>(gridsize), cplx(0.0));
    for (int j = 0; j < gridsize; ++j) {
        const double x = TWO_PI * j / gridsize;
        cplx s(0.0);
        for (int k = -u.kmax; k <= u.kmax; ++k)
            s += u.at(k) * std::polar(1.0, k * x);
        grid[static_cast<std::size_t>(j)] = s / TWO_PI;
    }
    return grid;
}

SpectralField from_physical(const std::vector<cplx>& grid) {
    const int M = static_cast<int>(grid.size());
    return from_physical(grid, (M - 1) / 2);
}

SpectralField from_physical(const std::vector<cplx>& grid, int kmax) {
    const int M = static_cast<int>(grid.size());
    if (M < 2 * kmax + 1)
        throw DealiasError("from_physical: gridsize " + std::to_string(M) +
                           " < 2*kmax+1 = " + std::to_string(2 * kmax + 1));
    if ((M & (M - 1)) == 0) return detail::analyze_pow2(grid, kmax);
    SpectralField u(kmax);
    const double scale = TWO_PI / static_cast<double>(M);
    for (int k = -kmax; k <= kmax; ++k) {
        cplx s(0.0);
        for (int j = 0; j < M; ++j) {
            const double x = TWO_PI * j / M;
            s += grid[static_cast<std::size_t>(j)] * std::polar(1.0, -k * x);
        }
        u.set(k, s * scale);
    }
    return u;
}

double sobolev_norm(const SpectralField& u, double s) {
    double acc = 0.0;
    for (int k = -u.kmax; k <= u.kmax; ++k)
        acc += std::pow(jb(k), 2.0 * s) * std::norm(u.at(k));
    return std::sqrt(acc);
}

double quartic_integral(const SpectralField& u) {
    const int M = next_pow2(4 * u.kmax + 1);
    const auto grid = detail::synth_pow2(u, M);
    double acc = 0.0;
    for (const auto& v : grid) {
        const double a = std::norm(v);
        acc += a * a;
    }
    return acc * TWO_PI / static_cast<double>(M);
}

}  // namespace fnlslab::spectral
