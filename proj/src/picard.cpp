#include "fnlslab/picard.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "fnlslab/parallel.hpp"

namespace fnlslab::picard {

namespace {

int snapped_floor(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-9) return static_cast<int>(r);
    return static_cast<int>(std::floor(x));
}

struct Tables {
    std::vector<double> pw;    // |n|^alpha
    std::vector<double> s2;    // <<n>>^{-alpha}
    explicit Tables(int nmax, double alpha)
        : pw(static_cast<std::size_t>(nmax) + 1),
          s2(static_cast<std::size_t>(nmax) + 1) {
        for (int n = 0; n <= nmax; ++n) {
            pw[static_cast<std::size_t>(n)] =
                n == 0 ? 0.0 : std::pow(static_cast<double>(n), alpha);
            s2[static_cast<std::size_t>(n)] =
                1.0 / (1.0 + pw[static_cast<std::size_t>(n)]);
        }
    }
};

}  // namespace

PicardQuery::PicardQuery(int N_, double delta_, double alpha_, double t_,
                         BandSigns signs_)
    : N(N_), delta(delta_), alpha(alpha_), t(t_), signs(signs_) {
    if (N < 4) throw std::invalid_argument("PicardQuery: N >= 4 required");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("PicardQuery: delta in (0,1) required");
    const double floor_exp = std::pow(static_cast<double>(N), 1.0 - delta);
    band_min_abs = snapped_floor(floor_exp) + 1;  // strict |n| > N^{1-delta}
    band_max_abs = N - 1;                         // strict |n| < N
    if (band_min_abs > band_max_abs)
        throw std::invalid_argument("PicardQuery: empty band");
}

cplx theta(double t, double phi) {
    const double x = t * phi;
    if (std::abs(x) < 1e-6) {
        // t * (1 + ix/2 + (ix)^2/6 + (ix)^3/24)
        const cplx ix(0.0, x);
        return t * (1.0 + ix / 2.0 + ix * ix / 6.0 + ix * ix * ix / 24.0);
    }
    const cplx num = std::polar(1.0, x) - 1.0;
    return num / cplx(0.0, phi);
}

double theta_abs2(double t, double phi) {
    const double x = t * phi;
    if (std::abs(x) < 1e-6) return t * t * (1.0 - x * x / 12.0);
    const double s = std::sin(0.5 * x);
    return 4.0 * s * s / (phi * phi);
}

SpectralField picard2_sample(const PicardQuery& q, Rng& rng,
                             bool include_outer_phase) {
    const int kout = q.N - 1;  // <k> <= N for integer N means |k| <= N-1
    const Tables tb(q.N, q.alpha);

    // Gaussians for |n| in the band, drawn in ascending n order.
    std::vector<cplx> a(static_cast<std::size_t>(2 * q.N + 1), cplx(0.0));
    auto ai = [&](int n) -> cplx& { return a[static_cast<std::size_t>(n + q.N)]; };
    for (int n = -q.band_max_abs; n <= q.band_max_abs; ++n) {
        if (!q.in_band(n)) continue;
        ai(n) = rng.gaussian_complex() *
                std::sqrt(tb.s2[static_cast<std::size_t>(std::abs(n))]);
    }

    SpectralField Z(kout);
    for (int k = -kout; k <= kout; ++k) {
        cplx acc(0.0);
        for (int k1 = -q.band_max_abs; k1 <= q.band_max_abs; ++k1) {
            if (!q.in_band(k1) || k1 == k) continue;
            const cplx a1 = ai(k1);
            for (int k3 = -q.band_max_abs; k3 <= q.band_max_abs; ++k3) {
                if (!q.in_band(k3) || k3 == k) continue;
                const int k2 = k1 + k3 - k;
                if (!q.in_band(k2)) continue;
                const double phi = tb.pw[static_cast<std::size_t>(std::abs(k1))] -
                                   tb.pw[static_cast<std::size_t>(std::abs(k2))] +
                                   tb.pw[static_cast<std::size_t>(std::abs(k3))] -
                                   tb.pw[static_cast<std::size_t>(std::abs(k))];
                acc += theta(q.t, phi) * a1 * std::conj(ai(k2)) * ai(k3);
            }
        }
        if (q.in_band(k)) acc -= q.t * std::norm(ai(k)) * ai(k);
        cplx zk = cplx(0.0, -1.0) * acc;
        if (include_outer_phase)
            zk *= std::polar(1.0, -q.t * tb.pw[static_cast<std::size_t>(std::abs(k))]);
        Z.set(k, zk);
    }
    return Z;
}

namespace {

// Wick contribution of output frequency k (ordered triple sum folded over
// the k1 <= k3 swap symmetry).
double wick_for_k(const PicardQuery& q, const Tables& tb, int k) {
    const int lo = q.band_min_abs, hi = q.band_max_abs;
    const double pk = tb.pw[static_cast<std::size_t>(std::abs(k))];
    double acc = 0.0;
    // band runs: [-hi,-lo] u [lo,hi], or [lo,hi] alone for the positive band;
    // iterate k1, then k3 >= k1 within each run
    std::vector<std::array<int, 2>> runs;
    if (q.signs == BandSigns::both) runs.push_back({-hi, -lo});
    runs.push_back({lo, hi});
    for (const auto& r1 : runs) {
        for (int k1 = r1[0]; k1 <= r1[1]; ++k1) {
            if (k1 == k) continue;
            const double p1 = tb.pw[static_cast<std::size_t>(std::abs(k1))];
            const double s1 = tb.s2[static_cast<std::size_t>(std::abs(k1))];
            for (const auto& r3 : runs) {
                const int k3lo = std::max(r3[0], k1);
                for (int k3 = k3lo; k3 <= r3[1]; ++k3) {
                    if (k3 == k) continue;
                    const int k2 = k1 + k3 - k;
                    if (!q.in_band(k2)) continue;
                    const int a2 = std::abs(k2);
                    const double phi = p1 - tb.pw[static_cast<std::size_t>(a2)] +
                                       tb.pw[static_cast<std::size_t>(std::abs(k3))] -
                                       pk;
                    const double pair_w = (k1 == k3) ? 1.0 : 2.0;
                    acc += pair_w * theta_abs2(q.t, phi) * s1 *
                           tb.s2[static_cast<std::size_t>(a2)] *
                           tb.s2[static_cast<std::size_t>(std::abs(k3))];
                }
            }
        }
    }
    acc *= 2.0;  // direct + swap Gaussian pairings per ordered triple
    if (q.in_band(k)) {
        const double s = tb.s2[static_cast<std::size_t>(std::abs(k))];
        acc += 6.0 * q.t * q.t * s * s * s;
    }
    return acc;
}

}  // namespace

double picard2_wick_norm(const PicardQuery& q, int threads) {
    const Tables tb(q.N, q.alpha);
    const int kout = q.N - 1;
    if (q.signs == BandSigns::both) {
        // k -> -k symmetry of the band: compute k >= 0, double k > 0
        std::vector<double> per_k(static_cast<std::size_t>(kout) + 1, 0.0);
        parallel_for(per_k.size(), threads, [&](std::size_t i) {
            per_k[i] = wick_for_k(q, tb, static_cast<int>(i));
        });
        double total = per_k[0];
        for (std::size_t i = 1; i < per_k.size(); ++i) total += 2.0 * per_k[i];
        return total;
    }
    std::vector<double> per_k(static_cast<std::size_t>(2 * kout) + 1, 0.0);
    parallel_for(per_k.size(), threads, [&](std::size_t i) {
        per_k[i] = wick_for_k(q, tb, static_cast<int>(i) - kout);
    });
    double total = 0.0;
    for (double v : per_k) total += v;
    return total;
}

std::vector<double> picard2_wick_profile(const PicardQuery& q) {
    const Tables tb(q.N, q.alpha);
    const int kout = q.N - 1;
    std::vector<double> prof(static_cast<std::size_t>(2 * kout + 1), 0.0);
    for (int k = -kout; k <= kout; ++k)
        prof[static_cast<std::size_t>(k + kout)] = wick_for_k(q, tb, k);
    return prof;
}

McEstimate picard2_mc_norm(const PicardQuery& q, std::size_t draws,
                           std::uint64_t seed, int threads) {
    if (draws == 0) throw std::invalid_argument("picard2_mc_norm: draws == 0");
    std::vector<double> vals(draws, 0.0);
    parallel_for(draws, threads, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        vals[i] = spectral::coeff_mass(picard2_sample(q, rng));
    });
    McEstimate est;
    est.draws = draws;
    for (double v : vals) est.mean += v;
    est.mean /= static_cast<double>(draws);
    double s2 = 0.0;
    for (double v : vals) s2 += (v - est.mean) * (v - est.mean);
    est.stderr_ = std::sqrt(s2 / (static_cast<double>(draws) - 1.0)) /
                  std::sqrt(static_cast<double>(draws));
    return est;
}

std::vector<ScalingRecord> scaling_study(const std::vector<double>& alphas,
                                         const std::vector<int>& Ns, double delta,
                                         double t, std::uint64_t seed,
                                         std::size_t mc_draws, int mc_max_N,
                                         int threads, BandSigns signs) {
    if (Ns.size() < 3) throw std::invalid_argument("scaling_study: need >= 3 sizes");
    for (std::size_t i = 1; i < Ns.size(); ++i)
        if (Ns[i] <= Ns[i - 1])
            throw std::invalid_argument("scaling_study: Ns must be strictly increasing");
    std::vector<ScalingRecord> out;
    const double nan = std::nan("");
    for (double alpha : alphas) {
        std::vector<double> logN, logV;
        for (int N : Ns) {
            const PicardQuery q(N, delta, alpha, t, signs);
            ScalingRecord rec{};
            rec.alpha = alpha;
            rec.N = N;
            rec.wick_norm = picard2_wick_norm(q, threads);
            rec.mc_norm = nan;
            rec.mc_stderr = nan;
            if (mc_draws > 0 && N <= mc_max_N) {
                const auto mc = picard2_mc_norm(q, mc_draws, seed, threads);
                rec.mc_norm = mc.mean;
                rec.mc_stderr = mc.stderr_;
            }
            logN.push_back(std::log(static_cast<double>(N)));
            logV.push_back(std::log(rec.wick_norm));
            // least-squares slope over the points so far
            const std::size_t n = logN.size();
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < n; ++i) {
                sx += logN[i];
                sy += logV[i];
                sxx += logN[i] * logN[i];
                sxy += logN[i] * logV[i];
            }
            rec.slope_so_far =
                n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : nan;
            const double lg = std::log(static_cast<double>(N));
            rec.ratio_log3 = rec.wick_norm / (lg * lg * lg);
            out.push_back(rec);
        }
    }
    return out;
}

}  // namespace fnlslab::picard
