#include "fnlslab/dynamics.hpp"

#include <cmath>
#include <cstdint>
#include <utility>

namespace fnlslab::dynamics {

using spectral::band_kmax;
using spectral::coeff_mass;
using spectral::jb;
using spectral::next_pow2;
using spectral::quartic_integral;
using spectral::TWO_PI;

namespace {

constexpr double LAMBDA = 1.0 / (TWO_PI * TWO_PI);  // (|u|^2 u)_k = LAMBDA * C_k

double fint_sq(const SpectralField& u) {
    // fint |u|^2 = (2 pi)^{-1} \int |u|^2 dx = (2 pi)^{-2} sum |u_k|^2
    return coeff_mass(u) * LAMBDA;
}

void check_band_limited(const SpectralField& u, double N, const char* who) {
    for (int k = -u.kmax; k <= u.kmax; ++k)
        if (jb(k) > N && u.at(k) != spectral::cplx(0.0))
            throw std::invalid_argument(std::string(who) +
                                        ": field not band-limited by N");
}

// ---------------------------------------------------------------------------
// Lane-parallel RK4 engine on the integrating-factor field.
// State is stored k-major with B samples packed per entry as a SIMD lane
// vector, so every arithmetic statement below is one packed operation.
// B = 1 reproduces the scalar path (up to fused-multiply contraction).
// ---------------------------------------------------------------------------
template <int B>
struct LanePack;
template <>
struct LanePack<1> {
    typedef double type __attribute__((vector_size(8)));
};
template <>
struct LanePack<4> {
    typedef double type __attribute__((vector_size(32)));
};
template <>
struct LanePack<8> {
    typedef double type __attribute__((vector_size(64)));
};

template <int B>
struct Engine {
    using Pack = typename LanePack<B>::type;
    static Pack splat(double x) {
        Pack p;
        for (int l = 0; l < B; ++l) p[l] = x;
        return p;
    }

    int km, K;
    double sgn;        // +1 defocusing, -1 focusing
    bool renorm, nl_on;
    std::vector<double> mult;            // |k|^alpha, size K
    std::vector<double> pr, pi_;         // stage phase e^{-i t |k|^alpha}, K
    std::vector<double> hpr, hpi;        // half-step phase factor, K

    std::vector<Pack> wr, wi;            // state, K packs
    std::vector<Pack> zr, zi, nr, ni;    // work, K packs
    std::vector<Pack> dr, di;            // autocorrelation, 4 km + 1 packs
    std::vector<Pack> s1r, s1i, s2r, s2i, s3r, s3i, s4r, s4i, tmpr, tmpi;

    Engine(int kmax, const Dispersion& d, Sign sign, bool renormalize,
           bool nl_enabled)
        : km(kmax), K(2 * kmax + 1),
          sgn(sign == Sign::defocusing ? 1.0 : -1.0),
          renorm(renormalize), nl_on(nl_enabled), mult(K) {
        for (int k = -km; k <= km; ++k)
            mult[static_cast<std::size_t>(k + km)] = d.multiplier(k);
        const Pack zero = splat(0.0);
        for (auto* v : {&wr, &wi, &zr, &zi, &nr, &ni, &s1r, &s1i, &s2r, &s2i,
                        &s3r, &s3i, &s4r, &s4i, &tmpr, &tmpi})
            v->assign(static_cast<std::size_t>(K), zero);
        dr.assign(static_cast<std::size_t>(4 * km + 1), zero);
        di.assign(static_cast<std::size_t>(4 * km + 1), zero);
        pr.assign(K, 0.0);
        pi_.assign(K, 0.0);
    }

    void load(const std::vector<SpectralField>& fields) {
        for (int l = 0; l < B; ++l)
            for (int k = -km; k <= km; ++k) {
                const auto c = fields[static_cast<std::size_t>(l)].at(k);
                wr[static_cast<std::size_t>(k + km)][l] = c.real();
                wi[static_cast<std::size_t>(k + km)][l] = c.imag();
            }
    }

    void stage_phase(double t) {
        for (int k = 0; k < K; ++k) {
            pr[k] = std::cos(t * mult[k]);
            pi_[k] = -std::sin(t * mult[k]);  // e^{-i t |k|^alpha}
        }
    }

    // z = P . x  (per-k unimodular phase applied to all lanes)
    void apply_phase(const std::vector<Pack>& xr, const std::vector<Pack>& xi) {
        for (int k = 0; k < K; ++k) {
            const Pack a = splat(pr[k]), b = splat(pi_[k]);
            zr[k] = a * xr[k] - b * xi[k];
            zi[k] = a * xi[k] + b * xr[k];
        }
    }

    // n = LAMBDA * ( (d*z) - 2 d_0 z * renorm ),  d_m = sum_b z_{b+m} conj(z_b)
    void conv_nonlinearity() {
        const Pack* __restrict Zr = zr.data();
        const Pack* __restrict Zi = zi.data();
        Pack* __restrict Dr = dr.data();
        Pack* __restrict Di = di.data();
        for (int m = 0; m <= 2 * km; ++m) {
            Pack ar = splat(0.0), ai = splat(0.0);
            for (int b = 0; b + m < K; ++b) {
                ar += Zr[b + m] * Zr[b] + Zi[b + m] * Zi[b];
                ai += Zi[b + m] * Zr[b] - Zr[b + m] * Zi[b];
            }
            Dr[m + 2 * km] = ar;
            Di[m + 2 * km] = ai;
            if (m > 0) {  // d_{-m} = conj(d_m)
                Dr[2 * km - m] = ar;
                Di[2 * km - m] = -ai;
            }
        }
        const Pack d0r = Dr[2 * km], d0i = Di[2 * km];
        const Pack lam = splat(LAMBDA);
        const Pack two = splat(renorm ? 2.0 : 0.0);
        Pack* __restrict Nr = nr.data();
        Pack* __restrict Ni = ni.data();
        for (int k = 0; k < K; ++k) {
            Pack ar = splat(0.0), ai = splat(0.0);
            const Pack* __restrict Dkr = Dr + k + 2 * km;
            const Pack* __restrict Dki = Di + k + 2 * km;
            for (int j = 0; j < K; ++j) {
                ar += Dkr[-j] * Zr[j] - Dki[-j] * Zi[j];
                ai += Dkr[-j] * Zi[j] + Dki[-j] * Zr[j];
            }
            Nr[k] = lam * (ar - two * (d0r * Zr[k] - d0i * Zi[k]));
            Ni[k] = lam * (ai - two * (d0r * Zi[k] + d0i * Zr[k]));
        }
    }

    // out = F(t, x) = -i s conj(P) NL(P x); stage_phase(t) must be current.
    void rhs(const std::vector<Pack>& xr, const std::vector<Pack>& xi,
             std::vector<Pack>& outr, std::vector<Pack>& outi) {
        if (!nl_on) {
            const Pack zero = splat(0.0);
            std::fill(outr.begin(), outr.end(), zero);
            std::fill(outi.begin(), outi.end(), zero);
            return;
        }
        apply_phase(xr, xi);
        conv_nonlinearity();
        const Pack s = splat(sgn);
        for (int k = 0; k < K; ++k) {
            const Pack a = splat(pr[k]), b = splat(pi_[k]);  // conj(P) = a - i b
            // -i s (a - i b)(nr + i ni) = s[(a ni - b nr) - i(a nr + b ni)]
            outr[k] = s * (a * ni[k] - b * nr[k]);
            outi[k] = -s * (a * nr[k] + b * ni[k]);
        }
    }

    void axpy(std::vector<Pack>& yr, std::vector<Pack>& yi,
              const std::vector<Pack>& xr, const std::vector<Pack>& xi,
              const std::vector<Pack>& br, const std::vector<Pack>& bi,
              double a) {
        const Pack A = splat(a);
        for (int k = 0; k < K; ++k) {
            yr[k] = xr[k] + A * br[k];
            yi[k] = xi[k] + A * bi[k];
        }
    }

    void init_step(double h) {
        hpr.assign(K, 0.0);
        hpi.assign(K, 0.0);
        for (int k = 0; k < K; ++k) {
            hpr[k] = std::cos(h / 2 * mult[k]);
            hpi[k] = -std::sin(h / 2 * mult[k]);
        }
    }
    void advance_phase() {  // (pr + i pi) *= (hpr + i hpi)
        for (int k = 0; k < K; ++k) {
            const double a = pr[k], b = pi_[k];
            pr[k] = a * hpr[k] - b * hpi[k];
            pi_[k] = a * hpi[k] + b * hpr[k];
        }
    }

    // one RK4 step from t to t + h on the interaction field; the stage phase
    // is exact at t and advanced by the constant half-step factor inside.
    void step(double t, double h) {
        stage_phase(t);
        rhs(wr, wi, s1r, s1i);
        axpy(tmpr, tmpi, wr, wi, s1r, s1i, h / 2);
        advance_phase();
        rhs(tmpr, tmpi, s2r, s2i);
        axpy(tmpr, tmpi, wr, wi, s2r, s2i, h / 2);
        rhs(tmpr, tmpi, s3r, s3i);
        axpy(tmpr, tmpi, wr, wi, s3r, s3i, h);
        advance_phase();
        rhs(tmpr, tmpi, s4r, s4i);
        const Pack c = splat(h / 6.0);
        const Pack twop = splat(2.0);
        for (int k = 0; k < K; ++k) {
            wr[k] += c * (s1r[k] + twop * (s2r[k] + s3r[k]) + s4r[k]);
            wi[k] += c * (s1i[k] + twop * (s2i[k] + s3i[k]) + s4i[k]);
        }
    }

    bool finite_lane(int l) const {
        double acc = 0.0;
        for (int k = 0; k < K; ++k) acc += wr[k][l] + wi[k][l];
        return std::isfinite(acc);
    }

    // physical field of lane l at absolute time t
    SpectralField physical_lane(int l, double t) {
        stage_phase(t);
        SpectralField f(km);
        for (int k = 0; k < K; ++k) {
            const double a = pr[k], b = pi_[k];
            f.coeffs[static_cast<std::size_t>(k)] = {a * wr[k][l] - b * wi[k][l],
                                                     a * wi[k][l] + b * wr[k][l]};
        }
        return f;
    }
};

struct StepPlan {
    long long nsteps;
    double h;
};

StepPlan plan_steps(const FlowConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("evolve: dt must be > 0");
    const double nreal = std::abs(cfg.t_final) / cfg.dt;
    if (nreal > 1e9) throw std::invalid_argument("evolve: step count exceeds 1e9");
    const long long n = std::llround(nreal);
    if (std::abs(n * cfg.dt - std::abs(cfg.t_final)) >
        1e-9 * std::max(1.0, std::abs(cfg.t_final)))
        throw std::invalid_argument("evolve: t_final must be a multiple of dt");
    return {n, cfg.t_final < 0 ? -cfg.dt : cfg.dt};
}

}  // namespace

SpectralField gauge_forward(const SpectralField& u, double t) {
    const double phase = 2.0 * t * fint_sq(u);
    SpectralField v = u;
    const spectral::cplx f = std::polar(1.0, phase);
    for (auto& c : v.coeffs) c *= f;
    return v;
}

SpectralField gauge_inverse(const SpectralField& u, double t) {
    const double phase = 2.0 * t * fint_sq(u);
    SpectralField v = u;
    const spectral::cplx f = std::polar(1.0, -phase);
    for (auto& c : v.coeffs) c *= f;
    return v;
}

SpectralField nonlinearity(const SpectralField& u, double N) {
    check_band_limited(u, N, "nonlinearity");
    const int km = std::max(0, band_kmax(N));
    const int M = next_pow2(4 * u.kmax + 1);
    auto grid = spectral::detail::synth_pow2(u, M);
    const double f2 = 2.0 * fint_sq(u);
    for (auto& g : grid) g *= (std::norm(g) - f2);
    return spectral::detail::analyze_pow2(grid, std::min(km, 3 * u.kmax));
}

std::pair<SpectralField, SpectralField> resonant_split(const SpectralField& u,
                                                       const SpectralField& v,
                                                       const SpectralField& w) {
    const int kq = u.kmax + v.kmax + w.kmax;
    SpectralField Q(kq);
    const int kr = std::max({u.kmax, v.kmax, w.kmax});
    SpectralField R(kr);
    for (int k1 = -u.kmax; k1 <= u.kmax; ++k1) {
        if (u.at(k1) == spectral::cplx(0.0)) continue;
        for (int k2 = -v.kmax; k2 <= v.kmax; ++k2) {
            if (k2 == k1) continue;
            const spectral::cplx uv = u.at(k1) * std::conj(v.at(k2));
            for (int k3 = -w.kmax; k3 <= w.kmax; ++k3) {
                if (k2 == k3) continue;
                const int k = k1 - k2 + k3;
                Q.coeffs[static_cast<std::size_t>(k + kq)] += uv * w.at(k3);
            }
        }
    }
    for (int k = -kr; k <= kr; ++k)
        R.set(k, u.at(k) * std::conj(v.at(k)) * w.at(k));
    return {Q, R};
}

double mass(const SpectralField& u) { return spectral::l2_integral(u); }

double hamiltonian(const SpectralField& u, Sign sign, const Dispersion& d) {
    double kinetic = 0.0;
    for (int k = -u.kmax; k <= u.kmax; ++k)
        kinetic += d.multiplier(k) * std::norm(u.at(k));
    kinetic /= TWO_PI;
    const double s = (sign == Sign::defocusing) ? 1.0 : -1.0;
    return kinetic + 0.5 * s * quartic_integral(u);
}

namespace {

void record_diag(FlowDiagnostics& diag, double t, const SpectralField& f,
                 Sign sign, const Dispersion& d) {
    diag.times.push_back(t);
    diag.mass_series.push_back(mass(f));
    diag.hamiltonian_series.push_back(hamiltonian(f, sign, d));
}

void finalize_diag(FlowDiagnostics& diag) {
    for (std::size_t i = 0; i < diag.times.size(); ++i) {
        diag.max_mass_drift = std::max(
            diag.max_mass_drift, std::abs(diag.mass_series[i] - diag.mass_series[0]));
        diag.max_hamiltonian_drift =
            std::max(diag.max_hamiltonian_drift,
                     std::abs(diag.hamiltonian_series[i] - diag.hamiltonian_series[0]));
    }
}

std::pair<SpectralField, FlowDiagnostics> evolve_strang(const SpectralField& u0,
                                                        const FlowConfig& cfg,
                                                        const StepObserver& on_step) {
    const Dispersion d(cfg.alpha);
    const auto [nsteps, h] = plan_steps(cfg);
    const int km = std::max(0, band_kmax(cfg.N));
    SpectralField z(km);
    for (int k = -std::min(km, u0.kmax); k <= std::min(km, u0.kmax); ++k)
        z.set(k, u0.at(k));
    const int M = next_pow2(4 * km + 1);
    const double sgn = (cfg.sign == Sign::defocusing) ? 1.0 : -1.0;

    std::vector<spectral::cplx> half(static_cast<std::size_t>(2 * km + 1));
    for (int k = -km; k <= km; ++k)
        half[static_cast<std::size_t>(k + km)] = std::polar(1.0, -(h / 2) * d.multiplier(k));

    FlowDiagnostics diag;
    record_diag(diag, 0.0, z, cfg.sign, d);
    if (on_step) on_step(0.0, z);

    for (long long n = 0; n < nsteps; ++n) {
        for (std::size_t i = 0; i < z.coeffs.size(); ++i) z.coeffs[i] *= half[i];
        if (cfg.nonlinearity_enabled) {
            auto grid = spectral::detail::synth_pow2(z, M);
            const double f2 = cfg.renormalize ? 2.0 * fint_sq(z) : 0.0;
            for (auto& g : grid)
                g *= std::polar(1.0, -h * sgn * (std::norm(g) - f2));
            z = spectral::detail::analyze_pow2(grid, km);
        }
        for (std::size_t i = 0; i < z.coeffs.size(); ++i) z.coeffs[i] *= half[i];
        const double t = (n + 1) * h;
        double acc = 0.0;
        for (const auto& c : z.coeffs) acc += c.real() + c.imag();
        if (!std::isfinite(acc)) throw BlowupError(n * h);
        if (on_step) on_step(t, z);
        const bool last = (n + 1 == nsteps);
        if (last || (cfg.diag_stride > 0 && (n + 1) % cfg.diag_stride == 0))
            record_diag(diag, t, z, cfg.sign, d);
    }
    finalize_diag(diag);
    return {z, diag};
}

std::pair<SpectralField, FlowDiagnostics> evolve_rk4_full(const SpectralField& u0,
                                                          const FlowConfig& cfg,
                                                          const StepObserver& on_step) {
    const Dispersion d(cfg.alpha);
    const auto [nsteps, h] = plan_steps(cfg);
    const int km = std::max(0, band_kmax(cfg.N));
    const int K = 2 * km + 1;
    Engine<1> eng(km, d, cfg.sign, cfg.renormalize, cfg.nonlinearity_enabled);
    // raw field: f(z) = -i (mult z + s NL(z)); reuse the engine's conv kernel
    std::vector<double> xr(K), xi(K), fr(K), fi(K), t1r(K), t1i(K), t2r(K), t2i(K),
        t3r(K), t3i(K), t4r(K), t4i(K), wr(K), wi(K);
    for (int k = -km; k <= km; ++k) {
        wr[static_cast<std::size_t>(k + km)] = u0.at(k).real();
        wi[static_cast<std::size_t>(k + km)] = u0.at(k).imag();
    }
    auto rawf = [&](const std::vector<double>& ar, const std::vector<double>& ai,
                    std::vector<double>& outr, std::vector<double>& outi) {
        for (int k = 0; k < K; ++k) {
            eng.zr[k][0] = ar[static_cast<std::size_t>(k)];
            eng.zi[k][0] = ai[static_cast<std::size_t>(k)];
        }
        if (cfg.nonlinearity_enabled)
            eng.conv_nonlinearity();
        else
            for (int k = 0; k < K; ++k) {
                eng.nr[k][0] = 0.0;
                eng.ni[k][0] = 0.0;
            }
        const double s = (cfg.sign == Sign::defocusing) ? 1.0 : -1.0;
        for (int k = 0; k < K; ++k) {
            const double gr = eng.mult[k] * ar[k] + s * eng.nr[k][0];
            const double gi = eng.mult[k] * ai[k] + s * eng.ni[k][0];
            outr[k] = gi;   // -i (gr + i gi) = gi - i gr
            outi[k] = -gr;
        }
    };
    auto mk = [&](const std::vector<double>& br, const std::vector<double>& bi,
                  double a, std::vector<double>& or_, std::vector<double>& oi_) {
        for (int k = 0; k < K; ++k) {
            or_[k] = wr[k] + a * br[k];
            oi_[k] = wi[k] + a * bi[k];
        }
    };
    const Dispersion disp(cfg.alpha);
    FlowDiagnostics diag;
    SpectralField cur(km);
    auto to_field = [&]() {
        for (int k = 0; k < K; ++k)
            cur.coeffs[static_cast<std::size_t>(k)] = {wr[k], wi[k]};
        return cur;
    };
    record_diag(diag, 0.0, to_field(), cfg.sign, disp);
    if (on_step) on_step(0.0, cur);
    for (long long n = 0; n < nsteps; ++n) {
        rawf(wr, wi, t1r, t1i);
        mk(t1r, t1i, h / 2, xr, xi);
        rawf(xr, xi, t2r, t2i);
        mk(t2r, t2i, h / 2, xr, xi);
        rawf(xr, xi, t3r, t3i);
        mk(t3r, t3i, h, xr, xi);
        rawf(xr, xi, t4r, t4i);
        double acc = 0.0;
        for (int k = 0; k < K; ++k) {
            wr[k] += h / 6.0 * (t1r[k] + 2.0 * (t2r[k] + t3r[k]) + t4r[k]);
            wi[k] += h / 6.0 * (t1i[k] + 2.0 * (t2i[k] + t3i[k]) + t4i[k]);
            acc += wr[k] + wi[k];
        }
        if (!std::isfinite(acc)) throw BlowupError(n * h);
        const double t = (n + 1) * h;
        to_field();
        if (on_step) on_step(t, cur);
        const bool last = (n + 1 == nsteps);
        if (last || (cfg.diag_stride > 0 && (n + 1) % cfg.diag_stride == 0))
            record_diag(diag, t, cur, cfg.sign, disp);
    }
    finalize_diag(diag);
    return {to_field(), diag};
}

}  // namespace

std::pair<SpectralField, FlowDiagnostics> evolve(const SpectralField& u0,
                                                 const FlowConfig& cfg,
                                                 const StepObserver& on_step) {
    const Dispersion d(cfg.alpha);
    check_band_limited(u0, cfg.N, "evolve");
    if (cfg.scheme == Scheme::strang_split) return evolve_strang(u0, cfg, on_step);
    if (cfg.scheme == Scheme::rk4_full) return evolve_rk4_full(u0, cfg, on_step);

    const auto [nsteps, h] = plan_steps(cfg);
    const int km = std::max(0, band_kmax(cfg.N));
    Engine<1> eng(km, d, cfg.sign, cfg.renormalize, cfg.nonlinearity_enabled);
    eng.init_step(h);
    SpectralField padded(km);
    for (int k = -std::min(km, u0.kmax); k <= std::min(km, u0.kmax); ++k)
        padded.set(k, u0.at(k));
    eng.load({padded});

    FlowDiagnostics diag;
    record_diag(diag, 0.0, padded, cfg.sign, d);
    if (on_step) on_step(0.0, padded);

    for (long long n = 0; n < nsteps; ++n) {
        eng.step(n * h, h);
        if (!eng.finite_lane(0)) throw BlowupError(n * h);
        const double t = (n + 1) * h;
        const bool last = (n + 1 == nsteps);
        const bool want_diag =
            last || (cfg.diag_stride > 0 && (n + 1) % cfg.diag_stride == 0);
        if (want_diag || on_step) {
            const SpectralField f = eng.physical_lane(0, t);
            if (on_step) on_step(t, f);
            if (want_diag) record_diag(diag, t, f, cfg.sign, d);
        }
    }
    finalize_diag(diag);
    return {eng.physical_lane(0, nsteps * h), diag};
}

std::vector<SpectralField> evolve_batch(const std::vector<SpectralField>& batch,
                                        const FlowConfig& cfg) {
    if (cfg.scheme != Scheme::rk4)
        throw std::invalid_argument("evolve_batch: rk4 scheme only");
    if (batch.empty()) return {};
    const Dispersion d(cfg.alpha);
    for (const auto& u : batch) check_band_limited(u, cfg.N, "evolve_batch");
    const auto [nsteps, h] = plan_steps(cfg);
    const int km = std::max(0, band_kmax(cfg.N));

    std::vector<SpectralField> out(batch.size());
    constexpr int LANES = 4;
    const auto run_group = [&](auto& eng, std::size_t lo, int lanes) {
        std::vector<SpectralField> group;
        for (int l = 0; l < lanes; ++l) {
            SpectralField padded(km);
            const auto& u = batch[lo + static_cast<std::size_t>(l)];
            for (int k = -std::min(km, u.kmax); k <= std::min(km, u.kmax); ++k)
                padded.set(k, u.at(k));
            group.push_back(std::move(padded));
        }
        eng.init_step(h);
        eng.load(group);
        for (long long n = 0; n < nsteps; ++n) {
            eng.step(n * h, h);
            for (int l = 0; l < lanes; ++l)
                if (!eng.finite_lane(l)) throw BlowupError(n * h);
        }
        for (int l = 0; l < lanes; ++l)
            out[lo + static_cast<std::size_t>(l)] = eng.physical_lane(l, nsteps * h);
    };
    std::size_t done = 0;
    while (done + LANES <= batch.size()) {
        Engine<LANES> eng(km, d, cfg.sign, cfg.renormalize, cfg.nonlinearity_enabled);
        run_group(eng, done, LANES);
        done += LANES;
    }
    while (done < batch.size()) {
        Engine<1> eng(km, d, cfg.sign, cfg.renormalize, cfg.nonlinearity_enabled);
        run_group(eng, done, 1);
        done += 1;
    }
    return out;
}

}  // namespace fnlslab::dynamics
