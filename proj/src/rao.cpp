#include "fnlslab/rao.hpp"

#include <cmath>
#include <stdexcept>

namespace fnlslab::rao {

using spectral::band_kmax;
using spectral::Dispersion;
using spectral::jb;
using spectral::TWO_PI;

KernelMatrix KernelMatrix::identity(double N, double L) {
    KernelMatrix H;
    H.N = N;
    H.L = L;
    H.t = 0.0;
    H.kmax = std::max(0, band_kmax(N));
    const int K = H.dim();
    H.a.assign(static_cast<std::size_t>(K) * K, cplx(0.0));
    for (int k = -H.kmax; k <= H.kmax; ++k)
        if (jb(k) <= N) H.at(k, k) = cplx(1.0);
    return H;
}

Trajectory low_freq_trajectory(double L, double alpha, double dt, double t_final,
                               const SpectralField& data, dynamics::Sign sign) {
    Trajectory traj;
    traj.node_dt = dt / 2.0;
    traj.L = L;
    if (band_kmax(L) < 0) {
        // u_{1/2} = 0: constant zero trajectory on the required nodes
        const long long n = std::llround(t_final / traj.node_dt);
        traj.nodes.assign(static_cast<std::size_t>(n) + 1, SpectralField(0));
        return traj;
    }
    const Dispersion d(alpha);
    dynamics::FlowConfig cfg;
    cfg.alpha = alpha;
    cfg.N = L;
    cfg.dt = traj.node_dt;
    cfg.scheme = dynamics::Scheme::rk4;
    cfg.t_final = t_final;
    cfg.sign = sign;
    cfg.diag_stride = 0;
    // interaction profile at the operator's coefficient scale: dividing the
    // stored coefficients by sqrt(2 pi) gives per-mode variance <<k>>^{-alpha}
    const double scale = 1.0 / std::sqrt(TWO_PI);
    dynamics::evolve(data, cfg, [&](double t, const SpectralField& z) {
        SpectralField v(z.kmax);
        for (int k = -z.kmax; k <= z.kmax; ++k)
            v.set(k, z.at(k) * std::polar(scale, t * d.multiplier(k)));
        traj.nodes.push_back(std::move(v));
    });
    return traj;
}

namespace {

// dense generator G(t)[k][k3] = -2i sum_{k1-k2=k-k3} e^{itPhi} v_{k1} conj(v_{k2})
// over the support band of v, with k2 != k3 (k2 != k1 is automatic for k != k3).
struct GeneratorBuilder {
    int km;        // output band kmax
    int lm;        // trajectory band kmax
    double alpha;
    std::vector<double> mult;  // |n|^alpha for n in [-K, K] merged range

    GeneratorBuilder(int kmax_out, int kmax_low, double a)
        : km(kmax_out), lm(kmax_low), alpha(a) {
        const int top = std::max(km, lm);
        mult.assign(static_cast<std::size_t>(top) + 1, 0.0);
        for (int n = 1; n <= top; ++n)
            mult[static_cast<std::size_t>(n)] = std::pow(static_cast<double>(n), a);
    }
    double m(int n) const { return mult[static_cast<std::size_t>(std::abs(n))]; }

    // G row-major (k, k3), dimension (2 km + 1)^2
    void build(double t, const SpectralField& v, std::vector<cplx>& G) const {
        const int K = 2 * km + 1;
        std::fill(G.begin(), G.end(), cplx(0.0));
        std::vector<cplx> ph(static_cast<std::size_t>(std::max(km, lm)) + 1);
        for (int n = 0; n <= std::max(km, lm); ++n)
            ph[static_cast<std::size_t>(n)] =
                std::polar(1.0, t * mult[static_cast<std::size_t>(n)]);
        const auto phase = [&](int n) { return ph[static_cast<std::size_t>(std::abs(n))]; };
        for (int k = -km; k <= km; ++k) {
            const cplx pk = std::conj(phase(k));
            for (int k3 = -km; k3 <= km; ++k3) {
                if (k3 == k) continue;  // k2 = k1 excluded for every k1
                const int mshift = k - k3;
                cplx acc(0.0);
                for (int k1 = -v.kmax; k1 <= v.kmax; ++k1) {
                    const int k2 = k1 - mshift;
                    if (std::abs(k2) > v.kmax || k2 == k3) continue;
                    const cplx a1 = v.at(k1);
                    if (a1 == cplx(0.0)) continue;
                    const cplx a2 = v.at(k2);
                    if (a2 == cplx(0.0)) continue;
                    acc += phase(k1) * std::conj(phase(k2)) * a1 * std::conj(a2);
                }
                // e^{itPhi} = p(k1) conj(p(k2)) p(k3) conj(p(k))
                G[static_cast<std::size_t>(k + km) * K +
                  static_cast<std::size_t>(k3 + km)] =
                    cplx(0.0, -2.0) * acc * phase(k3) * pk;
            }
        }
    }
};

void matmul_acc(const std::vector<cplx>& G, const std::vector<cplx>& H, int K,
                std::vector<cplx>& out) {
    // out = G * H
    std::fill(out.begin(), out.end(), cplx(0.0));
    for (int i = 0; i < K; ++i)
        for (int l = 0; l < K; ++l) {
            const cplx g = G[static_cast<std::size_t>(i) * K + l];
            if (g == cplx(0.0)) continue;
            const std::size_t row = static_cast<std::size_t>(i) * K;
            const std::size_t lrow = static_cast<std::size_t>(l) * K;
            for (int j = 0; j < K; ++j) out[row + j] += g * H[lrow + j];
        }
}

}  // namespace

KernelMatrix evolve_kernel(double N, double L, double alpha, const Trajectory& traj,
                           double dt, double t_final,
                           std::vector<KernelMatrix>* snapshots,
                           int snapshot_stride) {
    if (!(L < N)) throw std::invalid_argument("evolve_kernel: L < N required");
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_kernel: dt > 0");
    if (std::abs(traj.node_dt - dt / 2.0) > 1e-12 * std::max(1.0, dt))
        throw std::invalid_argument("evolve_kernel: trajectory node spacing != dt/2");
    const long long nsteps = std::llround(t_final / dt);
    if (std::abs(nsteps * dt - t_final) > 1e-9 * std::max(1.0, t_final))
        throw std::invalid_argument("evolve_kernel: t_final must be a multiple of dt");
    if (traj.nodes.size() < static_cast<std::size_t>(2 * nsteps) + 1)
        throw std::invalid_argument("evolve_kernel: trajectory does not cover [0, t_final]");

    KernelMatrix H = KernelMatrix::identity(N, L);
    const int K = H.dim();
    const int lm = traj.nodes.empty() ? 0 : traj.nodes.front().kmax;
    GeneratorBuilder gb(H.kmax, lm, alpha);

    const std::size_t n2 = static_cast<std::size_t>(K) * K;
    std::vector<cplx> G0(n2), Gh(n2), G1(n2), k1(n2), k2(n2), k3(n2), k4(n2), tmp(n2);

    for (long long n = 0; n < nsteps; ++n) {
        const double t0 = n * dt;
        gb.build(t0, traj.nodes[static_cast<std::size_t>(2 * n)], G0);
        gb.build(t0 + dt / 2.0, traj.nodes[static_cast<std::size_t>(2 * n + 1)], Gh);
        gb.build(t0 + dt, traj.nodes[static_cast<std::size_t>(2 * n + 2)], G1);

        matmul_acc(G0, H.a, K, k1);
        tmp = H.a;
        for (std::size_t i = 0; i < n2; ++i) tmp[i] += (dt / 2.0) * k1[i];
        matmul_acc(Gh, tmp, K, k2);
        tmp = H.a;
        for (std::size_t i = 0; i < n2; ++i) tmp[i] += (dt / 2.0) * k2[i];
        matmul_acc(Gh, tmp, K, k3);
        tmp = H.a;
        for (std::size_t i = 0; i < n2; ++i) tmp[i] += dt * k3[i];
        matmul_acc(G1, tmp, K, k4);
        double acc = 0.0;
        for (std::size_t i = 0; i < n2; ++i) {
            H.a[i] += (dt / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
            acc += H.a[i].real() + H.a[i].imag();
        }
        if (!std::isfinite(acc))
            throw std::runtime_error("evolve_kernel: non-finite entries at t = " +
                                     std::to_string(t0 + dt));
        H.t = (n + 1) * dt;
        if (snapshots && snapshot_stride > 0 && (n + 1) % snapshot_stride == 0)
            snapshots->push_back(H);
    }
    return H;
}

double unitarity_defect(const KernelMatrix& H) {
    const int K = H.dim();
    double acc = 0.0;
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) {
            cplx s(0.0);
            for (int l = 0; l < K; ++l)
                s += H.a[static_cast<std::size_t>(i) * K + l] *
                     std::conj(H.a[static_cast<std::size_t>(j) * K + l]);
            if (i == j) s -= 1.0;
            acc += std::norm(s);
        }
    return std::sqrt(acc);
}

std::pair<SpectralField, SpectralField> psi_zeta(double N, double L,
                                                 const SpectralField& F_N,
                                                 const KernelMatrix& H_L,
                                                 const KernelMatrix& H_halfL) {
    const int km = std::max(0, band_kmax(N));
    for (int k = -F_N.kmax; k <= F_N.kmax; ++k) {
        if (F_N.at(k) == cplx(0.0)) continue;
        if (!(jb(k) > N / 2.0 && jb(k) <= N))
            throw std::invalid_argument(
                "psi_zeta: F_N must be supported on the shell N/2 < <k> <= N");
    }
    if (H_L.kmax != km || H_halfL.kmax != km)
        throw std::invalid_argument("psi_zeta: kernel band mismatch");
    (void)L;
    SpectralField psi(km), zeta(km);
    for (int k = -km; k <= km; ++k) {
        cplx sL(0.0), sH(0.0);
        for (int kp = -km; kp <= km; ++kp) {
            const cplx f = F_N.at(kp);
            if (f == cplx(0.0)) continue;
            sL += H_L.at(k, kp) * f;
            sH += H_halfL.at(k, kp) * f;
        }
        psi.set(k, sL);
        zeta.set(k, sL - sH);
    }
    return {psi, zeta};
}

DecayProfile kernel_decay_profile(const KernelMatrix& h, double L, double kappa) {
    DecayProfile p;
    const int K = h.dim();
    double inband[4] = {0.0, 0.0, 0.0, 0.0};
    const int Cs[4] = {1, 2, 4, 8};
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) {
            const double m = std::norm(h.a[static_cast<std::size_t>(i) * K + j]);
            if (m == 0.0) continue;
            const double dk = std::abs(i - j);
            p.frobenius_sq += m;
            p.weighted_frobenius_sq += std::pow(1.0 + dk / L, 2.0 * kappa) * m;
            for (int c = 0; c < 4; ++c)
                if (dk <= Cs[c] * L) inband[c] += m;
        }
    for (int c = 0; c < 4; ++c)
        p.band_fractions.emplace_back(
            Cs[c], p.frobenius_sq > 0.0 ? inband[c] / p.frobenius_sq : 1.0);
    return p;
}

KernelMatrix kernel_difference(const KernelMatrix& Ha, const KernelMatrix& Hb) {
    if (Ha.kmax != Hb.kmax)
        throw std::invalid_argument("kernel_difference: band mismatch");
    KernelMatrix h = Ha;
    h.L = Ha.L;  // caller labels the dyadic level
    for (std::size_t i = 0; i < h.a.size(); ++i) h.a[i] -= Hb.a[i];
    return h;
}

cplx cancellation_product(const KernelMatrix& H, int k1, int k2) {
    cplx s(0.0);
    for (int k = -H.kmax; k <= H.kmax; ++k)
        s += H.at(k1, k) * std::conj(H.at(k2, k));
    return s;
}

cplx weighted_cancellation_product(const KernelMatrix& H, int k1, int k2,
                                   double alpha) {
    const Dispersion d(alpha);
    cplx s(0.0);
    for (int k = -H.kmax; k <= H.kmax; ++k)
        s += H.at(k1, k) * std::conj(H.at(k2, k)) * std::pow(d.jbb(k), -alpha / 2.0);
    return s;
}

}  // namespace fnlslab::rao
