// rao.hpp — the random averaging operator as a discrete kernel evolution.
//
// Around a low-frequency solution u_L (band <k> <= L) the linearized flow is
//
//   d/dt Psi = -2 i Pi_N M(u_L, u_L, Psi)(t),
//   M(u, v, w)_k(t) = sum_{k1-k2+k3=k, k2 not in {k1,k3}} e^{i t Phi}
//                     u_{k1} conj(v_{k2}) w_{k3},
//
// in the interaction representation (u_L enters through its interaction
// profile; chi == 1 on the window).  The solution operator H~^{N,L}(t),
// kernel H_{kk'}(t) on the band <k>, <k'> <= N, starts from the identity and
// stays exactly unitary: under the index swap (k,k1,k2,k3) -> (k3,k2,k1,k)
// the summand conjugates and Phi flips sign, so d/dt sum_k |Psi_k|^2 = 0
// pathwise.  The RK4 unitarity defect is pure integrator error, O(dt^4).
//
// The trilinear coefficients are fed with the profile c_k = u_k / sqrt(2 pi),
// whose per-mode variance under the Gaussian data is exactly <<k>>^{-alpha} —
// the scale the operator's formulas are written in.
//
// h^{N,L} = H~^{N,L} - H~^{N,L/2} telescopes: sum over dyadic 1 <= L' <= L of
// h^{N,L'} equals H~^{N,L} - Pi_N (H~^{N,1/2} = Pi_N, the identity on the
// band).

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fnlslab/dynamics.hpp"
#include "fnlslab/spectral.hpp"

namespace fnlslab::rao {

using spectral::cplx;
using spectral::SpectralField;

struct KernelMatrix {
    double t = 0.0;
    double N = 1.0;   // output band parameter
    double L = 0.5;   // low-frequency parameter
    int kmax = 0;     // band_kmax(N)
    std::vector<cplx> a;  // row-major (k + kmax) * K + (k' + kmax)

    cplx at(int k, int kp) const {
        return a[static_cast<std::size_t>(k + kmax) * (2 * kmax + 1) +
                 static_cast<std::size_t>(kp + kmax)];
    }
    cplx& at(int k, int kp) {
        return a[static_cast<std::size_t>(k + kmax) * (2 * kmax + 1) +
                 static_cast<std::size_t>(kp + kmax)];
    }
    int dim() const { return 2 * kmax + 1; }

    static KernelMatrix identity(double N, double L);
};

struct Trajectory {
    double node_dt = 0.0;              // spacing of stored nodes
    double L = 0.5;                    // band parameter of u_L
    std::vector<SpectralField> nodes;  // interaction-picture series profiles
};

// Integrates the truncated flow for the band-L data with step dt/2 and
// stores the interaction profile e^{i t |k|^alpha} u_k(t) / (2 pi) at every
// node t = j dt/2.  L = 1/2 gives the identically-zero trajectory.
Trajectory low_freq_trajectory(double L, double alpha, double dt, double t_final,
                               const SpectralField& data,
                               dynamics::Sign sign = dynamics::Sign::defocusing);

// Columnwise RK4 for the kernel ODE; traj must stem from the same dt.
// Optional snapshots: kernel recorded every `snapshot_stride` steps.
KernelMatrix evolve_kernel(double N, double L, double alpha, const Trajectory& traj,
                           double dt, double t_final,
                           std::vector<KernelMatrix>* snapshots = nullptr,
                           int snapshot_stride = 0);

// || H H* - Id ||_F on the band.
double unitarity_defect(const KernelMatrix& H);

// psi = H~^{N,L} F_N and zeta = (H~^{N,L} - H~^{N,L/2}) F_N; F_N must be
// supported on the dyadic shell N/2 < <k'> <= N.
std::pair<SpectralField, SpectralField> psi_zeta(double N, double L,
                                                 const SpectralField& F_N,
                                                 const KernelMatrix& H_L,
                                                 const KernelMatrix& H_halfL);

struct DecayProfile {
    double weighted_frobenius_sq = 0.0;  // sum (1+|k-k'|/L)^{2 kappa} |h|^2
    double frobenius_sq = 0.0;
    // fraction of unweighted mass within |k-k'| <= C*L for C in {1,2,4,8}
    std::vector<std::pair<int, double>> band_fractions;
};

DecayProfile kernel_decay_profile(const KernelMatrix& h, double L, double kappa);

// difference kernel h^{N,L} = Ha - Hb (entrywise); bands must agree
KernelMatrix kernel_difference(const KernelMatrix& Ha, const KernelMatrix& Hb);

// sum_k H_{k1 k} conj(H_{k2 k}): the row-orthogonality (unitarity) product.
// For k1 != k2 this vanishes up to the unitarity defect; it is the exact
// cancellation behind the weighted-replacement identity for the telescoped
// kernels.
cplx cancellation_product(const KernelMatrix& H, int k1, int k2);

// Same product with the input-side weight <<k>>^{-alpha/2} inserted:
// sum_k H_{k1 k} conj(H_{k2 k}) <<k>>^{-alpha/2}.  Reported as a diagnostic;
// unitarity does not make it vanish.
cplx weighted_cancellation_product(const KernelMatrix& H, int k1, int k2,
                                   double alpha);

}  // namespace fnlslab::rao
