// tensor.hpp — sparse tensors on integer lattices, unfolded operator norms,
// semi-products, and the empirical audits of the base-tensor estimates.
//
// A SparseTensor4 is a complex-valued tensor with a small ordered set of
// named axes (k, k1, k2, k3 for the base tensor; arbitrary labels for
// semi-products) and explicitly stored nonzero entries.
//
// For a partition (B, C) of the axes, ||T||_{k_B -> k_C} is the operator
// norm of the matrix unfolding with columns indexed by k_B and rows by k_C:
//
//   ||T||^2 = sup { sum_{k_C} | sum_{k_B} T z_{k_B} |^2 : ||z||_2 = 1 }.
//
// It is computed by power iteration on the normal operator (tolerance 1e-8,
// cap 1e4 iterations, deterministic pseudo-random start vector); the dense
// SVD in the test suite cross-validates it on unfoldings up to 512x512.
//
//   ||T||_{k_B -> k_C} = ||T||_{k_C -> k_B} <= ||T||_F  (Frobenius).
//
// The semi-product of h1 (axes A1) and h2 (axes A2), C = A1 cap A2:
//
//   H_{k_A} = sum_{k_C} h1_{k_{A1}} h2_{k_{A2}},  A = A1 symmetric-diff A2,
//
// satisfies ||H||_{k_X -> k_Y} <= ||h1||_{k_{X1 u C} -> k_{Y1}} *
// ||h2||_{k_{X2} -> k_{C u Y2}} for every partition (X, Y) of A.

#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnlslab/counting.hpp"
#include "fnlslab/rng.hpp"

namespace fnlslab::tensor {

using cplx = std::complex<double>;
using Index = std::vector<int>;

struct PowerIterationError : std::runtime_error {
    double bracket_lo, bracket_hi;  // last two Rayleigh-quotient values
    PowerIterationError(double lo, double hi)
        : std::runtime_error("power iteration did not converge; last bracket [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]"),
          bracket_lo(lo), bracket_hi(hi) {}
};

struct SparseTensor4 {
    std::vector<std::string> axes;
    std::vector<std::pair<int, int>> bounds;  // inclusive per-axis ranges
    std::map<Index, cplx> entries;            // nonzeros only, ordered

    SparseTensor4() = default;
    SparseTensor4(std::vector<std::string> ax, std::vector<std::pair<int, int>> bd)
        : axes(std::move(ax)), bounds(std::move(bd)) {
        if (axes.size() != bounds.size())
            throw std::invalid_argument("SparseTensor4: axes/bounds mismatch");
    }

    void add(const Index& idx, cplx v);
    std::size_t axis_pos(const std::string& name) const;
    std::size_t nnz() const { return entries.size(); }
};

// 0/1 indicator tensor of the counting set S; Frobenius norm^2 = |S|.
SparseTensor4 base_tensor(const counting::CountingQuery& q);

// Same, restricted to |k1 + k3| < |k2|.
SparseTensor4 base_tensor_restricted(const counting::CountingQuery& q);

// Same, restricted by the Gamma condition |k_max| <= Gamma < |k|.
SparseTensor4 base_tensor_gamma(const counting::CountingQuery& q, double Gamma);

double hs_norm(const SparseTensor4& t);  // Frobenius

// ||T||_{k_B -> k_C}; (B, C) must partition the axes.
double unfold_norm(const SparseTensor4& t, const std::vector<std::string>& B,
                   const std::vector<std::string>& C);

// Semi-product over the shared axes; output axes are (A1 \ C) ++ (A2 \ C).
SparseTensor4 semiproduct(const SparseTensor4& h1, const SparseTensor4& h2);

// lemma_id in {"tensor2", "tensor3", "tensor4", "gammaT"}.  Rows carry the
// squared unfolded norms against the claimed right-hand sides.
counting::AuditReport tensor_lemma_audit(const std::string& lemma_id, double alpha,
                                         const std::vector<counting::CountingQuery>& sweep);

struct ContractionReport {
    double percentile99 = 0.0;   // 99th percentile of ||H||_{b->c} over trials
    double denominator = 0.0;    // max over partitions (B,C) of ||h||_{b k_B -> c k_C}
    double ratio = 0.0;          // percentile99 / denominator
};

// Randomised check of the contraction estimate: h has axes {b, c} + A, signs
// gives the conjugation pattern on A, and per trial H_{bc} =
// sum_{k_A} h prod_j eta_{k_j}^{zeta_j} with eta = standard complex
// Gaussians indexed by the integer value k_j.  The support must contain no
// pairing in k_A (validated).
ContractionReport random_contraction_check(const SparseTensor4& h,
                                           const std::vector<int>& signs,
                                           std::size_t trials, Rng& rng);

}  // namespace fnlslab::tensor
