// counting.hpp — exhaustive enumeration of the resonance-window sets
//
//   S = { (k,k1,k2,k3) in Z^4 : k = k1 - k2 + k3,  k2 not in {k1, k3},
//         floor(Phi) = m,  |k| <= N,  |k_j| <= N_j },
//   Phi = |k1|^alpha - |k2|^alpha + |k3|^alpha - |k|^alpha,
//
// together with its slice counts, the good/bad decomposition
//
//   bad(k1,k3):  |2k - (k1+k3)| < c |k1+k3|      (equivalently |k-k2| < c|k1+k3|)
//   bad(k,k2):   |2k1 - (k+k2)| < c |k+k2|       (equivalently |k1-k3| < c|k+k2|)
//
// the Gamma-condition restriction |k_max| <= Gamma < |k|, and empirical
// audits of the counting estimates: each audit computes exact counts, the
// claimed right-hand side, and the fitted constant (max ratio) per scale.
// Audits never assert against hidden constants; the meaningful signal is a
// bounded, non-growing fitted constant across a dyadic sweep.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fnlslab::counting {

struct CountingQuery {
    int N = 16, N1 = 16, N2 = 16, N3 = 16;
    long long m = 0;
    double alpha = 1.5;
    double bad_c = 0.125;          // the "<<" constant in the good/bad split
    std::optional<double> Gamma;   // Gamma-condition threshold, if any

    void validate() const;
};

struct Quad {
    int k, k1, k2, k3;
};

struct QuadSet {
    std::vector<Quad> quads;
    CountingQuery query;

    std::size_t size() const { return quads.size(); }
};

// Complete enumeration of S.  O(N * N1 * N3); refuses N > 4096 with an
// estimated cost in the message.
QuadSet enumerate_S(const CountingQuery& q);

// Exact membership test used by enumerate_S (floor(Phi) == m etc.).
bool member(const CountingQuery& q, int k, int k1, int k2, int k3);

struct SliceSpec {
    std::optional<int> k, k1, k2, k3;
};

// |S_{fixed}| by filtration.
std::size_t slice_count(const QuadSet& s, const SliceSpec& fixed);

enum class SlicePair { k1k3, kk2 };

// Splits s into (good, bad) w.r.t. the chosen coordinate pair.
std::pair<QuadSet, QuadSet> classify_good_bad(const QuadSet& s, SlicePair pair);

// Keeps quads with |k_max| <= Gamma < |k|; k_max is the frequency whose cap
// N_j is largest (ties: larger |k_j| wins, then smaller j).  Retained quads
// are checked against the interval confinement
//   Gamma <= |k| <= Gamma + 2 N_med,  Gamma - 2 N_med <= |k_max| <= Gamma.
QuadSet gamma_restrict(const QuadSet& s, double Gamma);

struct AuditRow {
    std::string lemma_id;
    double alpha;
    int N, N1, N2, N3;
    double count;   // worst-slice count (or total count)
    double bound;   // right-hand side at the worst slice
    double ratio;   // fitted constant at this scale: max over slices of count/bound
};

struct AuditReport {
    std::vector<AuditRow> rows;

    // max fitted constant over all rows of a family (substring match on id)
    double max_ratio(const std::string& id_prefix) const;
    // true if any family's consecutive per-scale constants grow by > `factor`
    bool constant_growth_exceeds(double factor) const;
};

// lemma_id in {"counting1", "cor_counting", "counting2", "cor_bad", "S",
// "gamma"}.  The sweep should cover >= 3 dyadic scales.
AuditReport lemma_audit(const std::string& lemma_id, double alpha,
                        const std::vector<CountingQuery>& sweep);

struct PhiViolation {
    long long b;
    long long x;
    std::string which;  // "minus", "plus_large", "plus_interior"
    double value;       // |phi'|
    double bound;       // calibrated lower bound
};

// Scans phi'_{b,-} and phi'_{b,+} on the integer grid b in [-bmax,bmax]\{0},
// x in [-xmax,xmax]\{0}, against the calibrated lower bounds
//   |phi'_{b,-}(x)| >= C_- min(|b| |x|^{alpha-2}, |b|^{alpha-1}),
//   |phi'_{b,+}(x)| >= C_+ |b|^{alpha-1}          for |2x-b| >= |b|/8,
//   |phi'_{b,+}(x)| >= C_s |b|^{alpha/2-1}        for |2x-b| >= |b|^{1-alpha/2},
// where the constants are calibrated on a dense reference grid of the
// scale-invariant ratio.  Expected empty for alpha in (1,2).
std::vector<PhiViolation> phi_derivative_scan(double alpha, long long bmax,
                                              long long xmax);

}  // namespace fnlslab::counting
