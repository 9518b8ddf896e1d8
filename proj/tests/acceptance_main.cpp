// Acceptance suite: one pass/fail line per criterion, exit code = #failures.
//
//  1. Picard phase transition (scaling slopes / (log N)^3 growth)
//  2. Monte Carlo vs Wick consistency of the second iterate
//  3. Finite-dimensional Gibbs invariance under the truncated flow
//  4. Conservation of mass and Hamiltonian under rk4
//  5. Unitarity of the random averaging operator kernel
//  6. Counting audits (fitted constants bounded, alpha = 2 oracle)
//  7. Tensor norm properties and audits
//  8. Wiener chaos moment bound
//  9. Bit-exact reproducibility across thread counts
//
// Wall-clock criteria are stated for 8 cores; on smaller hosts the budget is
// scaled by 8 / min(8, hardware threads).

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fnlslab/counting.hpp"
#include "fnlslab/dynamics.hpp"
#include "fnlslab/gibbs.hpp"
#include "fnlslab/harness.hpp"
#include "fnlslab/picard.hpp"
#include "fnlslab/rao.hpp"
#include "fnlslab/tensor.hpp"

using namespace fnlslab;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail) {
    std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

int worker_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

double budget(double seconds_on_8_cores) {
    const int used = std::min(8, worker_threads());
    return seconds_on_8_cores * 8.0 / used;
}

std::string fmtnum(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// dense SVD norm used as the high-accuracy route for the randomized
// inequality checks (unfoldings here stay well under 512 x 512)
double svd_norm(const tensor::SparseTensor4& t, const std::vector<std::string>& B,
                const std::vector<std::string>& C) {
    std::vector<std::size_t> bpos, cpos;
    for (const auto& n : B) bpos.push_back(t.axis_pos(n));
    for (const auto& n : C) cpos.push_back(t.axis_pos(n));
    std::map<tensor::Index, int> rid, cid;
    for (const auto& [idx, v] : t.entries) {
        tensor::Index bi, ci;
        for (auto p : bpos) bi.push_back(idx[p]);
        for (auto p : cpos) ci.push_back(idx[p]);
        cid.emplace(bi, 0);
        rid.emplace(ci, 0);
    }
    int n = 0;
    for (auto& [k, v] : cid) v = n++;
    n = 0;
    for (auto& [k, v] : rid) v = n++;
    if (rid.empty() || cid.empty()) return 0.0;
    Eigen::MatrixXcd M(rid.size(), cid.size());
    M.setZero();
    for (const auto& [idx, v] : t.entries) {
        tensor::Index bi, ci;
        for (auto p : bpos) bi.push_back(idx[p]);
        for (auto p : cpos) ci.push_back(idx[p]);
        M(rid[ci], cid[bi]) += std::complex<double>(v);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues()(0);
}

tensor::SparseTensor4 random_sparse(const std::vector<std::string>& axes, int lo,
                                    int hi, std::size_t nnz, Rng& rng) {
    std::vector<std::pair<int, int>> bounds(axes.size(), {lo, hi});
    tensor::SparseTensor4 t(axes, bounds);
    const int span = hi - lo + 1;
    for (std::size_t e = 0; e < nnz; ++e) {
        tensor::Index idx(axes.size());
        for (auto& x : idx)
            x = lo + static_cast<int>(rng.next_u64() % static_cast<unsigned>(span));
        t.add(idx, rng.gaussian_complex());
    }
    return t;
}

// ---------------------------------------------------------------------------

void criterion1_picard_phase_transition(int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> Ns = {64, 128, 256, 512, 1024, 2048};
    const auto recs =
        picard::scaling_study({2.0, 1.5, 1.0}, Ns, 0.4, 0.1, 1, 0, 0, threads);
    const double elapsed = seconds_since(t0);

    std::map<double, std::vector<picard::ScalingRecord>> by_alpha;
    for (const auto& r : recs) by_alpha[r.alpha].push_back(r);

    const double slope2 = by_alpha[2.0].back().slope_so_far;
    const double slope15 = by_alpha[1.5].back().slope_so_far;
    bool pass = slope2 <= -0.8 && slope15 <= -0.8;
    std::string detail = "slope(a=2)=" + fmtnum(slope2) +
                         ", slope(a=1.5)=" + fmtnum(slope15);

    // (b) alpha = 1: wick/(log N)^3 bounded below by a positive constant and
    // nondecreasing across the top three scales.  The measured sequence is
    // positive and converges to its limit from slightly above (the lower-order
    // near-resonances decay relative to the (log N)^3 cone), so the literal
    // nondecreasing clause fails at these scales; see the decisions ledger.
    const auto& a1 = by_alpha[1.0];
    const std::size_t n = a1.size();
    const double r0 = a1[n - 3].ratio_log3, r1 = a1[n - 2].ratio_log3,
                 r2 = a1[n - 1].ratio_log3;
    pass = pass && r0 > 0.0 && r1 >= r0 && r2 >= r1;
    detail += ", (logN)^-3 ratios top3=" + fmtnum(r0) + "/" + fmtnum(r1) + "/" +
              fmtnum(r2) + (r1 >= r0 && r2 >= r1
                                ? ""
                                : " (positive, converging from above; "
                                  "nondecreasing clause fails, see ledger)");

    const double allowed = budget(600.0);
    pass = pass && elapsed <= allowed;
    detail += ", runtime " + fmtnum(elapsed) + "s (allowed " + fmtnum(allowed) + "s)";
    report(1, pass, "Picard phase transition", detail);
}

void criterion2_mc_wick(int threads) {
    bool pass = true;
    std::string detail;
    for (double alpha : {1.0, 1.5, 2.0}) {
        const picard::PicardQuery q(32, 0.4, alpha, 0.1);
        const double wick = picard::picard2_wick_norm(q, threads);
        const auto mc = picard::picard2_mc_norm(q, 10000, 20240 + int(alpha * 10),
                                                threads);
        const double z = std::abs(mc.mean - wick) / mc.stderr_;
        pass = pass && z <= 3.0;
        detail += "a=" + fmtnum(alpha) + ": |mc-wick|/se=" + fmtnum(z) + "  ";
    }
    report(2, pass, "MC/Wick consistency at N=32", detail);
}

void criterion3_invariance(int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    harness::ExperimentConfig cfg;
    cfg.experiment = "invariance";
    cfg.seed = 600673;
    cfg.threads = threads;
    cfg.params = {{"alpha", 1.5}, {"N", 32.0},  {"count", 100000},
                  {"t", 1.0},     {"dt", 1e-3}, {"check_half_dt", true}};
    const auto rec = harness::run_experiment(cfg);
    const double elapsed = seconds_since(t0);

    double zmax = 0.0;
    std::size_t blowups = 0;
    for (const auto& row : rec.rows) {
        zmax = std::max(zmax, std::stod(row[6]));
        blowups += std::stoul(row[7]);
    }
    const double allowed = budget(1800.0) * 1.5;  // includes the dt/2 rerun
    bool pass = zmax <= 3.0 && blowups == 0 && elapsed <= allowed;
    report(3, pass, "finite-dimensional Gibbs invariance",
           "max z over observables and both dt = " + fmtnum(zmax) + ", blowups " +
               std::to_string(blowups) + ", runtime " + fmtnum(elapsed) +
               "s (allowed " + fmtnum(allowed) + "s)");
}

void criterion4_conservation() {
    Rng rng(2027);
    const spectral::Dispersion d(1.5);
    const auto u0 = gibbs::sample_gff(d, 8.0, rng);
    dynamics::FlowConfig cfg;
    cfg.alpha = 1.5;
    cfg.N = 8.0;
    cfg.dt = 1e-3;
    cfg.t_final = 1.0;
    cfg.diag_stride = 10;
    const auto [u1, diag1] = dynamics::evolve(u0, cfg);
    cfg.dt = 5e-4;
    cfg.diag_stride = 20;
    const auto [u2, diag2] = dynamics::evolve(u0, cfg);
    const double ratio = diag1.max_hamiltonian_drift / diag2.max_hamiltonian_drift;
    const bool pass = diag1.max_mass_drift <= 1e-10 &&
                      diag1.max_hamiltonian_drift <= 1e-8 && ratio >= 12.0 &&
                      ratio <= 20.0;
    report(4, pass, "mass/Hamiltonian conservation",
           "mass drift " + fmtnum(diag1.max_mass_drift) + ", H drift " +
               fmtnum(diag1.max_hamiltonian_drift) + ", halving ratio " +
               fmtnum(ratio));
}

void criterion5_unitarity() {
    const double N = 16.0, L = 4.0, alpha = 1.5, t = 0.1;
    Rng rng(505);
    const auto data =
        spectral::project(gibbs::sample_gff(spectral::Dispersion(alpha), L, rng), L);
    const auto H1 = rao::evolve_kernel(
        N, L, alpha, rao::low_freq_trajectory(L, alpha, 1e-3, t, data), 1e-3, t);
    const auto H2 = rao::evolve_kernel(
        N, L, alpha, rao::low_freq_trajectory(L, alpha, 5e-4, t, data), 5e-4, t);
    const auto H3 = rao::evolve_kernel(
        N, L, alpha, rao::low_freq_trajectory(L, alpha, 2.5e-4, t, data), 2.5e-4, t);
    const double d1 = rao::unitarity_defect(H1);
    const double d2 = rao::unitarity_defect(H2);
    const double ratio = d1 / d2;
    // criterion as stated: halving ratio of the defect in [12, 20].
    // Measured behaviour: the defect of classical RK4 on this exactly skew
    // generator superconverges at O(dt^5) (halving ratio 32); the kernel
    // itself refines at the expected O(dt^4).  The solution-refinement ratio
    // below documents the genuine integrator order.
    double e12 = 0.0, e23 = 0.0;
    for (std::size_t i = 0; i < H1.a.size(); ++i) {
        e12 += std::norm(H1.a[i] - H2.a[i]);
        e23 += std::norm(H2.a[i] - H3.a[i]);
    }
    const double sol_ratio = std::sqrt(e12 / e23);
    const bool pass = d1 <= 1e-6 && ratio >= 12.0 && ratio <= 20.0;
    report(5, pass, "random averaging operator unitarity",
           "defect " + fmtnum(d1) + " (<= 1e-6), defect halving ratio " +
               fmtnum(ratio) +
               " vs stated [12,20]; solution refinement ratio " +
               fmtnum(sol_ratio) +
               " = rk4 order; defect superconverges at O(dt^5), see ledger");
}

void criterion6_counting_audits() {
    std::vector<counting::CountingQuery> sweep, gsweep;
    for (int N : {32, 64, 128, 256}) {
        counting::CountingQuery q;
        q.N = q.N1 = q.N2 = q.N3 = N;
        q.alpha = 1.5;
        sweep.push_back(q);
        q.N1 = q.N2 = q.N3 = N / 2;
        q.m = -2;  // the Gamma-condition sets are populated at negative m
        gsweep.push_back(q);
    }
    bool pass = true;
    double worst = 0.0;
    std::string worst_id;
    for (const auto* id :
         {"counting1", "cor_counting", "counting2", "cor_bad", "S"}) {
        const auto rep = counting::lemma_audit(id, 1.5, sweep);
        for (const auto& r : rep.rows)
            if (r.ratio > worst) {
                worst = r.ratio;
                worst_id = r.lemma_id;
            }
        pass = pass && !rep.constant_growth_exceeds(2.0);
    }
    {
        const auto rep = counting::lemma_audit("gamma", 1.5, gsweep);
        for (const auto& r : rep.rows)
            if (r.ratio > worst) {
                worst = r.ratio;
                worst_id = r.lemma_id;
            }
        pass = pass && !rep.constant_growth_exceeds(2.0);
    }
    pass = pass && worst <= 64.0;

    // alpha = 2: enumeration against the exact quadratic identity
    bool oracle_ok = true;
    for (int N : {2, 3, 4, 8})
        for (long long m : {0LL, -2LL, 4LL}) {
            counting::CountingQuery q;
            q.N = q.N1 = q.N2 = q.N3 = N;
            q.alpha = 2.0;
            q.m = m;
            const auto s = counting::enumerate_S(q);
            std::size_t expect = 0;
            for (int k = -N; k <= N; ++k)
                for (int k1 = -N; k1 <= N; ++k1)
                    for (int k3 = -N; k3 <= N; ++k3) {
                        const int k2 = k1 + k3 - k;
                        if (std::abs(k2) > N || k2 == k1 || k2 == k3) continue;
                        if (-2LL * (k1 - k2) * (k3 - k2) == m) ++expect;
                    }
            for (const auto& u : s.quads)
                oracle_ok = oracle_ok &&
                            (-2LL * (u.k1 - u.k2) * (u.k3 - u.k2) == m);
            oracle_ok = oracle_ok && s.size() == expect;
        }
    pass = pass && oracle_ok;
    report(6, pass, "counting audits",
           "worst fitted constant " + fmtnum(worst) + " (" + worst_id +
               "), alpha=2 oracle " + (oracle_ok ? "exact" : "MISMATCH"));
}

void criterion7_tensor() {
    bool pass = true;
    std::string detail;

    // unfold-norm symmetry and Frobenius domination at 1e-6
    {
        counting::CountingQuery q;
        q.N = q.N1 = q.N2 = q.N3 = 32;
        q.alpha = 1.5;
        const auto T = tensor::base_tensor(q);
        double worst_sym = 0.0;
        for (const auto& part : std::vector<
                 std::pair<std::vector<std::string>, std::vector<std::string>>>{
                 {{"k", "k1"}, {"k2", "k3"}},
                 {{"k", "k2"}, {"k1", "k3"}},
                 {{"k1"}, {"k", "k2", "k3"}}}) {
            const double a = tensor::unfold_norm(T, part.first, part.second);
            const double b = tensor::unfold_norm(T, part.second, part.first);
            worst_sym = std::max(worst_sym, std::abs(a - b) / std::max(1.0, a));
            pass = pass && a <= tensor::hs_norm(T) * (1.0 + 1e-6);
        }
        Rng rng(31415);
        for (int rep = 0; rep < 10; ++rep) {
            const auto t = random_sparse({"a", "b", "c"}, -4, 4, 60, rng);
            const double a = tensor::unfold_norm(t, {"a"}, {"b", "c"});
            const double b = tensor::unfold_norm(t, {"b", "c"}, {"a"});
            worst_sym = std::max(worst_sym, std::abs(a - b) / std::max(1.0, a));
            pass = pass && a <= tensor::hs_norm(t) * (1.0 + 1e-6);
        }
        pass = pass && worst_sym <= 1e-6;
        detail += "sym defect " + fmtnum(worst_sym);
    }

    // PROP:contr on 100 randomized instances, all partitions, 1e-9 relative
    {
        Rng rng(2718281);
        bool ok = true;
        for (int rep = 0; rep < 100 && ok; ++rep) {
            const auto h1 = random_sparse({"x1", "c1", "y1"}, -3, 3, 40, rng);
            const auto h2 = random_sparse({"c1", "x2"}, -3, 3, 20, rng);
            const auto H = tensor::semiproduct(h1, h2);
            const std::vector<std::string> A = {"x1", "y1", "x2"};
            for (int mask = 0; mask < 8; ++mask) {
                std::vector<std::string> X, Y;
                for (int i = 0; i < 3; ++i)
                    ((mask >> i) & 1 ? X : Y).push_back(A[i]);
                std::vector<std::string> b1, c1v, b2, c2v;
                for (const auto& ax : {std::string("x1"), std::string("y1")}) {
                    const bool inX = std::find(X.begin(), X.end(), ax) != X.end();
                    (inX ? b1 : c1v).push_back(ax);
                }
                b1.push_back("c1");
                const bool inX = std::find(X.begin(), X.end(), "x2") != X.end();
                (inX ? b2 : c2v).push_back("x2");
                c2v.insert(c2v.begin(), "c1");
                const double lhs = svd_norm(H, X, Y);
                const double rhs = svd_norm(h1, b1, c1v) * svd_norm(h2, b2, c2v);
                ok = ok && lhs <= rhs * (1.0 + 1e-9);
            }
        }
        pass = pass && ok;
        detail += std::string(", contr ") + (ok ? "ok" : "VIOLATED");
    }

    // PROP:co weighted bound, kappa = 2, 100 randomized instances
    {
        Rng rng(16180);
        const double kappa = 2.0;
        bool ok = true;
        for (int rep = 0; rep < 100 && ok; ++rep) {
            const int L = 1 + static_cast<int>(rng.next_u64() % 4);
            tensor::SparseTensor4 h1({"k", "kp"}, {{-8, 8}, {-8, 8}});
            for (int k = -8; k <= 8; ++k)
                for (int kp = std::max(-8, k - L); kp <= std::min(8, k + L); ++kp)
                    if (rng.uniform01() < 0.5)
                        h1.add({k, kp}, rng.gaussian_complex());
            const auto h2 = random_sparse({"kp", "kpp"}, -8, 8, 60, rng);
            const auto h = tensor::semiproduct(h1, h2);
            double lhs = 0.0;
            for (const auto& [idx, v] : h.entries)
                lhs += std::pow(1.0 + std::abs(idx[0] - idx[1]) / double(L),
                                2 * kappa) *
                       std::norm(v);
            lhs = std::sqrt(lhs);
            tensor::SparseTensor4 h1abs = h1;
            for (auto& [idx, v] : h1abs.entries) v = std::abs(v);
            double w2 = 0.0;
            for (const auto& [idx, v] : h2.entries)
                w2 += std::pow(1.0 + std::abs(idx[0] - idx[1]) / double(L),
                               2 * kappa) *
                      std::norm(v);
            const double rhs = std::pow(2.0, kappa) *
                               svd_norm(h1abs, {"kp"}, {"k"}) * std::sqrt(w2);
            ok = ok && lhs <= rhs * (1.0 + 1e-9);
        }
        pass = pass && ok;
        detail += std::string(", co ") + (ok ? "ok" : "VIOLATED");
    }

    // tensor lemma audits bounded as in criterion 6
    {
        std::vector<counting::CountingQuery> sweep, gsweep;
        for (int N : {32, 64, 128, 256}) {
            counting::CountingQuery q;
            q.N = q.N1 = q.N2 = q.N3 = N;
            q.alpha = 1.5;
            sweep.push_back(q);
            q.N1 = q.N2 = q.N3 = N / 2;
            q.m = -2;
            gsweep.push_back(q);
        }
        double worst = 0.0;
        bool growth = false;
        for (const auto* id : {"tensor2", "tensor3", "tensor4"}) {
            const auto rep = tensor::tensor_lemma_audit(id, 1.5, sweep);
            for (const auto& r : rep.rows) worst = std::max(worst, r.ratio);
            growth = growth || rep.constant_growth_exceeds(2.0);
        }
        const auto repg = tensor::tensor_lemma_audit("gammaT", 1.5, gsweep);
        for (const auto& r : repg.rows) worst = std::max(worst, r.ratio);
        growth = growth || repg.constant_growth_exceeds(2.0);
        pass = pass && worst <= 64.0 && !growth;
        detail += ", worst audit constant " + fmtnum(worst);
    }
    report(7, pass, "tensor norm properties and audits", detail);
}

void criterion8_chaos() {
    Rng rng(86400);
    const double ratio = gibbs::chaos_moment_check(3, 4, 1000000, rng);
    const double bound = std::pow(3.0, 1.5) * 1.05;
    report(8, ratio <= bound, "degree-3 chaos moment bound",
           "L4/L2 ratio " + fmtnum(ratio) + " <= " + fmtnum(bound));
}

void criterion9_reproducibility() {
    const auto run_rows = [](const char* experiment, nlohmann::json params,
                             int threads) {
        harness::ExperimentConfig cfg;
        cfg.experiment = experiment;
        cfg.seed = 11235;
        cfg.threads = threads;
        cfg.params = std::move(params);
        const auto rec = harness::run_experiment(cfg);
        std::ostringstream out;
        for (const auto& row : rec.rows) {
            for (const auto& v : row) out << v << ',';
            out << '\n';
        }
        return out.str();
    };
    const nlohmann::json inv = {{"alpha", 1.5}, {"N", 16.0},  {"count", 512},
                                {"t", 0.1},     {"dt", 5e-3}, {"check_half_dt", true}};
    const bool inv_ok = run_rows("invariance", inv, 1) == run_rows("invariance", inv, 8);

    nlohmann::json sweep;
    sweep["experiment"] = "evolve";
    sweep["base"] = {{"alpha", 1.5}, {"N", 8.0}, {"dt", 1e-2}, {"t_final", 0.1},
                     {"diag_stride", 0}};
    sweep["grid"] = nlohmann::json::array();
    for (int i = 0; i < 12; ++i)
        sweep["grid"].push_back({{"N", 4.0 + (i % 3) * 2.0}});
    const bool sweep_ok = run_rows("sweep", sweep, 1) == run_rows("sweep", sweep, 8);

    report(9, inv_ok && sweep_ok, "bit-exact reproducibility across thread counts",
           std::string("invariance rows ") + (inv_ok ? "identical" : "DIFFER") +
               ", sweep rows " + (sweep_ok ? "identical" : "DIFFER"));
}

}  // namespace

int main() {
    const int threads = worker_threads();
    std::printf("acceptance suite: %d worker thread(s)\n", threads);
    std::fflush(stdout);

    criterion4_conservation();
    criterion5_unitarity();
    criterion8_chaos();
    criterion6_counting_audits();
    criterion7_tensor();
    criterion2_mc_wick(threads);
    criterion9_reproducibility();
    criterion1_picard_phase_transition(threads);
    criterion3_invariance(threads);

    std::printf("%s: %d criterion failure(s)\n",
                g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", g_failures);
    return g_failures;
}
