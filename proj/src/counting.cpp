#include "fnlslab/counting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace fnlslab::counting {

namespace {

struct PowTable {
    std::vector<double> pw;  // n^alpha
    explicit PowTable(int nmax, double alpha)
        : pw(static_cast<std::size_t>(nmax) + 1) {
        for (int n = 0; n <= nmax; ++n)
            pw[static_cast<std::size_t>(n)] =
                n == 0 ? 0.0 : std::pow(static_cast<double>(n), alpha);
    }
    double operator()(long long n) const {
        return pw[static_cast<std::size_t>(n < 0 ? -n : n)];
    }
};

double jb(long long k) {
    const double kd = static_cast<double>(k);
    return std::sqrt(1.0 + kd * kd);
}

std::uint64_t pack2(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(b));
}

int nmed_of(const CountingQuery& q) {
    int v[3] = {q.N1, q.N2, q.N3};
    std::sort(v, v + 3);
    return v[1];
}

int nmin_of(const CountingQuery& q) {
    return std::min({q.N1, q.N2, q.N3});
}

}  // namespace

void CountingQuery::validate() const {
    if (N < 1 || N1 < 1 || N2 < 1 || N3 < 1)
        throw std::invalid_argument("CountingQuery: N, N_j >= 1 required");
    if (N1 > N || N2 > N || N3 > N)
        throw std::invalid_argument("CountingQuery: N_j <= N required");
    if (!(alpha > 0.0) || alpha > 2.0)
        throw std::invalid_argument("CountingQuery: alpha in (0, 2] required");
    if (!(bad_c > 0.0 && bad_c <= 0.5))
        throw std::invalid_argument("CountingQuery: bad_c in (0, 1/2] required");
}

bool member(const CountingQuery& q, int k, int k1, int k2, int k3) {
    if (k != k1 - k2 + k3) return false;
    if (k2 == k1 || k2 == k3) return false;
    if (std::abs(k) > q.N || std::abs(k1) > q.N1 || std::abs(k2) > q.N2 ||
        std::abs(k3) > q.N3)
        return false;
    const PowTable pw(std::max({q.N, q.N1, q.N2, q.N3}), q.alpha);
    const double phi = pw(k1) - pw(k2) + pw(k3) - pw(k);
    return std::floor(phi) == static_cast<double>(q.m);
}

QuadSet enumerate_S(const CountingQuery& q) {
    q.validate();
    if (q.N > 4096) {
        const double cost = (2.0 * q.N + 1) * (2.0 * q.N1 + 1) * (2.0 * q.N3 + 1);
        throw std::invalid_argument(
            "enumerate_S: N > 4096 refused (estimated inner iterations: " +
            std::to_string(cost) + ")");
    }
    const PowTable pw(std::max({q.N, q.N1, q.N2, q.N3}), q.alpha);
    const double md = static_cast<double>(q.m);
    QuadSet s;
    s.query = q;
    for (int k = -q.N; k <= q.N; ++k) {
        const double pk = pw(k);
        for (int k1 = -q.N1; k1 <= q.N1; ++k1) {
            const double p1 = pw(k1) - pk;
            for (int k3 = -q.N3; k3 <= q.N3; ++k3) {
                const int k2 = k1 + k3 - k;
                if (std::abs(k2) > q.N2 || k2 == k1 || k2 == k3) continue;
                const double phi = p1 - pw(k2) + pw(k3);
                if (std::floor(phi) == md) s.quads.push_back({k, k1, k2, k3});
            }
        }
    }
    return s;
}

std::size_t slice_count(const QuadSet& s, const SliceSpec& fixed) {
    std::size_t n = 0;
    for (const auto& t : s.quads) {
        if (fixed.k && *fixed.k != t.k) continue;
        if (fixed.k1 && *fixed.k1 != t.k1) continue;
        if (fixed.k2 && *fixed.k2 != t.k2) continue;
        if (fixed.k3 && *fixed.k3 != t.k3) continue;
        ++n;
    }
    return n;
}

std::pair<QuadSet, QuadSet> classify_good_bad(const QuadSet& s, SlicePair pair) {
    QuadSet good, bad;
    good.query = s.query;
    bad.query = s.query;
    const double c = s.query.bad_c;
    for (const auto& t : s.quads) {
        bool is_bad;
        if (pair == SlicePair::k1k3) {
            const double lhs = std::abs(2.0 * t.k - (t.k1 + t.k3));
            is_bad = lhs < c * std::abs(static_cast<double>(t.k1 + t.k3));
        } else {
            const double lhs = std::abs(2.0 * t.k1 - (t.k + t.k2));
            is_bad = lhs < c * std::abs(static_cast<double>(t.k + t.k2));
        }
        (is_bad ? bad : good).quads.push_back(t);
    }
    return {good, bad};
}

QuadSet gamma_restrict(const QuadSet& s, double Gamma) {
    if (!(Gamma > 0.0)) throw std::invalid_argument("gamma_restrict: Gamma > 0");
    const auto& q = s.query;
    // index of the frequency carrying N_max (ties: larger |k_j|, then lower j)
    const int caps[3] = {q.N1, q.N2, q.N3};
    const int cap_max = std::max({q.N1, q.N2, q.N3});
    const int nmed = nmed_of(q);
    QuadSet out;
    out.query = q;
    out.query.Gamma = Gamma;
    for (const auto& t : s.quads) {
        const int freqs[3] = {t.k1, t.k2, t.k3};
        int kmax_val = 0;
        bool first = true;
        for (int j = 0; j < 3; ++j) {
            if (caps[j] != cap_max) continue;
            if (first || std::abs(freqs[j]) > std::abs(kmax_val)) {
                kmax_val = freqs[j];
                first = false;
            }
        }
        if (!(std::abs(kmax_val) <= Gamma && Gamma < std::abs(t.k))) continue;
        // interval confinement forced by k = k1 - k2 + k3
        if (!(std::abs(t.k) <= Gamma + 2.0 * nmed) ||
            !(std::abs(kmax_val) >= Gamma - 2.0 * nmed))
            throw std::logic_error("gamma_restrict: confinement violated");
        out.quads.push_back(t);
    }
    return out;
}

double AuditReport::max_ratio(const std::string& id_prefix) const {
    double m = 0.0;
    for (const auto& r : rows)
        if (r.lemma_id.rfind(id_prefix, 0) == 0) m = std::max(m, r.ratio);
    return m;
}

bool AuditReport::constant_growth_exceeds(double factor) const {
    // group rows by lemma_id, compare consecutive scales
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            if (rows[i].lemma_id != rows[j].lemma_id) continue;
            if (rows[j].N == 2 * rows[i].N && rows[i].ratio > 0.0 &&
                rows[j].ratio > rows[i].ratio * factor)
                return true;
            break;
        }
    return false;
}

namespace {

using SliceMap = std::unordered_map<std::uint64_t, std::size_t>;

AuditRow worst_slice(const std::string& id, const CountingQuery& q,
                     const SliceMap& counts,
                     const std::function<double(std::uint64_t)>& rhs) {
    AuditRow row{id, q.alpha, q.N, q.N1, q.N2, q.N3, 0.0, 0.0, 0.0};
    for (const auto& [key, cnt] : counts) {
        const double bound = rhs(key);
        const double ratio = static_cast<double>(cnt) / bound;
        if (ratio > row.ratio) {
            row.ratio = ratio;
            row.count = static_cast<double>(cnt);
            row.bound = bound;
        }
    }
    return row;
}

int hi32(std::uint64_t key) { return static_cast<int>(key >> 32); }
int lo32(std::uint64_t key) { return static_cast<int>(key & 0xffffffffULL); }

}  // namespace

AuditReport lemma_audit(const std::string& lemma_id, double alpha,
                        const std::vector<CountingQuery>& sweep) {
    if (sweep.size() < 3)
        throw std::invalid_argument("lemma_audit: sweep must cover >= 3 scales");
    AuditReport rep;
    for (CountingQuery q : sweep) {
        q.alpha = alpha;
        const QuadSet s = enumerate_S(q);
        const double a = alpha;
        const auto mn = [](int x, int y) { return static_cast<double>(std::min(x, y)); };
        const auto mx = [](int x, int y) { return static_cast<double>(std::max(x, y)); };
        const auto lg = [](double x) { return std::log(std::max(2.0, x)); };

        if (lemma_id == "counting1") {
            SliceMap kk1, kk3, k1k2, k2k3;
            for (const auto& t : s.quads) {
                ++kk1[pack2(t.k, t.k1)];
                ++kk3[pack2(t.k, t.k3)];
                ++k1k2[pack2(t.k1, t.k2)];
                ++k2k3[pack2(t.k2, t.k3)];
            }
            rep.rows.push_back(worst_slice("counting1.kk1", q, kk1, [&](std::uint64_t key) {
                return std::pow(mn(q.N2, q.N3), 2.0 - a) / jb(hi32(key) - lo32(key)) + 1.0;
            }));
            rep.rows.push_back(worst_slice("counting1.kk3", q, kk3, [&](std::uint64_t key) {
                return std::pow(mn(q.N1, q.N2), 2.0 - a) / jb(hi32(key) - lo32(key)) + 1.0;
            }));
            rep.rows.push_back(worst_slice("counting1.k1k2", q, k1k2, [&](std::uint64_t key) {
                return std::pow(static_cast<double>(q.N3), 2.0 - a) /
                           jb(hi32(key) - lo32(key)) + 1.0;
            }));
            rep.rows.push_back(worst_slice("counting1.k2k3", q, k2k3, [&](std::uint64_t key) {
                return std::pow(static_cast<double>(q.N1), 2.0 - a) /
                           jb(hi32(key) - lo32(key)) + 1.0;
            }));
        } else if (lemma_id == "cor_counting") {
            SliceMap mk, mk1, mk2, mk3;
            for (const auto& t : s.quads) {
                ++mk[pack2(t.k, 0)];
                ++mk1[pack2(t.k1, 0)];
                ++mk2[pack2(t.k2, 0)];
                ++mk3[pack2(t.k3, 0)];
            }
            const double bk = std::min(std::pow(mn(q.N2, q.N3), 2.0 - a) * lg(q.N1) + q.N1,
                                       std::pow(mn(q.N1, q.N2), 2.0 - a) * lg(q.N3) + q.N3);
            const double bk1 = std::min(std::pow(static_cast<double>(q.N3), 2.0 - a) * lg(q.N2) + q.N2,
                                        std::pow(static_cast<double>(q.N2), 2.0 - a) * lg(q.N3) + q.N3);
            const double bk2 = std::min(std::pow(static_cast<double>(q.N3), 2.0 - a) * lg(q.N1) + q.N1,
                                        std::pow(static_cast<double>(q.N1), 2.0 - a) * lg(q.N3) + q.N3);
            const double bk3 = std::min(std::pow(static_cast<double>(q.N1), 2.0 - a) * lg(q.N2) + q.N2,
                                        std::pow(static_cast<double>(q.N2), 2.0 - a) * lg(q.N1) + q.N1);
            rep.rows.push_back(worst_slice("cor_counting.k", q, mk, [&](std::uint64_t) { return bk; }));
            rep.rows.push_back(worst_slice("cor_counting.k1", q, mk1, [&](std::uint64_t) { return bk1; }));
            rep.rows.push_back(worst_slice("cor_counting.k2", q, mk2, [&](std::uint64_t) { return bk2; }));
            rep.rows.push_back(worst_slice("cor_counting.k3", q, mk3, [&](std::uint64_t) { return bk3; }));
        } else if (lemma_id == "counting2" || lemma_id == "cor_bad") {
            const auto [good13, bad13] = classify_good_bad(s, SlicePair::k1k3);
            const auto [goodk2, badk2] = classify_good_bad(s, SlicePair::kk2);
            SliceMap g13, b13, gk2, bk2;
            for (const auto& t : good13.quads) ++g13[pack2(t.k1, t.k3)];
            for (const auto& t : bad13.quads) ++b13[pack2(t.k1, t.k3)];
            for (const auto& t : goodk2.quads) ++gk2[pack2(t.k, t.k2)];
            for (const auto& t : badk2.quads) ++bk2[pack2(t.k, t.k2)];
            if (lemma_id == "counting2") {
                rep.rows.push_back(worst_slice("counting2.good_k1k3", q, g13,
                                               [](std::uint64_t) { return 1.0; }));
                rep.rows.push_back(worst_slice("counting2.good_kk2", q, gk2,
                                               [](std::uint64_t) { return 1.0; }));
                rep.rows.push_back(worst_slice("counting2.bad_k1k3", q, b13, [&](std::uint64_t key) {
                    return std::pow(std::abs(static_cast<double>(hi32(key) + lo32(key))),
                                    1.0 - a / 2.0) + 1.0;
                }));
                rep.rows.push_back(worst_slice("counting2.bad_kk2", q, bk2, [&](std::uint64_t key) {
                    return std::pow(std::abs(static_cast<double>(hi32(key) + lo32(key))),
                                    1.0 - a / 2.0) + 1.0;
                }));
            } else {
                rep.rows.push_back(worst_slice("cor_bad.kk2", q, bk2, [&](std::uint64_t) {
                    return std::pow(mn(q.N1, q.N3), 1.0 - a / 2.0);
                }));
                rep.rows.push_back(worst_slice("cor_bad.k1k3", q, b13, [&](std::uint64_t) {
                    return std::pow(mn(q.N, q.N2), 1.0 - a / 2.0);
                }));
            }
        } else if (lemma_id == "S") {
            const double bound =
                std::min(std::pow(static_cast<double>(q.N3), 2.0 - a) * lg(mx(q.N1, q.N2)) * mn(q.N1, q.N2) +
                             static_cast<double>(q.N1) * q.N2,
                         std::pow(static_cast<double>(q.N1), 2.0 - a) * lg(mx(q.N2, q.N3)) * mn(q.N2, q.N3) +
                             static_cast<double>(q.N2) * q.N3);
            rep.rows.push_back({"S", a, q.N, q.N1, q.N2, q.N3,
                                static_cast<double>(s.size()), bound,
                                static_cast<double>(s.size()) / bound});
        } else if (lemma_id == "gamma") {
            const double Gamma = q.Gamma ? *q.Gamma : q.N / 2.0;
            const QuadSet g = gamma_restrict(s, Gamma);
            const double nmed = nmed_of(q), nmin = nmin_of(q);
            rep.rows.push_back({"gamma.S", a, q.N, q.N1, q.N2, q.N3,
                                static_cast<double>(g.size()), nmin * nmed,
                                static_cast<double>(g.size()) / (nmin * nmed)});
            SliceMap mk, mk1, mk2, mk3, mkk2, mk1k3;
            for (const auto& t : g.quads) {
                ++mk[pack2(t.k, 0)];
                ++mk1[pack2(t.k1, 0)];
                ++mk2[pack2(t.k2, 0)];
                ++mk3[pack2(t.k3, 0)];
                ++mkk2[pack2(t.k, t.k2)];
                ++mk1k3[pack2(t.k1, t.k3)];
            }
            for (const auto& [id, mp] :
                 std::vector<std::pair<std::string, const SliceMap*>>{
                     {"gamma.Sk", &mk}, {"gamma.Sk1", &mk1}, {"gamma.Sk2", &mk2},
                     {"gamma.Sk3", &mk3}, {"gamma.Skk2", &mkk2},
                     {"gamma.Sk1k3", &mk1k3}})
                rep.rows.push_back(worst_slice(id, q, *mp,
                                               [&](std::uint64_t) { return nmed; }));
        } else {
            throw std::invalid_argument("lemma_audit: unknown lemma_id " + lemma_id);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// phi' scan.  Ratios are scale invariant along rays (b, x) -> (t b, t x), so
// the lower-bound constants are calibrated on a dense grid of s = x/b and a
// small integer reference grid, then applied to the full integer scan.
// ---------------------------------------------------------------------------
namespace {

double hminus(double s, double alpha) {
    const double t1 = (s == 0.0) ? 0.0 : (s > 0 ? 1.0 : -1.0) * std::pow(std::abs(s), alpha - 1.0);
    const double sm = s - 1.0;
    const double t2 = (sm == 0.0) ? 0.0 : (sm > 0 ? 1.0 : -1.0) * std::pow(std::abs(sm), alpha - 1.0);
    return alpha * std::abs(t1 - t2);
}

double hplus(double s, double alpha) {
    const double t1 = (s == 0.0) ? 0.0 : (s > 0 ? 1.0 : -1.0) * std::pow(std::abs(s), alpha - 1.0);
    const double sm = s - 1.0;
    const double t2 = (sm == 0.0) ? 0.0 : (sm > 0 ? 1.0 : -1.0) * std::pow(std::abs(sm), alpha - 1.0);
    return alpha * std::abs(t1 + t2);
}

double ratio_minus(double s, double alpha) {
    return hminus(s, alpha) / std::min(std::pow(std::abs(s), alpha - 2.0), 1.0);
}

}  // namespace

std::vector<PhiViolation> phi_derivative_scan(double alpha, long long bmax,
                                              long long xmax) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::invalid_argument("phi_derivative_scan: alpha in (1,2) required");
    constexpr double kRegime = 0.125;  // |2x-b| >= |b|/8 counts as "large"
    constexpr double kMargin = 0.999;

    // calibration on a dense s-grid plus a small integer reference grid
    double c_minus = 1e300, c_plus_large = 1e300, c_plus_interior = 1e300;
    const int ns = 800000;
    for (int i = 0; i <= ns; ++i) {
        const double u = -4.0 + 8.0 * i / ns;  // log10 |s| in [-4, 4]
        for (double sgn : {-1.0, 1.0}) {
            const double s = sgn * std::pow(10.0, u);
            c_minus = std::min(c_minus, ratio_minus(s, alpha));
            if (std::abs(2.0 * s - 1.0) >= kRegime)
                c_plus_large = std::min(c_plus_large, hplus(s, alpha));
            if (s > 0.0 && s < 1.0 && s != 0.5 && std::abs(2.0 * s - 1.0) > 1e-12)
                c_plus_interior =
                    std::min(c_plus_interior, hplus(s, alpha) / std::abs(2.0 * s - 1.0));
        }
    }
    for (long long b = -8; b <= 8; ++b) {
        if (b == 0) continue;
        for (long long x = -16; x <= 16; ++x) {
            if (x == 0) continue;
            const double s = static_cast<double>(x) / static_cast<double>(b);
            c_minus = std::min(c_minus, ratio_minus(s, alpha));
            if (std::abs(2.0 * s - 1.0) >= kRegime)
                c_plus_large = std::min(c_plus_large, hplus(s, alpha));
        }
    }
    c_minus *= kMargin;
    c_plus_large *= kMargin;
    c_plus_interior *= kMargin;

    std::vector<PhiViolation> violations;
    for (long long b = -bmax; b <= bmax; ++b) {
        if (b == 0) continue;
        const double bd = static_cast<double>(b);
        const double babs = std::abs(bd);
        for (long long x = -xmax; x <= xmax; ++x) {
            if (x == 0) continue;
            const double xd = static_cast<double>(x);
            const double s = xd / bd;
            const double pm = std::pow(babs, alpha - 1.0) * hminus(s, alpha);
            const double bound_m =
                c_minus * std::min(babs * std::pow(std::abs(xd), alpha - 2.0),
                                   std::pow(babs, alpha - 1.0));
            if (pm < bound_m)
                violations.push_back({b, x, "minus", pm, bound_m});
            if (babs < 1.0) continue;  // phi_+ bounds assume |b| >= 1
            const double pp = std::pow(babs, alpha - 1.0) * hplus(s, alpha);
            const double gap = std::abs(2.0 * xd - bd);
            if (gap >= kRegime * babs) {
                const double bound_p = c_plus_large * std::pow(babs, alpha - 1.0);
                if (pp < bound_p)
                    violations.push_back({b, x, "plus_large", pp, bound_p});
            } else if (gap >= std::pow(babs, 1.0 - alpha / 2.0)) {
                const double bound_s =
                    c_plus_interior * std::pow(babs, alpha / 2.0 - 1.0);
                if (pp < bound_s)
                    violations.push_back({b, x, "plus_interior", pp, bound_s});
            }
        }
    }
    return violations;
}

}  // namespace fnlslab::counting
