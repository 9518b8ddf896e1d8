#include "fnlslab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace fnlslab::tensor {

void SparseTensor4::add(const Index& idx, cplx v) {
    if (idx.size() != axes.size())
        throw std::invalid_argument("SparseTensor4::add: rank mismatch");
    for (std::size_t a = 0; a < idx.size(); ++a)
        if (idx[a] < bounds[a].first || idx[a] > bounds[a].second)
            throw std::out_of_range("SparseTensor4::add: index outside bounds");
    if (v == cplx(0.0)) return;
    auto [it, inserted] = entries.emplace(idx, v);
    if (!inserted) {
        it->second += v;
        if (it->second == cplx(0.0)) entries.erase(it);
    }
}

std::size_t SparseTensor4::axis_pos(const std::string& name) const {
    for (std::size_t a = 0; a < axes.size(); ++a)
        if (axes[a] == name) return a;
    throw std::invalid_argument("SparseTensor4: no axis named " + name);
}

namespace {

SparseTensor4 base_tensor_from(const counting::QuadSet& s,
                               const counting::CountingQuery& q) {
    SparseTensor4 t({"k", "k1", "k2", "k3"},
                    {{-q.N, q.N}, {-q.N1, q.N1}, {-q.N2, q.N2}, {-q.N3, q.N3}});
    for (const auto& u : s.quads) t.add({u.k, u.k1, u.k2, u.k3}, cplx(1.0));
    return t;
}

}  // namespace

SparseTensor4 base_tensor(const counting::CountingQuery& q) {
    return base_tensor_from(counting::enumerate_S(q), q);
}

SparseTensor4 base_tensor_restricted(const counting::CountingQuery& q) {
    auto s = counting::enumerate_S(q);
    counting::QuadSet r;
    r.query = s.query;
    for (const auto& u : s.quads)
        if (std::abs(u.k1 + u.k3) < std::abs(u.k2)) r.quads.push_back(u);
    return base_tensor_from(r, q);
}

SparseTensor4 base_tensor_gamma(const counting::CountingQuery& q, double Gamma) {
    return base_tensor_from(counting::gamma_restrict(counting::enumerate_S(q), Gamma), q);
}

double hs_norm(const SparseTensor4& t) {
    double acc = 0.0;
    for (const auto& [idx, v] : t.entries) acc += std::norm(v);
    return std::sqrt(acc);
}

namespace {

// Sparse unfolding in CSR-ish triplet form with dense row/col id maps.
struct Unfolding {
    std::vector<int> row, col;   // per nonzero
    std::vector<cplx> val;
    std::size_t nrows = 0, ncols = 0;
};

Unfolding build_unfolding(const SparseTensor4& t, const std::vector<std::string>& B,
                          const std::vector<std::string>& C) {
    std::vector<std::size_t> bpos, cpos;
    for (const auto& n : B) bpos.push_back(t.axis_pos(n));
    for (const auto& n : C) cpos.push_back(t.axis_pos(n));
    if (bpos.size() + cpos.size() != t.axes.size())
        throw std::invalid_argument("unfold: (B,C) must partition the axes");
    {
        std::vector<std::size_t> all = bpos;
        all.insert(all.end(), cpos.begin(), cpos.end());
        std::sort(all.begin(), all.end());
        for (std::size_t a = 0; a < all.size(); ++a)
            if (all[a] != a)
                throw std::invalid_argument("unfold: (B,C) must partition the axes");
    }
    Unfolding u;
    std::map<Index, int> rid, cid;  // ordered => deterministic ids
    for (const auto& [idx, v] : t.entries) {
        Index bi, ci;
        for (auto p : bpos) bi.push_back(idx[p]);
        for (auto p : cpos) ci.push_back(idx[p]);
        auto [itc, newc] = cid.emplace(bi, 0);
        if (newc) itc->second = static_cast<int>(cid.size()) - 1;
        auto [itr, newr] = rid.emplace(ci, 0);
        if (newr) itr->second = static_cast<int>(rid.size()) - 1;
        u.col.push_back(itc->second);
        u.row.push_back(itr->second);
        u.val.push_back(v);
    }
    u.nrows = rid.size();
    u.ncols = cid.size();
    return u;
}

}  // namespace

double unfold_norm(const SparseTensor4& t, const std::vector<std::string>& B,
                   const std::vector<std::string>& C) {
    if (t.entries.empty()) {
        (void)build_unfolding(t, B, C);  // still validate the partition
        return 0.0;
    }
    const Unfolding u = build_unfolding(t, B, C);
    // power iteration on A* A, deterministic start
    std::vector<cplx> v(u.ncols), av(u.nrows), atav(u.ncols);
    Rng rng(0x7e57ab1eULL);
    double nv = 0.0;
    for (auto& x : v) {
        x = rng.gaussian_complex();
        nv += std::norm(x);
    }
    nv = std::sqrt(nv);
    for (auto& x : v) x /= nv;

    double sigma_prev = 0.0, sigma = 0.0;
    const int cap = 10000;
    for (int it = 0; it < cap; ++it) {
        std::fill(av.begin(), av.end(), cplx(0.0));
        for (std::size_t e = 0; e < u.val.size(); ++e)
            av[static_cast<std::size_t>(u.row[e])] +=
                u.val[e] * v[static_cast<std::size_t>(u.col[e])];
        std::fill(atav.begin(), atav.end(), cplx(0.0));
        for (std::size_t e = 0; e < u.val.size(); ++e)
            atav[static_cast<std::size_t>(u.col[e])] +=
                std::conj(u.val[e]) * av[static_cast<std::size_t>(u.row[e])];
        double n2 = 0.0;
        for (const auto& x : av) n2 += std::norm(x);
        sigma_prev = sigma;
        sigma = std::sqrt(n2);  // Rayleigh quotient ||A v||, ||v|| = 1
        double na = 0.0;
        for (const auto& x : atav) na += std::norm(x);
        na = std::sqrt(na);
        if (na == 0.0) return 0.0;  // v in the kernel: norm 0 tensor slice
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = atav[i] / na;
        if (it > 0 && std::abs(sigma - sigma_prev) <= 1e-8 * std::max(1.0, sigma))
            return sigma;
    }
    throw PowerIterationError(std::min(sigma_prev, sigma), std::max(sigma_prev, sigma));
}

SparseTensor4 semiproduct(const SparseTensor4& h1, const SparseTensor4& h2) {
    // shared axes and their positions
    std::vector<std::string> shared;
    for (const auto& a : h1.axes)
        if (std::find(h2.axes.begin(), h2.axes.end(), a) != h2.axes.end())
            shared.push_back(a);
    std::vector<std::size_t> c1, c2, r1, r2;  // shared / retained positions
    for (std::size_t a = 0; a < h1.axes.size(); ++a) {
        if (std::find(shared.begin(), shared.end(), h1.axes[a]) != shared.end())
            c1.push_back(a);
        else
            r1.push_back(a);
    }
    for (const auto& name : shared) {
        const auto p1 = h1.axis_pos(name), p2 = h2.axis_pos(name);
        if (h1.bounds[p1] != h2.bounds[p2])
            throw std::invalid_argument("semiproduct: bounds differ on shared axis " + name);
        c2.push_back(p2);
    }
    for (std::size_t a = 0; a < h2.axes.size(); ++a)
        if (std::find(shared.begin(), shared.end(), h2.axes[a]) == shared.end())
            r2.push_back(a);

    std::vector<std::string> out_axes;
    std::vector<std::pair<int, int>> out_bounds;
    for (auto p : r1) {
        out_axes.push_back(h1.axes[p]);
        out_bounds.push_back(h1.bounds[p]);
    }
    for (auto p : r2) {
        if (std::find(out_axes.begin(), out_axes.end(), h2.axes[p]) != out_axes.end())
            throw std::invalid_argument("semiproduct: duplicate non-shared axis " +
                                        h2.axes[p]);
        out_axes.push_back(h2.axes[p]);
        out_bounds.push_back(h2.bounds[p]);
    }
    SparseTensor4 out(out_axes, out_bounds);

    // bucket h2 entries by shared key
    std::map<Index, std::vector<std::pair<Index, cplx>>> by_shared;
    for (const auto& [idx, v] : h2.entries) {
        Index key, rest;
        for (auto p : c2) key.push_back(idx[p]);
        for (auto p : r2) rest.push_back(idx[p]);
        by_shared[key].emplace_back(rest, v);
    }
    for (const auto& [idx, v] : h1.entries) {
        Index key, rest;
        for (auto p : c1) key.push_back(idx[p]);
        for (auto p : r1) rest.push_back(idx[p]);
        const auto it = by_shared.find(key);
        if (it == by_shared.end()) continue;
        for (const auto& [rest2, v2] : it->second) {
            Index oi = rest;
            oi.insert(oi.end(), rest2.begin(), rest2.end());
            out.add(oi, v * v2);
        }
    }
    return out;
}

counting::AuditReport tensor_lemma_audit(const std::string& lemma_id, double alpha,
                                         const std::vector<counting::CountingQuery>& sweep) {
    if (sweep.size() < 3)
        throw std::invalid_argument("tensor_lemma_audit: sweep must cover >= 3 scales");
    counting::AuditReport rep;
    const auto mn = [](int x, int y) { return static_cast<double>(std::min(x, y)); };
    const auto sq = [](double x) { return x * x; };
    for (counting::CountingQuery q : sweep) {
        q.alpha = alpha;
        const double a = alpha;
        auto push = [&](const std::string& id, double value_sq, double bound) {
            rep.rows.push_back({id, a, q.N, q.N1, q.N2, q.N3, value_sq, bound,
                                value_sq / bound});
        };
        if (lemma_id == "tensor2") {
            const auto T = base_tensor(q);
            push("tensor2.kk1_k2k3", sq(unfold_norm(T, {"k", "k1"}, {"k2", "k3"})),
                 std::pow(mn(q.N2, q.N3), 2.0 - a) * std::pow(q.N1, 2.0 - a));
            push("tensor2.kk3_k1k2", sq(unfold_norm(T, {"k", "k3"}, {"k1", "k2"})),
                 std::pow(mn(q.N1, q.N2), 2.0 - a) * std::pow(q.N3, 2.0 - a));
            push("tensor2.kk2_k1k3", sq(unfold_norm(T, {"k", "k2"}, {"k1", "k3"})),
                 std::pow(mn(q.N1, q.N3), 1.0 - a / 2.0) *
                     std::pow(mn(q.N, q.N2), 1.0 - a / 2.0));
        } else if (lemma_id == "tensor3") {
            const auto T = base_tensor(q);
            const auto lg = [](double x) { return std::log(std::max(2.0, x)); };
            push("tensor3.k", sq(unfold_norm(T, {"k"}, {"k1", "k2", "k3"})),
                 std::min(std::pow(mn(q.N2, q.N3), 2.0 - a) * lg(q.N1) + q.N1,
                          std::pow(mn(q.N1, q.N2), 2.0 - a) * lg(q.N3) + q.N3));
            push("tensor3.k1", sq(unfold_norm(T, {"k1"}, {"k", "k2", "k3"})),
                 std::min(std::pow(static_cast<double>(q.N3), 2.0 - a) * lg(q.N2) + q.N2,
                          q.N3 * std::pow(mn(q.N1, q.N3), 1.0 - a / 2.0) + q.N3));
            push("tensor3.k2", sq(unfold_norm(T, {"k2"}, {"k", "k1", "k3"})),
                 std::min(std::pow(static_cast<double>(q.N3), 2.0 - a) * lg(q.N1) + q.N1,
                          std::pow(static_cast<double>(q.N1), 2.0 - a) * lg(q.N3) + q.N3));
            push("tensor3.k3", sq(unfold_norm(T, {"k3"}, {"k", "k1", "k2"})),
                 std::min(std::pow(static_cast<double>(q.N1), 2.0 - a) * lg(q.N2) + q.N2,
                          q.N1 * std::pow(mn(q.N, q.N2), 1.0 - a / 2.0) + q.N1));
        } else if (lemma_id == "tensor4") {
            const auto T = base_tensor_restricted(q);
            push("tensor4.frob", sq(hs_norm(T)),
                 static_cast<double>(q.N1) * q.N3);
            push("tensor4.kk2_k1k3", sq(unfold_norm(T, {"k", "k2"}, {"k1", "k3"})),
                 std::pow(mn(q.N1, q.N3), 1.0 - a / 2.0));
            push("tensor4.k1", sq(unfold_norm(T, {"k1"}, {"k", "k2", "k3"})),
                 static_cast<double>(q.N3));
            push("tensor4.k3", sq(unfold_norm(T, {"k3"}, {"k", "k1", "k2"})),
                 static_cast<double>(q.N1));
        } else if (lemma_id == "gammaT") {
            const double Gamma = q.Gamma ? *q.Gamma : q.N / 2.0;
            const auto T = base_tensor_gamma(q, Gamma);
            int caps[3] = {q.N1, q.N2, q.N3};
            std::sort(caps, caps + 3);
            const double nmin = caps[0], nmed = caps[1];
            push("gammaT.frob", sq(hs_norm(T)), nmin * nmed);
            push("gammaT.k1", sq(unfold_norm(T, {"k1"}, {"k", "k2", "k3"})), nmed);
            push("gammaT.k3", sq(unfold_norm(T, {"k3"}, {"k", "k1", "k2"})), nmed);
            push("gammaT.k2", sq(unfold_norm(T, {"k2"}, {"k", "k1", "k3"})), nmed);
        } else {
            throw std::invalid_argument("tensor_lemma_audit: unknown lemma_id " +
                                        lemma_id);
        }
    }
    return rep;
}

ContractionReport random_contraction_check(const SparseTensor4& h,
                                           const std::vector<int>& signs,
                                           std::size_t trials, Rng& rng) {
    if (h.axes.size() < 3)
        throw std::invalid_argument("random_contraction_check: need axes {b,c} + A");
    const std::size_t bpos = h.axis_pos("b"), cpos = h.axis_pos("c");
    std::vector<std::size_t> apos;
    std::vector<std::string> anames;
    for (std::size_t a = 0; a < h.axes.size(); ++a)
        if (a != bpos && a != cpos) {
            apos.push_back(a);
            anames.push_back(h.axes[a]);
        }
    if (signs.size() != apos.size())
        throw std::invalid_argument("random_contraction_check: signs size mismatch");

    // pairing validation: no k_i = k_j with zeta_i + zeta_j = 0 in any entry
    for (const auto& [idx, v] : h.entries)
        for (std::size_t i = 0; i < apos.size(); ++i)
            for (std::size_t j = i + 1; j < apos.size(); ++j)
                if (idx[apos[i]] == idx[apos[j]] && signs[i] + signs[j] == 0)
                    throw std::invalid_argument(
                        "random_contraction_check: support contains a pairing in k_A");

    // Gaussian pool over the union of A-axis ranges
    int lo = 0, hi = 0;
    for (auto p : apos) {
        lo = std::min(lo, h.bounds[p].first);
        hi = std::max(hi, h.bounds[p].second);
    }
    std::vector<double> norms(trials);
    std::vector<cplx> g(static_cast<std::size_t>(hi - lo + 1));
    for (std::size_t tr = 0; tr < trials; ++tr) {
        for (auto& x : g) x = rng.gaussian_complex();
        SparseTensor4 H({"b", "c"}, {h.bounds[bpos], h.bounds[cpos]});
        for (const auto& [idx, v] : h.entries) {
            cplx w = v;
            for (std::size_t i = 0; i < apos.size(); ++i) {
                const cplx gi = g[static_cast<std::size_t>(idx[apos[i]] - lo)];
                w *= (signs[i] > 0) ? gi : std::conj(gi);
            }
            H.add({idx[bpos], idx[cpos]}, w);
        }
        norms[tr] = unfold_norm(H, {"b"}, {"c"});
    }
    std::sort(norms.begin(), norms.end());
    ContractionReport rep;
    const std::size_t q99 =
        std::min(trials - 1, static_cast<std::size_t>(std::ceil(0.99 * trials)) - 1);
    rep.percentile99 = norms[q99];

    // max over partitions (B, C) of A of ||h||_{b k_B -> c k_C}
    const std::size_t na = apos.size();
    double denom = 0.0;
    for (std::uint64_t mask = 0; mask < (1ULL << na); ++mask) {
        std::vector<std::string> B = {"b"}, C = {"c"};
        for (std::size_t i = 0; i < na; ++i)
            ((mask >> i) & 1 ? B : C).push_back(anames[i]);
        denom = std::max(denom, unfold_norm(h, B, C));
    }
    rep.denominator = denom;
    rep.ratio = denom > 0.0 ? rep.percentile99 / denom : 0.0;
    return rep;
}

}  // namespace fnlslab::tensor
