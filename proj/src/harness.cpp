#include "fnlslab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>

#include "fnlslab/counting.hpp"
#include "fnlslab/dynamics.hpp"
#include "fnlslab/gibbs.hpp"
#include "fnlslab/parallel.hpp"
#include "fnlslab/picard.hpp"
#include "fnlslab/rao.hpp"
#include "fnlslab/tensor.hpp"

namespace fnlslab::harness {

using nlohmann::json;

nlohmann::json ExperimentConfig::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["seed"] = seed;
    j["threads"] = threads;
    j["output_dir"] = output_dir;
    j["params"] = params;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.experiment = j.at("experiment").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("params")) cfg.params = j.at("params");
    return cfg;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_digest(const ExperimentConfig& cfg) {
    // the digest covers everything that determines the numbers: experiment,
    // params, seed (thread count and output path do not)
    json j;
    j["experiment"] = cfg.experiment;
    j["seed"] = cfg.seed;
    j["params"] = cfg.params;
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const ExperimentRecord& rec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out << "config_digest";
    for (const auto& c : rec.columns) out << ',' << c;
    out << '\n';
    for (const auto& row : rec.rows) {
        out << rec.config_digest;
        for (const auto& v : row) out << ',' << v;
        out << '\n';
    }
}

void write_jsonl(const ExperimentRecord& rec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_jsonl: cannot open " + path);
    json meta;
    meta["config_digest"] = rec.config_digest;
    meta["version"] = rec.version;
    meta["timestamp"] = rec.timestamp;
    out << meta.dump() << '\n';
    for (const auto& row : rec.rows) {
        json j;
        j["config_digest"] = rec.config_digest;
        for (std::size_t i = 0; i < rec.columns.size() && i < row.size(); ++i)
            j[rec.columns[i]] = row[i];
        out << j.dump() << '\n';
    }
}

void save_field(const spectral::SpectralField& u, const std::string& path) {
    json header;
    header["kmax"] = u.kmax;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_field: cannot open " + path);
    out << header.dump() << '\n';
    for (const auto& c : u.coeffs) {
        const double re = c.real(), im = c.imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof(double));
        out.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
}

spectral::SpectralField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_field: cannot open " + path);
    std::string line;
    std::getline(in, line);
    const auto header = json::parse(line);
    spectral::SpectralField u(header.at("kmax").get<int>());
    for (auto& c : u.coeffs) {
        double re = 0, im = 0;
        in.read(reinterpret_cast<char*>(&re), sizeof(double));
        in.read(reinterpret_cast<char*>(&im), sizeof(double));
        c = {re, im};
    }
    if (!in) throw std::runtime_error("load_field: truncated " + path);
    return u;
}

// ---------------------------------------------------------------------------
// experiments
// ---------------------------------------------------------------------------
namespace {

using dynamics::FlowConfig;
using dynamics::Scheme;
using gibbs::Sign;
using spectral::SpectralField;

double pget(const json& p, const char* key, double dflt) {
    return p.contains(key) ? p.at(key).get<double>() : dflt;
}
std::int64_t pgeti(const json& p, const char* key, std::int64_t dflt) {
    return p.contains(key) ? p.at(key).get<std::int64_t>() : dflt;
}
std::string pgets(const json& p, const char* key, const std::string& dflt) {
    return p.contains(key) ? p.at(key).get<std::string>() : dflt;
}
bool pgetb(const json& p, const char* key, bool dflt) {
    return p.contains(key) ? p.at(key).get<bool>() : dflt;
}

Sign sign_of(const json& p) {
    const auto s = pgets(p, "sign", "defocusing");
    if (s == "defocusing") return Sign::defocusing;
    if (s == "focusing") return Sign::focusing;
    throw std::invalid_argument("sign must be defocusing|focusing");
}

Scheme scheme_of(const json& p) {
    const auto s = pgets(p, "scheme", "rk4");
    if (s == "rk4") return Scheme::rk4;
    if (s == "rk4_full") return Scheme::rk4_full;
    if (s == "strang_split") return Scheme::strang_split;
    throw std::invalid_argument("scheme must be rk4|rk4_full|strang_split");
}

ExperimentRecord run_sample(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    const spectral::Dispersion d(pget(p, "alpha", 1.5));
    const double N = pget(p, "N", 16.0);
    const auto count = static_cast<std::size_t>(pgeti(p, "count", 1000));
    const Sign sign = sign_of(p);
    std::optional<double> K;
    if (p.contains("K")) K = p.at("K").get<double>();
    const auto ens = gibbs::build_ensemble(d, N, sign, K, cfg.seed, count,
                                           cfg.threads, pgetb(p, "gibbs_weights", true));
    if (p.contains("file"))
        gibbs::save_ensemble(ens, cfg.output_dir + "/" + p.at("file").get<std::string>());

    ExperimentRecord rec;
    rec.columns = {"k", "empirical_var", "expected_var", "rel_err"};
    const int km = ens.samples.front().kmax;
    for (int k = -km; k <= km; ++k) {
        double v = 0.0;
        for (const auto& s : ens.samples) v += std::norm(s.at(k));
        v /= static_cast<double>(count);
        const double expect = gibbs::mode_variance(k, d);
        rec.rows.push_back({fmt(k), fmt(v), fmt(expect), fmt(v / expect - 1.0)});
    }
    return rec;
}

ExperimentRecord run_evolve(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    FlowConfig fc;
    fc.alpha = pget(p, "alpha", 1.5);
    fc.N = pget(p, "N", 8.0);
    fc.dt = pget(p, "dt", 1e-3);
    fc.t_final = pget(p, "t_final", 1.0);
    fc.scheme = scheme_of(p);
    fc.sign = sign_of(p);
    fc.diag_stride = static_cast<int>(pgeti(p, "diag_stride", 1));
    fc.nonlinearity_enabled = pgetb(p, "nonlinearity_enabled", true);
    fc.renormalize = pgetb(p, "renormalize", true);

    const spectral::Dispersion d(fc.alpha);
    Rng rng(cfg.seed);
    SpectralField u0 = p.contains("data_file")
                           ? load_field(p.at("data_file").get<std::string>())
                           : gibbs::sample_gff(d, fc.N, rng);

    const int snap_stride = static_cast<int>(pgeti(p, "snapshot_stride", 0));
    long long step = 0;
    dynamics::StepObserver obs;
    if (snap_stride > 0)
        obs = [&](double t, const SpectralField& z) {
            if (step % snap_stride == 0) {
                char name[64];
                std::snprintf(name, sizeof(name), "/snapshot_%08lld.bin", step);
                save_field(z, cfg.output_dir + name);
                (void)t;
            }
            ++step;
        };
    const auto [uT, diag] = dynamics::evolve(u0, fc, obs);
    (void)uT;
    ExperimentRecord rec;
    rec.columns = {"time", "mass", "hamiltonian"};
    for (std::size_t i = 0; i < diag.times.size(); ++i)
        rec.rows.push_back({fmt(diag.times[i]), fmt(diag.mass_series[i]),
                            fmt(diag.hamiltonian_series[i])});
    return rec;
}

struct InvarianceObs {
    const char* name;
    std::function<double(const SpectralField&, const spectral::Dispersion&, Sign)> eval;
};

const std::vector<InvarianceObs>& invariance_observables() {
    static const std::vector<InvarianceObs> obs = {
        {"mass", [](const SpectralField& u, const spectral::Dispersion&, Sign) {
             return dynamics::mass(u);
         }},
        {"quartic", [](const SpectralField& u, const spectral::Dispersion&, Sign) {
             return spectral::quartic_integral(u);
         }},
        {"hamiltonian", [](const SpectralField& u, const spectral::Dispersion& d, Sign s) {
             return dynamics::hamiltonian(u, s, d);
         }},
        {"re_u0", [](const SpectralField& u, const spectral::Dispersion&, Sign) {
             return u.at(0).real();
         }},
        {"re_u1", [](const SpectralField& u, const spectral::Dispersion&, Sign) {
             return u.at(1).real();
         }},
        {"re_u2", [](const SpectralField& u, const spectral::Dispersion&, Sign) {
             return u.at(2).real();
         }},
        {"re_u4", [](const SpectralField& u, const spectral::Dispersion&, Sign) {
             return u.at(4).real();
         }},
        {"abs2_u0", [](const SpectralField& u, const spectral::Dispersion&, Sign) {
             return std::norm(u.at(0));
         }},
        {"abs2_u1", [](const SpectralField& u, const spectral::Dispersion&, Sign) {
             return std::norm(u.at(1));
         }},
        {"abs2_u2", [](const SpectralField& u, const spectral::Dispersion&, Sign) {
             return std::norm(u.at(2));
         }},
        {"abs2_u4", [](const SpectralField& u, const spectral::Dispersion&, Sign) {
             return std::norm(u.at(4));
         }},
    };
    return obs;
}

ExperimentRecord run_invariance(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    const double alpha = pget(p, "alpha", 1.5);
    const double N = pget(p, "N", 32.0);
    if (N > 64.0) throw std::invalid_argument("invariance: N <= 64 guard");
    const auto count = static_cast<std::size_t>(pgeti(p, "count", 10000));
    const double t = pget(p, "t", 1.0);
    const double dt = pget(p, "dt", 1e-3);
    const Sign sign = sign_of(p);
    std::optional<double> K;
    if (p.contains("K")) K = p.at("K").get<double>();
    if (sign == Sign::focusing && !K)
        throw std::invalid_argument("invariance: focusing needs K");
    const bool gibbs_weights = pgets(p, "weights", "gibbs") == "gibbs";
    const bool nl_on = pgetb(p, "nonlinearity_enabled", true);
    const bool half_dt_pass = pgetb(p, "check_half_dt", true);

    const spectral::Dispersion d(alpha);
    const auto& observables = invariance_observables();
    const std::size_t nobs = observables.size();

    ExperimentRecord rec;
    rec.columns = {"dt",   "observable", "mean_t0", "mean_t1",
                   "diff", "stderr",     "z",       "blowups"};

    std::vector<double> dts = {dt};
    if (half_dt_pass && t != 0.0) dts.push_back(dt / 2.0);
    for (double pass_dt : dts) {
        std::vector<double> lw(count, 0.0);
        std::vector<std::vector<double>> v0(nobs, std::vector<double>(count)),
            v1(nobs, std::vector<double>(count));
        std::vector<std::uint8_t> blew(count, 0);

        const std::size_t chunk = 64;
        const std::size_t nchunks = (count + chunk - 1) / chunk;
        parallel_for(nchunks, cfg.threads, [&](std::size_t ci) {
            const std::size_t lo = ci * chunk, hi = std::min(count, lo + chunk);
            std::vector<SpectralField> fields(hi - lo);
            for (std::size_t i = lo; i < hi; ++i) {
                Rng rng(derive_seed(cfg.seed, i));
                fields[i - lo] = gibbs::sample_gff(d, N, rng);
                lw[i] = gibbs_weights ? gibbs::gibbs_log_weight(fields[i - lo], sign, K)
                                      : 0.0;
                for (std::size_t o = 0; o < nobs; ++o)
                    v0[o][i] = observables[o].eval(fields[i - lo], d, sign);
            }
            FlowConfig fc;
            fc.alpha = alpha;
            fc.N = N;
            fc.dt = pass_dt;
            fc.t_final = t;
            fc.scheme = Scheme::rk4;
            fc.sign = sign;
            fc.nonlinearity_enabled = nl_on;
            fc.diag_stride = 0;
            // evolve in lanes of 4; a blow-up marks the whole lane group
            for (std::size_t g = lo; g < hi; g += 4) {
                const std::size_t ge = std::min(hi, g + 4);
                std::vector<SpectralField> group(fields.begin() + (g - lo),
                                                 fields.begin() + (ge - lo));
                try {
                    auto evolved = t == 0.0 ? group : dynamics::evolve_batch(group, fc);
                    for (std::size_t i = g; i < ge; ++i)
                        for (std::size_t o = 0; o < nobs; ++o)
                            v1[o][i] = observables[o].eval(evolved[i - g], d, sign);
                } catch (const dynamics::BlowupError&) {
                    for (std::size_t i = g; i < ge; ++i) {
                        blew[i] = 1;
                        lw[i] = -std::numeric_limits<double>::infinity();
                        for (std::size_t o = 0; o < nobs; ++o) v1[o][i] = 0.0;
                    }
                }
            }
        });

        std::size_t blowups = 0;
        for (auto b : blew) blowups += b;
        for (std::size_t o = 0; o < nobs; ++o) {
            const auto m0 = gibbs::weighted_expectation(lw, v0[o]);
            const auto m1 = gibbs::weighted_expectation(lw, v1[o]);
            // z against the combined standard error of the two ensemble means
            const double se = std::sqrt(m0.stderr_ * m0.stderr_ +
                                        m1.stderr_ * m1.stderr_);
            const double diff = m1.mean - m0.mean;
            const double z = se > 0.0 ? std::abs(diff) / se : 0.0;
            rec.rows.push_back({fmt(pass_dt), observables[o].name, fmt(m0.mean),
                                fmt(m1.mean), fmt(diff), fmt(se), fmt(z),
                                std::to_string(blowups)});
        }
    }
    return rec;
}

ExperimentRecord run_picard_scaling(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    std::vector<double> alphas = {2.0, 1.5, 1.0};
    if (p.contains("alphas")) alphas = p.at("alphas").get<std::vector<double>>();
    std::vector<int> Ns = {64, 128, 256, 512, 1024, 2048};
    if (p.contains("Ns")) Ns = p.at("Ns").get<std::vector<int>>();
    const double delta = pget(p, "delta", 0.4);
    const double t = pget(p, "t", 0.1);
    const auto mc_draws = static_cast<std::size_t>(pgeti(p, "mc_draws", 0));
    const int mc_max_N = static_cast<int>(pgeti(p, "mc_max_N", 64));
    const auto band = pgets(p, "band", "both");
    if (band != "both" && band != "positive")
        throw std::invalid_argument("picard-scaling: band must be both|positive");
    const auto signs = band == "both" ? picard::BandSigns::both
                                      : picard::BandSigns::positive;

    const auto recs = picard::scaling_study(alphas, Ns, delta, t, cfg.seed, mc_draws,
                                            mc_max_N, cfg.threads, signs);
    ExperimentRecord rec;
    rec.columns = {"alpha",     "N",        "wick_norm",    "mc_norm",
                   "mc_stderr", "slope_so_far", "ratio_log3"};
    for (const auto& r : recs)
        rec.rows.push_back({fmt(r.alpha), std::to_string(r.N), fmt(r.wick_norm),
                            fmt(r.mc_norm), fmt(r.mc_stderr), fmt(r.slope_so_far),
                            fmt(r.ratio_log3)});
    return rec;
}

// The Gamma-condition sweeps run with halved caps so the condition
// |k_max| <= Gamma < |k| is satisfiable, and default to the window m = -2
// where those sets are populated (Phi < 0 whenever |k| > |k_j| for all j).
std::vector<counting::CountingQuery> audit_sweep(const json& p, bool gamma_sweep) {
    std::vector<int> Ns = {32, 64, 128, 256};
    if (p.contains("Ns")) Ns = p.at("Ns").get<std::vector<int>>();
    std::vector<counting::CountingQuery> sweep;
    for (int N : Ns) {
        counting::CountingQuery q;
        q.N = N;
        const int cap = gamma_sweep ? std::max(1, N / 2) : N;
        q.N1 = q.N2 = q.N3 = cap;
        q.m = pgeti(p, "m", gamma_sweep ? -2 : 0);
        q.bad_c = pget(p, "bad_c", 0.125);
        sweep.push_back(q);
    }
    return sweep;
}

ExperimentRecord run_counting_audit(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    const double alpha = pget(p, "alpha", 1.5);
    std::vector<std::string> lemmas = {"counting1", "cor_counting", "counting2",
                                       "cor_bad", "S", "gamma"};
    if (p.contains("lemmas")) lemmas = p.at("lemmas").get<std::vector<std::string>>();
    ExperimentRecord rec;
    rec.columns = {"lemma_id", "alpha", "N", "N1", "N2", "N3", "count", "bound", "ratio"};
    for (const auto& id : lemmas) {
        const auto sweep = audit_sweep(p, id == "gamma");
        const auto rep = counting::lemma_audit(id, alpha, sweep);
        for (const auto& r : rep.rows)
            rec.rows.push_back({r.lemma_id, fmt(r.alpha), std::to_string(r.N),
                                std::to_string(r.N1), std::to_string(r.N2),
                                std::to_string(r.N3), fmt(r.count), fmt(r.bound),
                                fmt(r.ratio)});
    }
    return rec;
}

ExperimentRecord run_tensor_audit(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    const double alpha = pget(p, "alpha", 1.5);
    std::vector<std::string> lemmas = {"tensor2", "tensor3", "tensor4", "gammaT"};
    if (p.contains("lemmas")) lemmas = p.at("lemmas").get<std::vector<std::string>>();
    ExperimentRecord rec;
    rec.columns = {"lemma_id", "alpha", "N", "N1", "N2", "N3", "count", "bound", "ratio"};
    for (const auto& id : lemmas) {
        const auto sweep = audit_sweep(p, id == "gammaT");
        const auto rep = tensor::tensor_lemma_audit(id, alpha, sweep);
        for (const auto& r : rep.rows)
            rec.rows.push_back({r.lemma_id, fmt(r.alpha), std::to_string(r.N),
                                std::to_string(r.N1), std::to_string(r.N2),
                                std::to_string(r.N3), fmt(r.count), fmt(r.bound),
                                fmt(r.ratio)});
    }
    return rec;
}

ExperimentRecord run_rao_audit(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    const double alpha = pget(p, "alpha", 1.5);
    const double N = pget(p, "N", 16.0);
    const double L = pget(p, "L", 4.0);
    const double dt = pget(p, "dt", 1e-3);
    const double t = pget(p, "t", 0.1);
    const double kappa = pget(p, "kappa", 2.0);

    const spectral::Dispersion d(alpha);
    Rng rng(cfg.seed);
    const auto data = gibbs::sample_gff(d, L, rng);
    const auto traj = rao::low_freq_trajectory(L, alpha, dt, t, data);
    const auto H = rao::evolve_kernel(N, L, alpha, traj, dt, t);
    const auto traj2 = rao::low_freq_trajectory(L, alpha, dt / 2.0, t, data);
    const auto H2 = rao::evolve_kernel(N, L, alpha, traj2, dt / 2.0, t);
    const double def1 = rao::unitarity_defect(H);
    const double def2 = rao::unitarity_defect(H2);

    const auto trajL2 = rao::low_freq_trajectory(L / 2.0, alpha, dt, t,
                                                 spectral::project(data, L / 2.0));
    const auto HL2 = rao::evolve_kernel(N, L / 2.0, alpha, trajL2, dt, t);
    const auto h = rao::kernel_difference(H, HL2);
    const auto prof = rao::kernel_decay_profile(h, L, kappa);

    ExperimentRecord rec;
    rec.columns = {"quantity", "value"};
    rec.rows.push_back({"unitarity_defect_dt", fmt(def1)});
    rec.rows.push_back({"unitarity_defect_dt_half", fmt(def2)});
    rec.rows.push_back({"defect_ratio", fmt(def2 > 0 ? def1 / def2 : 0.0)});
    rec.rows.push_back({"decay_weighted_frobenius_sq", fmt(prof.weighted_frobenius_sq)});
    for (const auto& [C, frac] : prof.band_fractions)
        rec.rows.push_back({"decay_fraction_C" + std::to_string(C), fmt(frac)});
    double max_cancel = 0.0;
    for (int k1 = -H.kmax; k1 <= H.kmax; k1 += std::max(1, H.kmax / 2))
        for (int k2 = -H.kmax; k2 <= H.kmax; k2 += std::max(1, H.kmax / 2))
            if (k1 != k2)
                max_cancel = std::max(max_cancel,
                                      std::abs(rao::cancellation_product(H, k1, k2)));
    rec.rows.push_back({"max_offdiag_cancellation", fmt(max_cancel)});
    return rec;
}

ExperimentRecord run_one(const ExperimentConfig& cfg);

ExperimentRecord run_sweep(const ExperimentConfig& cfg) {
    const auto& p = cfg.params;
    if (!p.contains("grid") || !p.at("grid").is_array() || p.at("grid").empty())
        throw std::invalid_argument("sweep: nonempty params.grid required");
    const auto& grid = p.at("grid");
    const std::string inner = pgets(p, "experiment", "evolve");
    const json base = p.contains("base") ? p.at("base") : json::object();

    struct Cell {
        std::vector<std::vector<std::string>> rows;
        std::string status = "ok";
        std::vector<std::string> columns;
    };
    std::vector<Cell> cells(grid.size());
    parallel_for(grid.size(), cfg.threads, [&](std::size_t i) {
        ExperimentConfig sub;
        sub.experiment = inner;
        sub.seed = derive_seed(cfg.seed, i);
        sub.threads = 1;
        sub.output_dir = cfg.output_dir;
        sub.params = base;
        for (const auto& [key, val] : grid[i].items()) sub.params[key] = val;
        try {
            auto rec = run_one(sub);
            cells[i].rows = std::move(rec.rows);
            cells[i].columns = std::move(rec.columns);
        } catch (const std::exception& e) {
            cells[i].status = std::string("error: ") + e.what();
        }
    });
    ExperimentRecord rec;
    rec.columns = {"cell", "status"};
    std::size_t extra = 0;
    for (const auto& c : cells)
        if (!c.columns.empty()) {
            for (const auto& col : c.columns) rec.columns.push_back(col);
            extra = c.columns.size();
            break;
        }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].rows.empty()) {
            std::vector<std::string> row = {std::to_string(i), cells[i].status};
            row.resize(2 + extra, "");
            rec.rows.push_back(row);
            continue;
        }
        for (const auto& r : cells[i].rows) {
            std::vector<std::string> row = {std::to_string(i), cells[i].status};
            row.insert(row.end(), r.begin(), r.end());
            rec.rows.push_back(row);
        }
    }
    return rec;
}

ExperimentRecord run_one(const ExperimentConfig& cfg) {
    if (cfg.experiment == "sample") return run_sample(cfg);
    if (cfg.experiment == "evolve") return run_evolve(cfg);
    if (cfg.experiment == "invariance") return run_invariance(cfg);
    if (cfg.experiment == "picard-scaling") return run_picard_scaling(cfg);
    if (cfg.experiment == "counting-audit") return run_counting_audit(cfg);
    if (cfg.experiment == "tensor-audit") return run_tensor_audit(cfg);
    if (cfg.experiment == "rao-audit") return run_rao_audit(cfg);
    if (cfg.experiment == "sweep") return run_sweep(cfg);
    throw std::invalid_argument("unknown experiment: " + cfg.experiment);
}

}  // namespace

ExperimentRecord run_experiment(const ExperimentConfig& cfg) {
    auto rec = run_one(cfg);
    rec.config_digest = config_digest(cfg);
    rec.version = kVersion;
    const auto now = std::chrono::system_clock::now();
    rec.timestamp = std::to_string(
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
    return rec;
}

}  // namespace fnlslab::harness
