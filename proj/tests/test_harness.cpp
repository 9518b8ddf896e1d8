#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fnlslab/harness.hpp"
#include "fnlslab/rng.hpp"

using namespace fnlslab::harness;

namespace {

std::string rows_as_text(const ExperimentRecord& rec) {
    std::ostringstream out;
    for (const auto& row : rec.rows) {
        for (const auto& v : row) out << v << ',';
        out << '\n';
    }
    return out.str();
}

ExperimentConfig base_invariance(int threads) {
    ExperimentConfig cfg;
    cfg.experiment = "invariance";
    cfg.seed = 424242;
    cfg.threads = threads;
    cfg.params = {{"alpha", 1.5}, {"N", 8.0},   {"count", 96},
                  {"t", 0.05},    {"dt", 0.01}, {"check_half_dt", false}};
    return cfg;
}

}  // namespace

TEST_CASE("config digest and formatting") {
    ExperimentConfig a, b;
    a.experiment = b.experiment = "evolve";
    a.seed = b.seed = 5;
    a.params = {{"alpha", 1.5}};
    b.params = {{"alpha", 1.5}};
    b.threads = 16;  // threads do not affect the digest
    CHECK(config_digest(a) == config_digest(b));
    b.params["alpha"] = 2.0;
    CHECK(config_digest(a) != config_digest(b));
    CHECK(fmt(0.1) == "0.10000000000000001");
}

TEST_CASE("thread count does not change emitted rows") {
    const auto r1 = run_experiment(base_invariance(1));
    const auto r8 = run_experiment(base_invariance(8));
    CHECK(r1.config_digest == r8.config_digest);
    CHECK(rows_as_text(r1) == rows_as_text(r8));
}

TEST_CASE("invariance at t = 0 gives exactly zero z-scores") {
    ExperimentConfig cfg = base_invariance(1);
    cfg.params["t"] = 0.0;
    const auto rec = run_experiment(cfg);
    REQUIRE(!rec.rows.empty());
    for (const auto& row : rec.rows) CHECK(row[6] == "0");
}

TEST_CASE("linear-only flow with flat weights stays invariant") {
    ExperimentConfig cfg = base_invariance(1);
    cfg.params["count"] = 4000;
    cfg.params["t"] = 0.5;
    cfg.params["weights"] = "gff";
    cfg.params["nonlinearity_enabled"] = false;
    const auto rec = run_experiment(cfg);
    for (const auto& row : rec.rows) CHECK(std::stod(row[6]) <= 3.0);
}

TEST_CASE("invariance guards") {
    ExperimentConfig cfg = base_invariance(1);
    cfg.params["N"] = 128.0;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    ExperimentConfig foc = base_invariance(1);
    foc.params["sign"] = "focusing";  // no K
    CHECK_THROWS_AS(run_experiment(foc), std::invalid_argument);
}

TEST_CASE("sweep: determinism, order independence, per-cell failure") {
    ExperimentConfig cfg;
    cfg.experiment = "sweep";
    cfg.seed = 77;
    cfg.threads = 1;
    cfg.params["experiment"] = "evolve";
    cfg.params["base"] = {{"alpha", 1.5}, {"N", 4.0},          {"dt", 0.01},
                          {"t_final", 0.05}, {"diag_stride", 0}};
    cfg.params["grid"] = nlohmann::json::array(
        {{{"N", 4.0}}, {{"N", 6.0}}, {{"dt", -1.0}}, {{"N", 8.0}}});

    const auto r1 = run_experiment(cfg);
    cfg.threads = 8;
    const auto r8 = run_experiment(cfg);
    CHECK(rows_as_text(r1) == rows_as_text(r8));

    // the invalid cell is reported, others run
    bool saw_error = false, saw_ok = false;
    for (const auto& row : r1.rows) {
        if (row[1].rfind("error", 0) == 0) saw_error = true;
        if (row[1] == "ok") saw_ok = true;
    }
    CHECK(saw_error);
    CHECK(saw_ok);

    // a single cell equals the direct module call
    ExperimentConfig one;
    one.experiment = "evolve";
    one.seed = fnlslab::derive_seed(77, 0);
    one.threads = 1;
    one.params = cfg.params["base"];
    one.params["N"] = 4.0;
    const auto direct = run_experiment(one);
    // grid cell 0 rows (drop the cell/status prefix) match the direct run
    std::vector<std::vector<std::string>> cell0;
    for (const auto& row : r1.rows)
        if (row[0] == "0") cell0.emplace_back(row.begin() + 2, row.end());
    CHECK(cell0 == direct.rows);
}

TEST_CASE("csv and jsonl output") {
    ExperimentConfig cfg = base_invariance(1);
    cfg.params["count"] = 8;
    const auto rec = run_experiment(cfg);
    write_csv(rec, "harness_test.csv");
    write_jsonl(rec, "harness_test.jsonl");
    std::ifstream csv("harness_test.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header.rfind("config_digest,", 0) == 0);
    std::string first;
    std::getline(csv, first);
    CHECK(first.rfind(rec.config_digest + ",", 0) == 0);
    std::ifstream jl("harness_test.jsonl");
    std::string meta;
    std::getline(jl, meta);
    const auto j = nlohmann::json::parse(meta);
    CHECK(j.at("version").get<std::string>() == kVersion);
    std::remove("harness_test.csv");
    std::remove("harness_test.jsonl");
}

TEST_CASE("field save/load round trip") {
    fnlslab::spectral::SpectralField u(3);
    fnlslab::Rng rng(8);
    for (int k = -3; k <= 3; ++k) u.set(k, rng.gaussian_complex());
    save_field(u, "field_test.bin");
    const auto v = load_field("field_test.bin");
    std::remove("field_test.bin");
    REQUIRE(v.kmax == 3);
    for (int k = -3; k <= 3; ++k) CHECK(v.at(k) == u.at(k));
}

TEST_CASE("unknown experiment is a validation error") {
    ExperimentConfig cfg;
    cfg.experiment = "nope";
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}
