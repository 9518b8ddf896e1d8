// harness.hpp — experiment registry, configuration, persistence.
//
// Every experiment is a pure function of (experiment name, params, seed):
// rows are generated deterministically, parallel work is seeded per index,
// and reruns at any thread count emit byte-identical rows.  The config
// digest (FNV-1a over the canonical JSON dump) is stamped on every row.
//
// Experiments: sample, evolve, invariance, picard-scaling, counting-audit,
// tensor-audit, rao-audit, plus the generic sweep driver.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "fnlslab/spectral.hpp"

namespace fnlslab::harness {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string output_dir = ".";
    nlohmann::json params = nlohmann::json::object();

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
};

struct ExperimentRecord {
    std::string config_digest;
    std::string version = kVersion;
    std::string timestamp;  // never part of the row payload
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

std::uint64_t fnv1a64(const std::string& s);
std::string config_digest(const ExperimentConfig& cfg);

// Fixed-format float -> string used in all rows ("%.17g").
std::string fmt(double v);

ExperimentRecord run_experiment(const ExperimentConfig& cfg);

// CSV: header line, then one line per row with the digest as first column.
void write_csv(const ExperimentRecord& rec, const std::string& path);
// JSON lines: meta object (with timestamp), then one object per row.
void write_jsonl(const ExperimentRecord& rec, const std::string& path);

// Single spectral field <-> file (JSON header + raw little-endian doubles).
void save_field(const spectral::SpectralField& u, const std::string& path);
spectral::SpectralField load_field(const std::string& path);

}  // namespace fnlslab::harness
