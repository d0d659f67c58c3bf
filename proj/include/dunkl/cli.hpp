#pragma once

// Experiment runner: flat typed config files, deterministic seeded runs of
// the eight experiment suites, report/table/plot-data emission, and the
// golden-constant regression protocol.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dunkl {

/// Raised for malformed configs or inadmissible parameters; the message
/// names the offending key or the violated inequality. Maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat typed experiment configuration. Every key is `name = value` on its
/// own line; unknown keys are errors.
struct ExperimentConfig {
    // root system + grid
    int axes = 1;
    std::vector<double> multiplicities{1.0};
    double extent = 8.0;
    int resolution = 4;
    // t-grid
    double t_min = 0.015625;
    double t_max = 64.0;
    double t_rho = 1.189207115002721;
    // experiment selection + parameters
    std::string experiment;
    std::string symbol = "imagpow:1";
    double p = 1.0;
    int M = 2;
    double s = 0.0;      // 0 = default hom/p + 1
    double delta = 0.0;  // 0 = centered default
    double epsilon = 0.0;
    std::uint64_t seed = 1;
    int n_atoms = 50;
    int n_functions = 20;
    // artifacts
    std::string output_dir = ".";
    std::string golden_file;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Hash of the canonicalized config (grid + experiment parameters; artifact
/// paths excluded), used to pin golden files to the producing configuration.
std::string config_hash(const ExperimentConfig& cfg);

struct CheckRecord {
    std::string name;
    double measured = 0.0;
    double budget = 0.0;  // 0 = golden-valued measurement, no fixed budget
    double margin = 0.0;  // (budget - measured) / budget where applicable
    std::string status;   // PASS / FAIL / TRUNCATED / EXPLORATORY
};

struct RunReport {
    std::string config_hash;
    std::string experiment;
    std::vector<CheckRecord> checks;
    double wall_seconds = 0.0;  // emitted to timings.json, not report.json

    bool all_pass() const;
};

struct RunOptions {
    std::string plan_cache;  // empty: DUNKL_PLAN_CACHE env, else no cache
    int threads = 0;         // 0 = library default
    std::uint64_t seed = 0;  // 0 = config seed
};

/// Executes the configured experiment and writes report.json, tables.csv,
/// timings.json and experiment-specific plot-data/JSON artifacts under
/// cfg.output_dir. Throws ConfigError for inadmissible parameters.
RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// report.json bytes for a report (sorted keys, bitwise deterministic).
std::string report_json(const RunReport& rep);

struct GoldenResult {
    bool ok = false;
    bool hash_mismatch = false;
    std::vector<std::string> offending_keys;
};

/// `update`: freeze the report's measured constants + config hash into the
/// golden file. `check`: compare each constant at 2x slack; a config-hash
/// mismatch is a refusal, never a comparison.
void golden_update(const RunReport& rep, const std::string& golden_path);
GoldenResult golden_check(const RunReport& rep, const std::string& golden_path);

/// Parse a report.json written by run_experiment.
RunReport read_report(const std::string& path);

/// Full CLI entry point (exit codes: 0 pass, 2 config, 3 numeric, 4 golden).
int cli_main(int argc, const char* const* argv);

} // namespace dunkl
