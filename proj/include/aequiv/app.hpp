#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace aeq::app {

// Fully resolved run configuration. Every key the command understands is
// present in `values`, defaults included. For bound, transform and rates a
// comma in a value makes that key an axis of the parameter grid; for verify
// commas separate list entries.
struct ExperimentConfig {
    std::string command;
    std::map<std::string, std::string> values;
    std::uint64_t seed = 42;
    std::optional<std::size_t> reps;
    unsigned threads = 1;
    std::string out_dir = "out";
};

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<unsigned> threads;
    std::optional<std::string> out_dir;
    std::vector<std::pair<std::string, std::string>> set;
};

// Parses "key = value" lines ('#' starts a comment). Throws Validation
// naming the offending line or key.
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);

// Merges defaults, file entries and overrides, then validates every grid point.
ExperimentConfig resolve_config(const std::string& command, const std::string& config_text,
                                const CliOverrides& overrides = {});

// Cartesian product of the comma-separated values, last key varying fastest.
std::vector<std::map<std::string, std::string>> expand_grid(const ExperimentConfig& config);

struct RunOutput {
    std::string csv;
    nlohmann::json json;
    std::string table;
    int exit_code = 0;
};

RunOutput run_bound(const ExperimentConfig& config);
RunOutput run_transform(const ExperimentConfig& config);
RunOutput run_verify(const ExperimentConfig& config);
RunOutput run_rates(const ExperimentConfig& config);
RunOutput run(const ExperimentConfig& config);

nlohmann::json manifest(const ExperimentConfig& config);
// results.csv, results.json and manifest.json under config.out_dir.
void write_outputs(const ExperimentConfig& config, const RunOutput& output);

}  // namespace aeq::app
