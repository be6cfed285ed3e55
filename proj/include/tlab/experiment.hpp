#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tlab/report.hpp"

namespace tlab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SuiteOutput {
    json report;  // suite-specific body; run_suite wraps it
    std::vector<std::pair<std::string, CsvTable>> csv;
    bool pass = true;
};

const std::vector<std::string>& suite_names();
bool is_known_suite(const std::string& name);
json suite_defaults(const std::string& name);
// merges overrides into the defaults; rejects unknown keys and out-of-range values
json resolve_params(const std::string& name, const json& overrides);
SuiteOutput run_suite(const std::string& name, const json& params, std::uint64_t seed);

struct ExperimentConfig {
    std::vector<std::string> suites;
    std::uint64_t seed = 20240611;
    std::string out_dir = "tlab_out";
    json params = json::object();  // suite name -> overrides

    // {"suite": name | [names] | "all", "seed": u64, "out": dir, "params": {suite: {...}}}
    static ExperimentConfig from_json(const json& j);
};

std::string usage_text();

// 0: every verdict passed, 1: a verdict failed, 2: usage or configuration error
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace tlab
