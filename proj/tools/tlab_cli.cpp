#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "tlab/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"batch runner for the operator lab suites"};
    std::string config_path, suite, out;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--suite", suite, "suite name, overrides the configuration");
    app.add_option("--out", out, "output directory, overrides the configuration");
    auto* seed_opt = app.add_option("--seed", seed, "random seed, overrides the configuration");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        std::cerr << tlab::usage_text();
        return 2;
    }

    tlab::json j = tlab::json::object();
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) {
            std::cerr << "error: cannot read " << config_path << "\n" << tlab::usage_text();
            return 2;
        }
        try {
            j = tlab::json::parse(f);
        } catch (const tlab::json::exception& e) {
            std::cerr << "error: " << e.what() << "\n" << tlab::usage_text();
            return 2;
        }
    }
    tlab::ExperimentConfig cfg;
    try {
        cfg = tlab::ExperimentConfig::from_json(j);
    } catch (const tlab::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n" << tlab::usage_text();
        return 2;
    }
    if (!suite.empty()) cfg.suites = {suite};
    if (!out.empty()) cfg.out_dir = out;
    if (*seed_opt) cfg.seed = seed;
    return tlab::run_experiment(cfg, std::cout);
}
