#include "tlab/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tlab/opcore.hpp"

namespace tlab {

namespace fs = std::filesystem;

std::string usage_text() {
    std::ostringstream os;
    os << "usage: tlab_cli [--config <path>] [--suite <name>] [--out <dir>] [--seed <u64>]\n"
       << "suites:";
    for (const auto& n : suite_names()) os << ' ' << n;
    os << " all\n";
    return os.str();
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "suite" && it.key() != "seed" && it.key() != "out" && it.key() != "params" &&
            it.key() != "schema")
            throw ConfigError("unknown configuration key: " + it.key());
    ExperimentConfig c;
    if (j.contains("suite")) {
        const json& s = j["suite"];
        if (s.is_string()) {
            c.suites = {s.get<std::string>()};
        } else if (s.is_array()) {
            for (const auto& x : s) {
                if (!x.is_string()) throw ConfigError("suite names must be strings");
                c.suites.push_back(x.get<std::string>());
            }
        } else {
            throw ConfigError("suite must be a name or a list of names");
        }
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError("seed must be an unsigned integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) throw ConfigError("out must be a path");
        c.out_dir = j["out"].get<std::string>();
    }
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw ConfigError("params must map suite names to objects");
        c.params = j["params"];
    }
    return c;
}

namespace {

std::vector<std::string> expand(const std::vector<std::string>& names) {
    std::vector<std::string> out;
    for (const auto& n : names) {
        if (n == "all") {
            out.insert(out.end(), suite_names().begin(), suite_names().end());
        } else {
            if (!is_known_suite(n)) throw ConfigError("unknown suite: " + n);
            out.push_back(n);
        }
    }
    if (out.empty()) throw ConfigError("no suite selected");
    return out;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << text;
    if (!f) throw ConfigError("cannot write " + p.string());
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
    std::vector<std::string> suites;
    std::vector<json> params;
    try {
        suites = expand(cfg.suites);
        for (auto it = cfg.params.begin(); it != cfg.params.end(); ++it)
            if (!is_known_suite(it.key())) throw ConfigError("params given for unknown suite: " + it.key());
        for (const auto& s : suites) params.push_back(resolve_params(s, cfg.params.contains(s) ? cfg.params[s] : json()));
        std::error_code ec;
        fs::create_directories(cfg.out_dir, ec);
        if (ec || !fs::is_directory(cfg.out_dir)) throw ConfigError("cannot create output directory " + cfg.out_dir);
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n" << usage_text();
        return 2;
    }

    bool all_pass = true;
    for (std::size_t i = 0; i < suites.size(); ++i) {
        const std::string& name = suites[i];
        json doc;
        doc["schema"] = 1;
        doc["suite"] = name;
        doc["seed"] = cfg.seed;
        doc["inputs"] = params[i];
        bool pass = false;
        SuiteOutput so;
        try {
            so = run_suite(name, params[i], cfg.seed);
            pass = so.pass;
            doc["report"] = so.report;
        } catch (const Error& e) {
            doc["error"] = e.what();
        } catch (const json::exception& e) {
            doc["error"] = e.what();
        }
        doc["verdict"] = pass ? "pass" : "fail";
        all_pass = all_pass && pass;
        try {
            write_file(fs::path(cfg.out_dir) / (name + ".json"), dump_json(doc) + "\n");
            for (const auto& [file, table] : so.csv) write_file(fs::path(cfg.out_dir) / file, table.to_string());
        } catch (const ConfigError& e) {
            log << "error: " << e.what() << "\n";
            return 2;
        }
        log << name << ": " << (pass ? "pass" : "fail") << "\n";
    }
    return all_pass ? 0 : 1;
}

}  // namespace tlab
