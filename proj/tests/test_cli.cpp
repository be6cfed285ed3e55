#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tlab/experiment.hpp"

namespace fs = std::filesystem;
using namespace tlab;

namespace {

std::string cli() {
    const char* p = std::getenv("TLAB_CLI");
    return p ? p : "";
}

fs::path scratch(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("tlab_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

int run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
    const int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const char* kSmallWeyl = R"({"suite": "weyl", "seed": 5,
  "params": {"weyl": {"finite_sizes": [2, 64], "line_points": 64, "ccr_sizes": [64, 128], "no_go_dims": [4]}}})";

}  // namespace

TEST_CASE("configuration parsing") {
    const ExperimentConfig all = ExperimentConfig::from_json(json::parse(R"({"suite": "all", "seed": 9})"));
    // expanded when the experiment runs
    CHECK(all.suites == std::vector<std::string>{"all"});
    CHECK(all.seed == 9);
    const ExperimentConfig two = ExperimentConfig::from_json(json::parse(R"({"suite": ["weyl", "invsub"], "out": "x"})"));
    CHECK(two.suites.size() == 2);
    CHECK(two.out_dir == "x");
    CHECK(suite_names().size() == 7);
    CHECK(is_known_suite("equivalence_chain"));
    CHECK_FALSE(is_known_suite("bogus"));

    CHECK_THROWS_AS(ExperimentConfig::from_json(json::parse(R"({"colour": 1})")), ConfigError);
    CHECK_THROWS_AS(resolve_params("weyl", json::parse(R"({"no_such_key": 1})")), ConfigError);
    CHECK_THROWS_AS(resolve_params("weyl", json::parse(R"({"wwr_tol": 2.0})")), ConfigError);
    CHECK_THROWS_AS(resolve_params("weyl", json::parse(R"({"line_points": -4})")), ConfigError);
    CHECK_THROWS_AS(resolve_params("bogus", json::object()), ConfigError);
    const json p = resolve_params("weyl", json::parse(R"({"line_points": 64})"));
    CHECK(p["line_points"] == 64);
    CHECK(p["wwr_tol"] == suite_defaults("weyl")["wwr_tol"]);
}

TEST_CASE("in-process run writes a versioned report with tolerances") {
    const fs::path out = scratch("inproc");
    ExperimentConfig cfg = ExperimentConfig::from_json(json::parse(kSmallWeyl));
    cfg.out_dir = out.string();
    std::ostringstream log;
    CHECK(run_experiment(cfg, log) == 0);
    const json r = json::parse(slurp(out / "weyl.json"));
    CHECK(r["schema"] == 1);
    CHECK(r["seed"] == 5);
    CHECK(r["inputs"]["line_points"] == 64);
    CHECK(r["verdict"] == "pass");
    for (const auto& [name, c] : r["report"]["checks"].items()) {
        INFO(name);
        CHECK(c.contains("pass"));
        if (c["rule"] != "holds") CHECK(c.contains("tol"));
    }
    // CSV files carry a header row
    const std::string csv = slurp(out / "weyl_ccr.csv");
    CHECK(csv.rfind("N,h,residual\n", 0) == 0);
    // 17 significant digits
    CHECK(slurp(out / "weyl.json").find("9.9999999999999998e-13") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("command line") {
    REQUIRE_MESSAGE(!cli().empty(), "TLAB_CLI is not set");
    SUBCASE("weyl suite exits 0 and writes its report") {
        const fs::path out = scratch("weyl");
        CHECK(run("--suite weyl --out " + out.string()) == 0);
        CHECK(fs::exists(out / "weyl.json"));
        fs::remove_all(out);
    }
    SUBCASE("unknown suite: usage error, nothing written") {
        const fs::path out = scratch("bogus");
        CHECK(run("--suite bogus --out " + out.string()) == 2);
        CHECK_FALSE(fs::exists(out));
        CHECK(run("--frobnicate") == 2);
    }
    SUBCASE("config file, rerun is byte identical") {
        const fs::path dir = scratch("cfg");
        fs::create_directories(dir);
        const fs::path cfg = dir / "cfg.json";
        std::ofstream(cfg) << kSmallWeyl;
        CHECK(run("--config " + cfg.string() + " --out " + (dir / "a").string()) == 0);
        CHECK(run("--config " + cfg.string() + " --out " + (dir / "b").string()) == 0);
        const std::string a = slurp(dir / "a" / "weyl.json");
        CHECK(!a.empty());
        CHECK(a == slurp(dir / "b" / "weyl.json"));
        // the seed flag overrides the file
        CHECK(run("--config " + cfg.string() + " --seed 6 --out " + (dir / "c").string()) == 0);
        CHECK(json::parse(slurp(dir / "c" / "weyl.json"))["seed"] == 6);
        fs::remove_all(dir);
    }
    SUBCASE("bad configuration and unwritable output") {
        const fs::path dir = scratch("bad");
        fs::create_directories(dir);
        std::ofstream(dir / "broken.json") << "{ not json";
        CHECK(run("--config " + (dir / "broken.json").string()) == 2);
        CHECK(run("--config " + (dir / "missing.json").string()) == 2);
        std::ofstream(dir / "file") << "x";
        CHECK(run("--suite weyl --out " + (dir / "file" / "sub").string()) != 0);
        fs::remove_all(dir);
    }
    SUBCASE("failing verdict exits 1") {
        const fs::path dir = scratch("fail");
        fs::create_directories(dir);
        // a tolerance below rounding level
        std::ofstream(dir / "cfg.json") << R"({"suite": "weyl", "params": {"weyl": {"wr_tol": 1e-300}}})";
        const int code = run("--config " + (dir / "cfg.json").string() + " --out " + (dir / "o").string());
        CHECK(code == 1);
        fs::remove_all(dir);
    }
}
