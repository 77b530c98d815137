#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fan/io.hpp"

// Integration tests against the built CLI binary (path via FAN_BIN).

namespace {

namespace fs = std::filesystem;

std::string fan_bin() {
    const char* p = std::getenv("FAN_BIN");
    REQUIRE_MESSAGE(p != nullptr, "FAN_BIN must point at the fan binary");
    return p;
}

int run(const std::string& args) {
    std::string cmd = fan_bin() + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string write_config(const fs::path& dir, const fan::Json& extra) {
    fan::Json j = {
        {"version", 1},
        {"output_dir", (dir / "out").string()},
        {"t0", 0.5},
        {"data",
         {{"source", "synthetic"},
          {"synthetic",
           {{"seed", 5}, {"n_groups", 2}, {"sizes", {300, 300}}, {"tau", {0.7, 0.4}}, {"score_noise", 0.9}}},
          {"split", {{"fractions", {0.8, 0.1, 0.1}}, {"seed", 3}}}}},
        {"baseline",
         {{"hidden_dims", {12, 6}},
          {"epochs", 30},
          {"batch_size", 32},
          {"learning_rate", 0.05},
          {"momentum", 0.9},
          {"seed", 9}}},
        {"surrogate",
         {{"mlp",
           {{"hidden_dims", {12, 6}},
            {"epochs", 30},
            {"batch_size", 32},
            {"learning_rate", 0.05},
            {"momentum", 0.9},
            {"seed", 10}}}}},
        {"constraints", {{"fairness", "EOd"}, {"eps", 0.05}, {"delta", 0.2}, {"eta", 0.0}}},
    };
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    std::string path = (dir / "config.json").string();
    fan::write_json_file(j, path);
    return path;
}

}  // namespace

TEST_CASE("pipeline emits every artifact and exits 0") {
    TempDir td("fan_cli_pipeline");
    std::string cfg = write_config(td.path, {});
    CHECK(run("-c " + cfg + " pipeline") == 0);
    for (const char* f : {"dataset.json", "baseline.json", "solution.json", "decisions.json", "eval.json"})
        CHECK(fs::exists(td.path / "out" / f));
    CHECK(fs::exists(td.path / "out" / "fan_model" / "manifest.json"));
}

TEST_CASE("infeasible DP spec exits 2") {
    TempDir td("fan_cli_infeasible");
    // tau gap 0.3, e ~ 0.1+, eps 0.05 -> needs delta around 0.056; give 0.01
    fan::Json extra = {
        {"constraints", {{"fairness", "DP"}, {"eps", 0.05}, {"delta", 0.01}, {"eta", 0.0}}},
    };
    std::string cfg = write_config(td.path, extra);
    CHECK(run("-c " + cfg + " gen-synth") == 0);
    CHECK(run("-c " + cfg + " train-baseline") == 0);
    CHECK(run("-c " + cfg + " solve") == 2);
}

TEST_CASE("solve without a baseline exits 1 naming the producer") {
    TempDir td("fan_cli_missing");
    std::string cfg = write_config(td.path, {});
    CHECK(run("-c " + cfg + " gen-synth") == 0);
    std::string cmd = fan_bin() + " -c " + cfg + " solve 2> " + (td.path / "err.txt").string();
    int rc = WEXITSTATUS(std::system(cmd.c_str()));
    CHECK(rc == 1);
    std::ifstream err(td.path / "err.txt");
    std::string text((std::istreambuf_iterator<char>(err)), std::istreambuf_iterator<char>());
    CHECK(text.find("train-baseline") != std::string::npos);
}

TEST_CASE("unknown config keys are rejected") {
    TempDir td("fan_cli_badkey");
    std::string cfg = write_config(td.path, {{"typo_key", 1}});
    CHECK(run("-c " + cfg + " gen-synth") == 1);
}

TEST_CASE("stage isolation: downstream re-runs reproduce identical artifacts") {
    TempDir td("fan_cli_isolation");
    std::string cfg = write_config(td.path, {});
    REQUIRE(run("-c " + cfg + " pipeline") == 0);
    auto read = [&](const char* f) {
        std::ifstream in(td.path / "out" / f);
        return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    };
    std::string sol_before = read("solution.json");
    std::string dec_before = read("decisions.json");
    fs::remove(td.path / "out" / "solution.json");
    fs::remove(td.path / "out" / "decisions.json");
    REQUIRE(run("-c " + cfg + " solve") == 0);
    REQUIRE(run("-c " + cfg + " adjust") == 0);
    CHECK(read("solution.json") == sol_before);
    CHECK(read("decisions.json") == dec_before);
}

TEST_CASE("determinism: two runs produce byte-identical artifacts") {
    TempDir td1("fan_cli_det1");
    TempDir td2("fan_cli_det2");
    std::string c1 = write_config(td1.path, {});
    std::string c2 = write_config(td2.path, {});
    REQUIRE(run("-c " + c1 + " pipeline") == 0);
    REQUIRE(run("-c " + c2 + " pipeline") == 0);
    for (const char* f : {"dataset.json", "baseline.json", "solution.json", "decisions.json"}) {
        std::ifstream a(td1.path / "out" / f), b(td2.path / "out" / f);
        std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(sa == sb);
    }
}

TEST_CASE("sweep grid emits one row per point") {
    TempDir td("fan_cli_sweep");
    fan::Json extra = {{"sweep",
                        {{"delta", {0.1, 0.2, 0.3}}, {"eps", {0.02, 0.05, 0.1}}, {"stage", "ip"}, {"workers", 2}}}};
    std::string cfg = write_config(td.path, extra);
    REQUIRE(run("-c " + cfg + " gen-synth") == 0);
    REQUIRE(run("-c " + cfg + " train-baseline") == 0);
    REQUIRE(run("-c " + cfg + " sweep") == 0);
    std::ifstream f(td.path / "out" / "sweep.csv");
    REQUIRE(f.good());
    std::string line;
    int rows = 0;
    bool header = true;
    while (std::getline(f, line)) {
        if (header) {
            CHECK(line.find("delta,eps") == 0);
            header = false;
            continue;
        }
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 9);
}

TEST_CASE("empty sweep grid writes a header-only csv") {
    TempDir td("fan_cli_sweep_empty");
    std::string cfg = write_config(td.path, {{"sweep", {{"delta", fan::Json::array()}, {"eps", fan::Json::array()}}}});
    REQUIRE(run("-c " + cfg + " sweep") == 0);
    std::ifstream f(td.path / "out" / "sweep.csv");
    std::string line;
    int lines = 0;
    while (std::getline(f, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 1);
}

TEST_CASE("EOp sweep has zero infeasible rows") {
    TempDir td("fan_cli_sweep_eop");
    fan::Json extra = {
        {"constraints", {{"fairness", "EOp"}, {"eps", 0.05}, {"delta", 0.2}, {"eta", 0.0}}},
        {"sweep", {{"delta", {0.0, 0.1}}, {"eps", {0.0, 0.05}}, {"stage", "ip"}, {"workers", 2}}},
    };
    std::string cfg = write_config(td.path, extra);
    REQUIRE(run("-c " + cfg + " gen-synth") == 0);
    REQUIRE(run("-c " + cfg + " train-baseline") == 0);
    REQUIRE(run("-c " + cfg + " sweep") == 0);
    std::ifstream f(td.path / "out" / "sweep.csv");
    std::string line;
    std::getline(f, line);  // header
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        CHECK(line.find("Infeasible") == std::string::npos);
        CHECK(line.find("Optimal") != std::string::npos);
    }
}

TEST_CASE("per-point sweep failures land in the error column and keep alignment") {
    TempDir td("fan_cli_sweep_err");
    // one group has no label-1 samples at all, so every EOp point fails
    fan::Json extra = {
        {"data",
         {{"source", "synthetic"},
          {"synthetic",
           {{"seed", 5}, {"n_groups", 2}, {"sizes", {60, 60}}, {"tau", {0.5, 0.0}}, {"score_noise", 0.9}}},
          {"split", {{"fractions", {0.8, 0.1, 0.1}}, {"seed", 3}}}}},
        {"constraints", {{"fairness", "EOp"}, {"eps", 0.05}, {"delta", 0.2}, {"eta", 0.0}}},
        {"sweep", {{"delta", {0.1}}, {"eps", {0.05}}, {"stage", "ip"}, {"workers", 1}}},
    };
    std::string cfg = write_config(td.path, extra);
    REQUIRE(run("-c " + cfg + " gen-synth") == 0);
    REQUIRE(run("-c " + cfg + " train-baseline") == 0);
    REQUIRE(run("-c " + cfg + " sweep") == 0);  // failures are recorded, not fatal
    std::ifstream f(td.path / "out" / "sweep.csv");
    std::string header, row;
    REQUIRE(std::getline(f, header));
    REQUIRE(std::getline(f, row));
    CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
    CHECK(row.find("empty stratum") != std::string::npos);
}

TEST_CASE("scalar flags override config constraint keys") {
    TempDir td("fan_cli_flags");
    // config asks for an infeasible DP spec; the flag loosens it
    fan::Json extra = {
        {"constraints", {{"fairness", "DP"}, {"eps", 0.05}, {"delta", 0.01}, {"eta", 0.0}}},
    };
    std::string cfg = write_config(td.path, extra);
    REQUIRE(run("-c " + cfg + " gen-synth") == 0);
    REQUIRE(run("-c " + cfg + " train-baseline") == 0);
    CHECK(run("-c " + cfg + " solve") == 2);
    CHECK(run("-c " + cfg + " --delta 0.3 solve") == 0);
    CHECK(run("-c " + cfg + " --fairness EOd --delta 0.0 solve") == 0);  // always feasible
}
