#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

// End-to-end checks of the installed CLI binary (path via GROWTHLAB_BIN).

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string bin_path() {
    const char* p = std::getenv("GROWTHLAB_BIN");
    REQUIRE(p != nullptr);
    return p;
}

int run_cmd(const std::string& args, const std::string& log) {
    const std::string cmd = bin_path() + " " + args + " >" + log + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "growthlab_cli_test";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("check-law: pass, fail, and malformed inputs") {
    const auto dir = temp_dir();
    const auto log = (dir / "log.txt").string();
    CHECK(run_cmd("check-law --law '{\"kind\":\"exponential\",\"params\":{\"rate\":1.0}}'", log) ==
          0);
    const std::string out = slurp(log);
    CHECK(out.find("PASS") != std::string::npos);

    CHECK(run_cmd(
              "check-law --law "
              "'{\"kind\":\"bernoulli-two-point\",\"params\":{\"a\":0,\"b\":1,\"p\":0.6}}'",
              log) == 0);
    CHECK(slurp(log).find("FAIL  undirected") != std::string::npos);

    // Malformed JSON: exit 2 with a parse diagnostic.
    CHECK(run_cmd("check-law --law '{\"kind\":'", log) == 2);
    CHECK(slurp(log).find("parse error") != std::string::npos);
}

TEST_CASE("run: smoke config, incompatible coupling, seed default from env") {
    const auto dir = temp_dir();
    const auto log = (dir / "log.txt").string();
    const auto cfg_path = dir / "cfg.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"model":"fpp","law":{"kind":"exponential","params":{"rate":1.0}},
                  "n_list":[8],"replicas":10,"schedule":{"kind":"fpp-radial","alpha":0.0},
                  "seed":3})";
    }
    const auto out1 = dir / "out1";
    CHECK(run_cmd("run --config " + cfg_path.string() + " --out " + out1.string(), log) == 0);
    const json summary = json::parse(slurp((out1 / "summary.json").string()));
    CHECK(summary.at("per_n")[0].at("tv_bound").get<double>() == 0.0);
    CHECK(summary.at("invocation").at("seed").get<uint64_t>() == 3);
    CHECK(summary.at("per_n")[0].at("replicas").get<int>() == 10);

    // fpp with max coupling is a config error (exit 2).
    const auto bad_path = dir / "bad.json";
    {
        std::ofstream bad(bad_path);
        bad << R"({"model":"fpp","law":{"kind":"exponential","params":{"rate":1.0}},
                  "n_list":[8],"replicas":5,"coupling":{"kind":"max"}})";
    }
    CHECK(run_cmd("run --config " + bad_path.string() + " --out " + (dir / "nope").string(), log) ==
          2);
    CHECK(slurp(log).find("config error") != std::string::npos);

    // GROWTHLAB_SEED provides the default when the config has no seed.
    const auto noseed_path = dir / "noseed.json";
    {
        std::ofstream ns(noseed_path);
        ns << R"({"model":"fpp","law":{"kind":"exponential","params":{"rate":1.0}},
                 "n_list":[8],"replicas":5,"schedule":{"kind":"fpp-radial","alpha":0.0}})";
    }
    const std::string cmd = "GROWTHLAB_SEED=777 " + bin_path() + " run --config " +
                            noseed_path.string() + " --out " + (dir / "out_env").string() + " >" +
                            log + " 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    const json env_summary = json::parse(slurp((dir / "out_env" / "summary.json").string()));
    CHECK(env_summary.at("invocation").at("seed").get<uint64_t>() == 777);
}

TEST_CASE("run: csv format emits the invocation record and rows") {
    const auto dir = temp_dir();
    const auto log = (dir / "log.txt").string();
    const auto cfg_path = dir / "cfg_csv.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"model":"lpp","law":{"kind":"exponential","params":{"rate":1.0}},
                  "n_list":[8],"replicas":6,"coupling":{"kind":"max"},
                  "schedule":{"kind":"lpp-radial","alpha":0.2},"seed":4})";
    }
    const auto out = dir / "out_csv";
    CHECK(run_cmd("run --config " + cfg_path.string() + " --out " + out.string() + " --format csv",
                  log) == 0);
    const std::string csv = slurp((out / "replicas.csv").string());
    CHECK(csv.find("# invocation:") != std::string::npos);
    CHECK(csv.find("n,replica,value") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);  // comment + header + 6 rows
}

TEST_CASE("determinism: same seed, different worker counts, identical artifacts") {
    const auto dir = temp_dir();
    const auto log = (dir / "log.txt").string();
    const auto cfg_path = dir / "det.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"model":"fpp","law":{"kind":"exponential","params":{"rate":1.0}},
                  "n_list":[8,12],"replicas":16,"seed":12})";
    }
    const auto out_a = dir / "det_a";
    const auto out_b = dir / "det_b";
    CHECK(run_cmd("run --config " + cfg_path.string() + " --out " + out_a.string() +
                      " --workers 1",
                  log) == 0);
    CHECK(run_cmd("run --config " + cfg_path.string() + " --out " + out_b.string() +
                      " --workers 2",
                  log) == 0);
    json a = json::parse(slurp((out_a / "summary.json").string()));
    json b = json::parse(slurp((out_b / "summary.json").string()));
    a.erase("invocation");
    b.erase("invocation");
    CHECK(a.dump() == b.dump());
}

TEST_CASE("oracle subcommand passes for every model") {
    const auto dir = temp_dir();
    const auto log = (dir / "log.txt").string();
    CHECK(run_cmd("oracle --model fpp --size 2 --seeds 3", log) == 0);
    CHECK(run_cmd("oracle --model lpp --size 5 --seeds 3", log) == 0);
    CHECK(run_cmd("oracle --model polymer --size 8 --seeds 3 --beta 2.0", log) == 0);
    CHECK(slurp(log).find("all pass") != std::string::npos);
    CHECK(run_cmd("oracle --model fpp --size 9", log) == 2);  // beyond enumeration limits
}

TEST_CASE("scaling subcommand fits a positive exponent on lpp") {
    const auto dir = temp_dir();
    const auto log = (dir / "log.txt").string();
    const auto out = (dir / "scaling.json").string();
    CHECK(run_cmd("scaling --model lpp --n 8,16,32 --replicas 120 --seed 5 --out " + out, log) ==
          0);
    const json j = json::parse(slurp(out));
    CHECK(j.at("fit").at("exponent").get<double>() > 0.0);
    CHECK(j.at("rows").size() == 3);
}

TEST_CASE("shipped smoke config reproduces its golden summary") {
    const char* src = std::getenv("GROWTHLAB_SRC");
    REQUIRE(src != nullptr);
    const auto dir = temp_dir();
    const auto log = (dir / "log.txt").string();
    const auto out = dir / "golden_run";
    CHECK(run_cmd("run --config " + (fs::path(src) / "configs" / "fpp_smoke.json").string() +
                      " --out " + out.string(),
                  log) == 0);
    json got = json::parse(slurp((out / "summary.json").string()));
    got.erase("invocation");
    const json golden =
        json::parse(slurp((fs::path(src) / "tests" / "data" / "golden_fpp_smoke.json").string()));
    CHECK(got.dump(2) == golden.dump(2));
}

TEST_CASE("report-merge combines shards and re-aggregates") {
    const auto dir = temp_dir();
    const auto log = (dir / "log.txt").string();
    const auto cfg_a = dir / "shard_a.json";
    const auto cfg_b = dir / "shard_b.json";
    {
        std::ofstream a(cfg_a);
        a << R"({"model":"fpp","law":{"kind":"exponential","params":{"rate":1.0}},
                "n_list":[8],"replicas":7,"seed":1})";
        std::ofstream b(cfg_b);
        b << R"({"model":"fpp","law":{"kind":"exponential","params":{"rate":1.0}},
                "n_list":[8],"replicas":7,"seed":2})";
    }
    const auto out_a = dir / "shard_a";
    const auto out_b = dir / "shard_b";
    CHECK(run_cmd("run --config " + cfg_a.string() + " --out " + out_a.string(), log) == 0);
    CHECK(run_cmd("run --config " + cfg_b.string() + " --out " + out_b.string(), log) == 0);
    const auto merged = (dir / "merged.json").string();
    CHECK(run_cmd("report-merge --out " + merged + " " + out_a.string() + " " + out_b.string(),
                  log) == 0);
    const json j = json::parse(slurp(merged));
    CHECK(j.at("per_n")[0].at("replicas").get<int>() == 14);
    CHECK(j.at("merged_from").size() == 2);
}
