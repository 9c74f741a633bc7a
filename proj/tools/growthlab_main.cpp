// growthlab: planar random-growth simulation lab.
//
// Subcommands: check-law, run, oracle, scaling, report-merge. Exit codes:
// 0 success, 1 experiment diagnostics or oracle mismatch, 2 config errors.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "growthlab/experiments.hpp"
#include "growthlab/json_io.hpp"
#include "growthlab/lpp.hpp"
#include "growthlab/oracles.hpp"
#include "growthlab/polymer.hpp"
#include "growthlab/svg.hpp"
#include "growthlab/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace growthlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiagnostic = 1;
constexpr int kExitConfig = 2;

uint64_t env_default_seed() {
    if (const char* s = std::getenv("GROWTHLAB_SEED")) {
        try {
            return std::stoull(s);
        } catch (...) {
            throw std::invalid_argument("GROWTHLAB_SEED is not a valid integer");
        }
    }
    return 1;
}

// Accepts a file path or inline JSON text.
json load_json_arg(const std::string& arg) {
    std::string text = arg;
    if (fs::exists(arg)) {
        std::ifstream in(arg);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("JSON parse error: ") + e.what());
    }
}

json invocation_record(uint64_t seed, double wall_ms, const std::vector<std::string>& outputs) {
    return json{{"version", kVersion}, {"seed", seed}, {"wall_ms", wall_ms}, {"outputs", outputs}};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

int cmd_check_law(const std::string& law_arg, bool json_only) {
    const WeightLaw law = jsonio::law_from_json(load_json_arg(law_arg));
    const ConditionReport rep = check_conditions(law);
    const json out = jsonio::condition_report_to_json(rep);
    if (json_only) {
        std::cout << out.dump(2) << "\n";
        return kExitOk;
    }
    const auto line = [](const char* name, bool pass, double atom, double threshold) {
        std::cout << "  " << (pass ? "PASS" : "FAIL") << "  " << name << "  (atom " << atom
                  << " vs " << threshold << ")\n";
    };
    std::cout << "law: " << law.describe() << "\n";
    std::cout << "  essinf " << law.ess_inf() << ", esssup " << law.ess_sup() << ", atom at inf "
              << rep.atom_at_essinf << ", atom at sup " << rep.atom_at_esssup << "\n";
    line("undirected bond p_c = 1/2        ", rep.passes_undirected, rep.atom_at_essinf,
         thresholds::kUndirectedBond);
    line("directed bond upper 0.6735       ", rep.passes_directed_bond, rep.atom_at_essinf,
         thresholds::kDirectedBondUpper);
    line("directed site upper 3/4          ", rep.passes_directed_site, rep.atom_at_esssup,
         thresholds::kDirectedSiteUpper);
    std::cout << "  note: non-rigorous directed-bond estimate "
              << thresholds::kDirectedBondEstimate << " (informational)\n";
    std::cout << "  moment E[min(X1..X4)^2]: "
              << out.at("moment_flag_min4_sq").get<std::string>() << "\n";
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_run(const std::string& config_arg, const std::string& out_dir, int64_t seed_override,
            int workers_override, const std::string& format, bool plot) {
    const json cfg_json = load_json_arg(config_arg);
    experiments::ExperimentConfig cfg = jsonio::config_from_json(cfg_json);
    if (seed_override >= 0) cfg.seed = uint64_t(seed_override);
    else if (!cfg_json.contains("seed")) cfg.seed = env_default_seed();

    const auto t0 = std::chrono::steady_clock::now();
    const auto report = experiments::run_coupled_experiment(cfg, workers_override);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(out_dir);
    const fs::path summary_path = fs::path(out_dir) / "summary.json";
    const fs::path rows_path =
        fs::path(out_dir) / (format == "csv" ? "replicas.csv" : "replicas.jsonl");
    std::vector<std::string> outputs = {summary_path.string(), rows_path.string()};
    if (plot) {
        outputs.push_back((fs::path(out_dir) / "width_vs_n.svg").string());
        outputs.push_back((fs::path(out_dir) / "tail_curves.svg").string());
    }
    const json invocation = invocation_record(cfg.seed, wall_ms, outputs);

    json summary = jsonio::report_to_json(report);
    summary["invocation"] = invocation;
    write_text(summary_path, summary.dump(2) + "\n");

    {
        std::ostringstream rows;
        if (format == "csv") {
            rows << "# invocation: " << invocation.dump() << "\n";
            rows << jsonio::replica_csv_header() << "\n";
            for (const auto& block : report.per_n)
                for (size_t r = 0; r < block.outcomes.size(); ++r)
                    rows << jsonio::replica_csv_line(block.n, int(r), block.outcomes[r]) << "\n";
        } else {
            rows << json{{"v", jsonio::kSchemaVersion}, {"header", invocation}}.dump() << "\n";
            for (const auto& block : report.per_n)
                for (size_t r = 0; r < block.outcomes.size(); ++r)
                    rows << jsonio::replica_jsonl_line(block.n, int(r), block.outcomes[r]) << "\n";
        }
        write_text(rows_path, rows.str());
    }

    if (plot) {
        svg::LinePlot widths;
        widths.title = "shortest-interval width vs n";
        widths.x_label = "n";
        widths.y_label = "width";
        for (size_t mi = 0; mi < report.per_n.front().masses.size(); ++mi) {
            svg::Series s;
            s.name = "mass " + std::to_string(report.per_n.front().masses[mi]).substr(0, 4);
            for (const auto& block : report.per_n)
                s.points.push_back({double(block.n), block.intervals[mi].width});
            widths.series.push_back(std::move(s));
        }
        std::string widths_svg = svg::render(widths);
        widths_svg += "<!-- invocation: " + invocation.dump() + " -->\n";
        write_text(fs::path(out_dir) / "width_vs_n.svg", widths_svg);

        svg::LinePlot tails;
        tails.title = "P(delta >= kappa sqrt(log n))";
        tails.x_label = "kappa";
        tails.y_label = "phat";
        for (const auto& block : report.per_n) {
            svg::Series s;
            s.name = "n=" + std::to_string(block.n);
            for (const auto& tp : block.tail) s.points.push_back({tp.kappa, tp.phat});
            tails.series.push_back(std::move(s));
        }
        std::string tails_svg = svg::render(tails);
        tails_svg += "<!-- invocation: " + invocation.dump() + " -->\n";
        write_text(fs::path(out_dir) / "tail_curves.svg", tails_svg);
    }

    int touches = 0;
    for (const auto& block : report.per_n) {
        std::cout << "n=" << block.n << "  replicas=" << block.replicas << "  m=" << block.m
                  << "  alpha=" << block.alpha << "  tv_bound=" << block.tv_bound
                  << "  mean=" << block.mean << "  width(.75)=" << block.intervals[1].width
                  << "  P(delta>=" << block.tail.front().threshold
                  << ")=" << block.tail.front().phat << "\n";
        touches += block.boundary_touches;
    }
    std::cout << "wrote " << summary_path.string() << "\n";
    if (touches > 0) {
        std::cerr << "diagnostic: " << touches << " replica(s) touched the search box boundary\n";
        return kExitDiagnostic;
    }
    return kExitOk;
}

int cmd_oracle(const std::string& model, int size, int seeds, double beta) {
    int failures = 0;
    std::cout << "model=" << model << " size=" << size << " seeds=" << seeds << "\n";
    if (model == "fpp") {
        if (size > 2) throw std::invalid_argument("oracle: fpp radius is capped at 2");
        const WeightLaw laws[] = {WeightLaw::exponential(1.0), WeightLaw::uniform(0.2, 1.7),
                                  WeightLaw::bernoulli_two_point(0.5, 2.0, 0.3)};
        const Box box{{0, 0}, size};
        for (int s = 0; s < seeds; ++s) {
            double max_err = 0;
            for (const auto& law : laws) {
                fpp::EdgeEnvironment env(box, law, uint64_t(s));
                for (Coord target : {Coord{size, 0}, Coord{0, -size}, Coord{1, 1}}) {
                    const double fast = fpp::passage_time(env, {0, 0}, target).value;
                    const double slow = oracles::fpp_min_over_paths(
                        box, {0, 0}, target, [&](Edge e) { return env.weight(e); });
                    max_err = std::max(max_err, std::abs(fast - slow));
                }
            }
            const bool ok = max_err == 0.0;
            failures += ok ? 0 : 1;
            std::cout << "  seed " << s << "  max_abs_err " << max_err << "  "
                      << (ok ? "pass" : "FAIL") << "\n";
        }
    } else if (model == "lpp") {
        if (size > 12) throw std::invalid_argument("oracle: lpp n is capped at 12");
        for (int s = 0; s < seeds; ++s) {
            lpp::VertexEnvironment env(WeightLaw::exponential(1.0), uint64_t(s), size + 1);
            double max_err = 0;
            for (int a = 0; a <= size; ++a)
                for (int b = 0; a + b <= size; ++b) {
                    const double fast = lpp::last_passage_value(env, {0, 0}, {a, b});
                    const double slow = oracles::lpp_max_over_paths(
                        {0, 0}, {a, b}, [&](Coord v) { return env.weight(v); });
                    max_err = std::max(max_err, std::abs(fast - slow));
                }
            const bool ok = max_err == 0.0;
            failures += ok ? 0 : 1;
            std::cout << "  seed " << s << "  max_abs_err " << max_err << "  "
                      << (ok ? "pass" : "FAIL") << "\n";
        }
    } else if (model == "polymer") {
        if (size > 12) throw std::invalid_argument("oracle: polymer n is capped at 12");
        for (int s = 0; s < seeds; ++s) {
            lpp::VertexEnvironment env(WeightLaw::exponential(1.0), uint64_t(s), size + 1);
            const auto weight = [&](Coord v) { return env.weight(v); };
            const double fast = polymer::free_energy(env, beta, size);
            const double slow = oracles::polymer_logz(weight, beta, size);
            double rel = std::abs(fast - slow) / std::max(1.0, std::abs(slow));
            const auto fast_ep = polymer::endpoint_distribution(env, beta, size);
            const auto slow_ep = oracles::polymer_endpoint(weight, beta, size);
            for (int i = 0; i <= size; ++i)
                rel = std::max(rel, std::abs(fast_ep.probs[size_t(i)] - slow_ep[size_t(i)]));
            const bool ok = rel <= 1e-10;
            failures += ok ? 0 : 1;
            std::cout << "  seed " << s << "  max_rel_err " << rel << "  "
                      << (ok ? "pass" : "FAIL") << "\n";
        }
    } else {
        throw std::invalid_argument("oracle: model must be fpp, lpp, or polymer");
    }
    std::cout << (failures == 0 ? "all pass" : "MISMATCHES FOUND") << "\n";
    return failures == 0 ? kExitOk : kExitDiagnostic;
}

int cmd_scaling(const std::string& model_arg, const std::string& law_arg,
                const std::vector<int>& n_list, int replicas, uint64_t seed, int workers,
                double beta, const std::string& out_json) {
    experiments::Model model;
    if (model_arg == "lpp") model = experiments::Model::Lpp;
    else if (model_arg == "fpp") model = experiments::Model::Fpp;
    else if (model_arg == "polymer") model = experiments::Model::Polymer;
    else throw std::invalid_argument("scaling: model must be fpp, lpp, or polymer");
    const WeightLaw law = jsonio::law_from_json(load_json_arg(law_arg));
    const auto study =
        experiments::variance_scaling_study(model, law, n_list, replicas, seed, workers, beta);
    json rows = json::array();
    for (const auto& row : study.rows) {
        std::cout << "n=" << row.n << "  mean=" << row.mean << "  var=" << row.variance << "\n";
        rows.push_back({{"n", row.n}, {"mean", row.mean}, {"variance", row.variance}});
    }
    std::cout << "variance exponent " << study.variance_fit.exponent << "  (r2 "
              << study.variance_fit.r2 << ")\n";
    if (!out_json.empty()) {
        const json out{{"v", jsonio::kSchemaVersion},
                       {"model", model_arg},
                       {"law", jsonio::law_to_json(law)},
                       {"replicas", replicas},
                       {"rows", rows},
                       {"fit",
                        {{"exponent", study.variance_fit.exponent},
                         {"intercept", study.variance_fit.intercept},
                         {"r2", study.variance_fit.r2}}},
                       {"invocation", invocation_record(seed, 0.0, {out_json})}};
        write_text(out_json, out.dump(2) + "\n");
        std::cout << "wrote " << out_json << "\n";
    }
    return kExitOk;
}

int cmd_report_merge(const std::vector<std::string>& inputs, const std::string& out_path) {
    if (inputs.size() < 2) throw std::invalid_argument("report-merge: need at least two run dirs");
    json first_summary;
    experiments::ExperimentConfig cfg;
    std::map<int, std::vector<experiments::ReplicaOutcome>> merged;
    std::map<int, json> block_meta;
    for (size_t k = 0; k < inputs.size(); ++k) {
        const fs::path dir(inputs[k]);
        const json summary = load_json_arg((dir / "summary.json").string());
        const experiments::ExperimentConfig c = jsonio::config_from_json(summary.at("config"));
        if (k == 0) {
            first_summary = summary;
            cfg = c;
            for (const auto& block : summary.at("per_n")) block_meta[block.at("n").get<int>()] = block;
        } else {
            json a = jsonio::config_to_json(cfg);
            json b = jsonio::config_to_json(c);
            a.erase("seed");
            b.erase("seed");
            a.erase("workers");
            b.erase("workers");
            if (a != b)
                throw std::invalid_argument("report-merge: configs differ beyond seed/workers");
        }
        std::ifstream in(dir / "replicas.jsonl");
        if (!in) throw std::invalid_argument("report-merge: missing replicas.jsonl in " + inputs[k]);
        std::stringstream ss;
        ss << in.rdbuf();
        std::string text = ss.str();
        // Drop the header record.
        std::istringstream lines(text);
        std::string line, body;
        while (std::getline(lines, line))
            if (line.find("\"header\"") == std::string::npos) body += line + "\n";
        for (auto& [n, outcome] : jsonio::parse_jsonl(body)) merged[n].push_back(outcome);
    }
    experiments::FluctuationReport report;
    report.config = cfg;
    for (auto& [n, outcomes] : merged) {
        const json& meta = block_meta.at(n);
        report.per_n.push_back(experiments::aggregate_per_n(
            n, meta.at("m").get<int>(), meta.at("alpha").get<double>(),
            meta.at("tv_bound").get<double>(), meta.at("sum_eps_sq").get<double>(),
            std::move(outcomes)));
    }
    json out = jsonio::report_to_json(report);
    out["invocation"] = invocation_record(cfg.seed, 0.0, {out_path});
    out["merged_from"] = inputs;
    write_text(out_path, out.dump(2) + "\n");
    std::cout << "wrote " << out_path << " (" << report.per_n.size() << " n-blocks)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("growthlab ") + kVersion +
                 " - planar random-growth fluctuation lab"};
    app.require_subcommand(1);

    std::string law_arg, config_arg, out_dir = "out", format = "json", out_json;
    std::string model_arg = "lpp";
    bool json_only = false, plot = false;
    int64_t seed_override = -1;
    int workers = -1;
    int oracle_size = -1, oracle_seeds = 50;
    double beta = 1.0;
    std::vector<int> n_list = {64, 128, 256, 512};
    int replicas = 2000;
    std::vector<std::string> merge_inputs;

    auto* check = app.add_subcommand("check-law", "check distributional assumptions of a law");
    check->add_option("--law", law_arg, "law JSON (file or inline)")->required();
    check->add_flag("--json", json_only, "machine-readable output only");

    auto* run = app.add_subcommand("run", "run a coupled fluctuation experiment");
    run->add_option("--config", config_arg, "experiment config JSON (file or inline)")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--seed", seed_override, "override the config seed");
    run->add_option("--workers", workers, "worker threads (0 = all cores); results unchanged");
    run->add_option("--format", format, "replica rows format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    run->add_flag("--plot", plot, "emit SVG line plots");

    auto* oracle = app.add_subcommand("oracle", "compare kernels against enumeration oracles");
    oracle->add_option("--model", model_arg, "fpp, lpp, or polymer")->required();
    oracle->add_option("--size", oracle_size, "fpp radius (<=2) or lpp/polymer n (<=12)");
    oracle->add_option("--seeds", oracle_seeds, "number of seeds");
    oracle->add_option("--beta", beta, "polymer inverse temperature");

    auto* scaling = app.add_subcommand("scaling", "variance-vs-n scaling diagnostic");
    scaling->add_option("--model", model_arg, "fpp, lpp, or polymer")->required();
    scaling->add_option("--law", law_arg, "law JSON (file or inline)");
    scaling->add_option("--n", n_list, "n values")->delimiter(',');
    scaling->add_option("--replicas", replicas, "replicas per n");
    scaling->add_option("--seed", seed_override, "seed (default GROWTHLAB_SEED or 1)");
    scaling->add_option("--workers", workers, "worker threads");
    scaling->add_option("--beta", beta, "polymer inverse temperature");
    scaling->add_option("--out", out_json, "also write a JSON summary here");

    auto* merge = app.add_subcommand("report-merge", "merge replica rows from compatible runs");
    merge->add_option("--out", out_json, "merged summary path")->required();
    merge->add_option("inputs", merge_inputs, "run directories")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (check->parsed()) return cmd_check_law(law_arg, json_only);
        if (run->parsed()) return cmd_run(config_arg, out_dir, seed_override, workers, format, plot);
        if (oracle->parsed()) {
            if (oracle_size < 0) oracle_size = model_arg == "fpp" ? 2 : model_arg == "lpp" ? 6 : 10;
            return cmd_oracle(model_arg, oracle_size, oracle_seeds, beta);
        }
        if (scaling->parsed()) {
            if (law_arg.empty()) law_arg = R"({"kind":"exponential","params":{"rate":1.0}})";
            const uint64_t seed = seed_override >= 0 ? uint64_t(seed_override) : env_default_seed();
            return cmd_scaling(model_arg, law_arg, n_list, replicas, seed,
                               workers < 0 ? 0 : workers, beta, out_json);
        }
        if (merge->parsed()) return cmd_report_merge(merge_inputs, out_json);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiagnostic;
    }
    return kExitConfig;
}
