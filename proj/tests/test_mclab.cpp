#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "growthlab/experiments.hpp"
#include "growthlab/json_io.hpp"

using namespace growthlab;
using namespace growthlab::experiments;

namespace {

ExperimentConfig small_fpp_config() {
    ExperimentConfig cfg;
    cfg.model = Model::Fpp;
    cfg.law = WeightLaw::exponential(1.0);
    cfg.n_list = {8, 16};
    cfg.replicas = 30;
    cfg.coupling_kind = CouplingKind::Min;
    cfg.schedule_kind = coupling::ScheduleKind::FppRadial;
    cfg.seed = 99;
    return cfg;
}

}  // namespace

TEST_CASE("config validation rejects model/coupling mismatches") {
    auto cfg = small_fpp_config();
    cfg.coupling_kind = CouplingKind::Max;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_fpp_config();
    cfg.model = Model::Lpp;
    cfg.coupling_kind = CouplingKind::Max;
    cfg.schedule_kind = coupling::ScheduleKind::FppRadial;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.schedule_kind = coupling::ScheduleKind::LppRadial;
    CHECK_NOTHROW(cfg.validate());
    cfg.n_list = {1};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("alpha = 0 keeps the perturbed field identical") {
    auto cfg = small_fpp_config();
    cfg.alpha = 0.0;
    const auto report = run_coupled_experiment(cfg);
    for (const auto& block : report.per_n) {
        CHECK(block.tv_bound == 0.0);
        for (const auto& o : block.outcomes) {
            CHECK(o.value_tilde == o.value);
            CHECK(o.delta == 0.0);
            CHECK(o.d_lb == 0.0);
        }
        for (const auto& tp : block.tail) CHECK(tp.phat == 0.0);
        // Identical coupling: the cap degenerates to 1.
        const auto c = coupled_bound_conclusion(block, block.min, block.max);
        CHECK(c.cap == 1.0);
        CHECK_FALSE(c.violated);
    }
}

TEST_CASE("auto-calibrated alpha keeps the tv bound at or under target") {
    auto cfg = small_fpp_config();
    const auto report = run_coupled_experiment(cfg);
    for (const auto& block : report.per_n) {
        CHECK(block.tv_bound <= cfg.tv_target + 1e-12);
        CHECK(block.tv_bound >= 0.8 * cfg.tv_target);  // bisection lands close
        CHECK(block.alpha > 0);
        CHECK(block.m == calibrate_m(cfg.law, cfg.probe.delta, cfg.probe.rho));
    }
}

TEST_CASE("reports are bit-identical for any worker count") {
    auto cfg = small_fpp_config();
    const auto r1 = run_coupled_experiment(cfg, 1);
    const auto r2 = run_coupled_experiment(cfg, 2);
    const auto r4 = run_coupled_experiment(cfg, 4);
    const std::string s1 = jsonio::report_to_json(r1).dump();
    CHECK(s1 == jsonio::report_to_json(r2).dump());
    CHECK(s1 == jsonio::report_to_json(r4).dump());
}

TEST_CASE("replica conservation and interval monotonicity") {
    auto cfg = small_fpp_config();
    cfg.replicas = 41;
    const auto report = run_coupled_experiment(cfg);
    for (const auto& block : report.per_n) {
        CHECK(block.replicas == 41);
        CHECK(int(block.outcomes.size()) == 41);
        for (size_t i = 1; i < block.intervals.size(); ++i)
            CHECK(block.intervals[i].width >= block.intervals[i - 1].width);
        CHECK(block.tv_bound >= 0.0);
        CHECK(block.tv_bound <= 1.0);
    }
}

TEST_CASE("lpp and polymer experiments honor the pathwise sign") {
    ExperimentConfig cfg;
    cfg.model = Model::Lpp;
    cfg.law = WeightLaw::exponential(1.0);
    cfg.n_list = {8, 12};
    cfg.replicas = 25;
    cfg.coupling_kind = CouplingKind::Max;
    cfg.schedule_kind = coupling::ScheduleKind::LppRadial;
    cfg.seed = 5;
    const auto lpp_rep = run_coupled_experiment(cfg);
    for (const auto& block : lpp_rep.per_n)
        for (const auto& o : block.outcomes) {
            CHECK(o.delta >= -1e-12);
            CHECK(o.delta >= o.d_lb - 1e-10);
        }

    cfg.model = Model::Polymer;
    cfg.probe.beta = 0.8;
    const auto poly_rep = run_coupled_experiment(cfg);
    for (const auto& block : poly_rep.per_n)
        for (const auto& o : block.outcomes) {
            CHECK(o.delta >= -1e-12);
            CHECK(o.delta >= o.d_lb - 1e-10);
            CHECK(o.d_lb >= 0.0);
        }
}

TEST_CASE("scaling fits recover synthetic laws exactly") {
    std::vector<double> ns = {64, 128, 256, 512};
    std::vector<double> pow23(4), slog(4);
    for (size_t i = 0; i < 4; ++i) {
        pow23[i] = 3.7 * std::pow(ns[i], 2.0 / 3.0);
        slog[i] = 2.0 + 1.0 * std::sqrt(std::log(ns[i]));
    }
    const auto pfit = scaling_fit_power(ns, pow23);
    CHECK(pfit.exponent == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(pfit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    const auto sfit = scaling_fit_sqrtlog(ns, slog);
    CHECK(sfit.exponent == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sfit.intercept == doctest::Approx(2.0).epsilon(1e-10));

    std::vector<double> flat = {5, 5, 5, 5};
    CHECK_THROWS_AS(scaling_fit_power(ns, flat), std::domain_error);
    std::vector<double> two = {1, 2};
    std::vector<double> two_n = {8, 16};
    CHECK_THROWS_AS(scaling_fit_power(two_n, two), std::invalid_argument);
}

TEST_CASE("coupled-bound cap: trivial regimes are never violated") {
    auto cfg = small_fpp_config();
    const auto report = run_coupled_experiment(cfg);
    const auto& block = report.per_n.front();
    // Interval spanning everything with tv treated as 1: cap >= 1.
    PerNReport wide = block;
    wide.tv_bound = 1.0;
    const auto c = coupled_bound_conclusion(wide, block.min - 1, block.max + 1);
    CHECK(c.cap >= 1.0);
    CHECK_FALSE(c.violated);
    // Built-in checks from the run.
    for (const auto& check : block.cap_checks) CHECK_FALSE(check.violated);
    CHECK_THROWS_AS(coupled_bound_conclusion(block, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("merged aggregation equals one-shot aggregation") {
    auto cfg = small_fpp_config();
    cfg.n_list = {8};
    cfg.replicas = 24;
    const auto report = run_coupled_experiment(cfg);
    const auto& block = report.per_n.front();
    auto first = std::vector<ReplicaOutcome>(block.outcomes.begin(), block.outcomes.begin() + 10);
    auto second = std::vector<ReplicaOutcome>(block.outcomes.begin() + 10, block.outcomes.end());
    auto merged = first;
    merged.insert(merged.end(), second.begin(), second.end());
    const auto re = aggregate_per_n(block.n, block.m, block.alpha, block.tv_bound,
                                    block.sum_eps_sq, merged);
    CHECK(re.mean == block.mean);
    CHECK(re.variance == block.variance);
    CHECK(re.intervals[1].width == block.intervals[1].width);
    CHECK(re.tail[3].phat == block.tail[3].phat);
}

TEST_CASE("observable samples are deterministic and model-consistent") {
    const auto a = observable_samples(Model::Lpp, WeightLaw::exponential(1.0), 16, 20, 3, 1);
    const auto b = observable_samples(Model::Lpp, WeightLaw::exponential(1.0), 16, 20, 3, 2);
    CHECK(a == b);
    const auto study = variance_scaling_study(Model::Lpp, WeightLaw::exponential(1.0),
                                              {8, 16, 32}, 200, 11, 0);
    CHECK(study.rows.size() == 3);
    CHECK(study.variance_fit.r2 >= 0.0);
    CHECK(study.variance_fit.r2 <= 1.0);
    for (const auto& row : study.rows) CHECK(row.variance > 0.0);
}

TEST_CASE("degenerate laws omit the optional fits instead of failing") {
    ExperimentConfig cfg;
    cfg.model = Model::Fpp;
    cfg.law = WeightLaw::point_mass(1.0);
    cfg.n_list = {4, 8, 16};
    cfg.replicas = 5;
    cfg.alpha = 0.1;
    cfg.seed = 2;
    const auto report = run_coupled_experiment(cfg);
    CHECK_FALSE(report.variance_power_fit.has_value());
    CHECK_FALSE(report.width_sqrtlog_fit.has_value());
    for (const auto& block : report.per_n) {
        CHECK(block.variance == 0.0);
        CHECK(block.delta_max == 0.0);  // min coupling cannot lower a point mass
    }
}

TEST_CASE("config json round trip is the identity") {
    auto cfg = small_fpp_config();
    cfg.m = 4;
    cfg.alpha = 0.11;
    cfg.workers = 3;
    const auto j = jsonio::config_to_json(cfg);
    const auto back = jsonio::config_from_json(j);
    CHECK(jsonio::config_to_json(back).dump() == j.dump());
}

TEST_CASE("law and schedule json round trips") {
    for (const auto& law :
         {WeightLaw::exponential(2.0, 0.5), WeightLaw::geometric(0.3),
          WeightLaw::bernoulli_two_point(0, 1, 0.25), WeightLaw::uniform(1, 4),
          WeightLaw::finite_discrete({0, 2, 5}, {0.2, 0.5, 0.3}), WeightLaw::gamma(2, 3)}) {
        const auto j = jsonio::law_to_json(law);
        const auto back = jsonio::law_from_json(j);
        CHECK(jsonio::law_to_json(back).dump() == j.dump());
    }
    coupling::EpsilonSchedule s;
    s.kind = coupling::ScheduleKind::FppBox;
    s.alpha = 0.4;
    s.n = 64;
    s.delta = 0.05;
    CHECK(jsonio::schedule_to_json(jsonio::schedule_from_json(jsonio::schedule_to_json(s))).dump() ==
          jsonio::schedule_to_json(s).dump());
    CHECK_THROWS_AS(jsonio::law_from_json(nlohmann::json{{"kind", "cauchy"}}),
                    std::invalid_argument);
}

TEST_CASE("environment dump replays weights") {
    fpp::EdgeEnvironment env(Box{{0, 0}, 2}, WeightLaw::exponential(1.0), 17);
    const auto dump = jsonio::dump_edge_environment(env);
    CHECK(dump.at("seed").get<uint64_t>() == 17);
    for (const auto& rec : dump.at("edges")) {
        const Edge e{{rec.at("x").get<int32_t>(), rec.at("y").get<int32_t>()},
                     rec.at("dir").get<uint8_t>()};
        CHECK(env.weight(e) == rec.at("w").get<double>());
    }
}
