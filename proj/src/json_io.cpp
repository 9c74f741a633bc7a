#include "growthlab/json_io.hpp"

#include <sstream>
#include <stdexcept>

namespace growthlab::jsonio {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

template <class T>
T field(const json& j, const char* name) {
    if (!j.contains(name)) fail(std::string("missing field: ") + name);
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        fail(std::string("malformed field: ") + name);
    }
}

template <class T>
T field_or(const json& j, const char* name, T def) {
    if (!j.contains(name)) return def;
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        fail(std::string("malformed field: ") + name);
    }
}

void check_version(const json& j, const char* what) {
    const int v = field_or<int>(j, "v", kSchemaVersion);
    if (v != kSchemaVersion)
        fail(std::string(what) + ": unsupported schema version " + std::to_string(v));
}

}  // namespace

json law_to_json(const WeightLaw& law) {
    json params;
    switch (law.kind) {
        case LawKind::Exponential: params = {{"rate", law.rate}}; break;
        case LawKind::Geometric: params = {{"p", law.p}}; break;
        case LawKind::BernoulliTwoPoint: params = {{"a", law.a}, {"b", law.b}, {"p", law.p}}; break;
        case LawKind::Uniform: params = {{"lo", law.a}, {"hi", law.b}}; break;
        case LawKind::FiniteDiscrete: params = {{"atoms", law.atoms}, {"probs", law.probs}}; break;
        case LawKind::Gamma: params = {{"shape", law.shape}, {"scale", law.scale}}; break;
    }
    return json{{"v", kSchemaVersion},
                {"kind", law_kind_name(law.kind)},
                {"params", params},
                {"offset", law.offset}};
}

WeightLaw law_from_json(const json& j) {
    check_version(j, "law");
    const auto kind = field<std::string>(j, "kind");
    const json params = j.contains("params") ? j.at("params") : json::object();
    const double offset = field_or<double>(j, "offset", 0.0);
    if (kind == "exponential") return WeightLaw::exponential(field<double>(params, "rate"), offset);
    if (kind == "geometric") return WeightLaw::geometric(field<double>(params, "p"), offset);
    if (kind == "bernoulli-two-point")
        return WeightLaw::bernoulli_two_point(field<double>(params, "a"),
                                              field<double>(params, "b"),
                                              field<double>(params, "p"), offset);
    if (kind == "uniform")
        return WeightLaw::uniform(field<double>(params, "lo"), field<double>(params, "hi"), offset);
    if (kind == "finite-discrete")
        return WeightLaw::finite_discrete(field<std::vector<double>>(params, "atoms"),
                                          field<std::vector<double>>(params, "probs"), offset);
    if (kind == "gamma")
        return WeightLaw::gamma(field<double>(params, "shape"), field<double>(params, "scale"),
                                offset);
    fail("law: unknown kind '" + kind + "'");
}

json schedule_to_json(const coupling::EpsilonSchedule& s) {
    json j{{"v", kSchemaVersion},
           {"kind", coupling::schedule_kind_name(s.kind)},
           {"alpha", s.alpha},
           {"n", s.n}};
    if (s.kind == coupling::ScheduleKind::FppBox) j["delta"] = s.delta;
    return j;
}

coupling::EpsilonSchedule schedule_from_json(const json& j) {
    check_version(j, "schedule");
    coupling::EpsilonSchedule s;
    const auto kind = field<std::string>(j, "kind");
    if (kind == "fpp-radial") s.kind = coupling::ScheduleKind::FppRadial;
    else if (kind == "lpp-radial") s.kind = coupling::ScheduleKind::LppRadial;
    else if (kind == "uniform") s.kind = coupling::ScheduleKind::Uniform;
    else if (kind == "fpp-box") s.kind = coupling::ScheduleKind::FppBox;
    else fail("schedule: unknown kind '" + kind + "'");
    s.alpha = field<double>(j, "alpha");
    s.n = field_or<double>(j, "n", 2.0);
    s.delta = field_or<double>(j, "delta", 0.0);
    s.validate();
    return s;
}

json condition_report_to_json(const ConditionReport& rep) {
    const auto flag_name = [](MomentFlag f) {
        switch (f) {
            case MomentFlag::KnownFinite: return "known-finite";
            case MomentFlag::KnownInfinite: return "known-infinite";
            case MomentFlag::Unknown: return "unknown";
        }
        return "?";
    };
    return json{
        {"v", kSchemaVersion},
        {"atom_at_essinf", rep.atom_at_essinf},
        {"atom_at_esssup", rep.atom_at_esssup},
        {"passes_undirected", rep.passes_undirected},
        {"passes_directed_bond", rep.passes_directed_bond},
        {"passes_directed_site", rep.passes_directed_site},
        {"moment_flag_min4_sq", flag_name(rep.moment_flag_min4_sq)},
        {"thresholds",
         {{"undirected_bond", thresholds::kUndirectedBond},
          {"directed_bond_upper", thresholds::kDirectedBondUpper},
          {"directed_bond_estimate", thresholds::kDirectedBondEstimate},
          {"directed_site_upper", thresholds::kDirectedSiteUpper}}},
    };
}

json config_to_json(const experiments::ExperimentConfig& cfg) {
    return json{
        {"v", kSchemaVersion},
        {"model", experiments::model_name(cfg.model)},
        {"law", law_to_json(cfg.law)},
        {"n_list", cfg.n_list},
        {"replicas", cfg.replicas},
        {"coupling",
         {{"kind", cfg.coupling_kind == CouplingKind::Min ? "min" : "max"}, {"m", cfg.m}}},
        {"schedule",
         {{"kind", coupling::schedule_kind_name(cfg.schedule_kind)},
          {"alpha", cfg.alpha < 0 ? json("auto") : json(cfg.alpha)},
          {"delta", cfg.schedule_delta}}},
        {"tv_target", cfg.tv_target},
        {"probe", {{"delta", cfg.probe.delta}, {"rho", cfg.probe.rho}, {"beta", cfg.probe.beta}}},
        {"seed", cfg.seed},
        {"workers", cfg.workers},
    };
}

experiments::ExperimentConfig config_from_json(const json& j) {
    check_version(j, "config");
    experiments::ExperimentConfig cfg;
    const auto model = field<std::string>(j, "model");
    if (model == "fpp") cfg.model = experiments::Model::Fpp;
    else if (model == "lpp") cfg.model = experiments::Model::Lpp;
    else if (model == "polymer") cfg.model = experiments::Model::Polymer;
    else fail("config: unknown model '" + model + "'");
    if (!j.contains("law")) fail("missing field: law");
    cfg.law = law_from_json(j.at("law"));
    cfg.n_list = field<std::vector<int>>(j, "n_list");
    cfg.replicas = field<int>(j, "replicas");
    if (j.contains("coupling")) {
        const json& c = j.at("coupling");
        const auto kind = field_or<std::string>(c, "kind", "");
        if (kind == "min") cfg.coupling_kind = CouplingKind::Min;
        else if (kind == "max") cfg.coupling_kind = CouplingKind::Max;
        else if (!kind.empty()) fail("config: coupling.kind must be 'min' or 'max'");
        cfg.m = field_or<int>(c, "m", 0);
    } else {
        cfg.coupling_kind =
            cfg.model == experiments::Model::Fpp ? CouplingKind::Min : CouplingKind::Max;
    }
    if (j.contains("schedule")) {
        const json& s = j.at("schedule");
        const auto kind = field_or<std::string>(s, "kind", "");
        if (kind == "fpp-radial") cfg.schedule_kind = coupling::ScheduleKind::FppRadial;
        else if (kind == "lpp-radial") cfg.schedule_kind = coupling::ScheduleKind::LppRadial;
        else if (kind == "uniform") cfg.schedule_kind = coupling::ScheduleKind::Uniform;
        else if (kind == "fpp-box") cfg.schedule_kind = coupling::ScheduleKind::FppBox;
        else if (!kind.empty()) fail("config: unknown schedule.kind '" + kind + "'");
        if (s.contains("alpha") && s.at("alpha").is_number())
            cfg.alpha = s.at("alpha").get<double>();
        else if (s.contains("alpha") && s.at("alpha") != json("auto"))
            fail("config: schedule.alpha must be a number or \"auto\"");
        cfg.schedule_delta = field_or<double>(s, "delta", 0.0);
    } else {
        cfg.schedule_kind = cfg.model == experiments::Model::Fpp
                                ? coupling::ScheduleKind::FppRadial
                                : coupling::ScheduleKind::LppRadial;
    }
    cfg.tv_target = field_or<double>(j, "tv_target", 0.25);
    if (j.contains("probe")) {
        const json& p = j.at("probe");
        cfg.probe.delta = field_or<double>(p, "delta", 0.5);
        cfg.probe.rho = field_or<double>(p, "rho", 0.5);
        cfg.probe.beta = field_or<double>(p, "beta", 1.0);
    }
    cfg.seed = field_or<uint64_t>(j, "seed", 1);
    cfg.workers = field_or<int>(j, "workers", 0);
    cfg.validate();
    return cfg;
}

namespace {

json interval_to_json(const metrics::IntervalEstimate& est) {
    return json{{"a", est.a}, {"b", est.b}, {"mass", est.mass}, {"width", est.width}};
}

json fit_to_json(const experiments::ScalingFit& fit) {
    return json{
        {"model",
         fit.kind == experiments::ScalingFit::Kind::PowerInN ? "power-in-n" : "sqrt-log-n"},
        {"exponent", fit.exponent},
        {"intercept", fit.intercept},
        {"r2", fit.r2}};
}

}  // namespace

json report_to_json(const experiments::FluctuationReport& report) {
    json per_n = json::array();
    for (const auto& block : report.per_n) {
        json tail = json::array();
        for (const auto& tp : block.tail)
            tail.push_back({{"kappa", tp.kappa}, {"threshold", tp.threshold}, {"phat", tp.phat}});
        json caps = json::array();
        for (const auto& c : block.cap_checks)
            caps.push_back({{"a", c.a},
                            {"b", c.b},
                            {"width", c.width},
                            {"mass_in_interval", c.mass_in_interval},
                            {"p_delta_le_width", c.p_delta_le_width},
                            {"cap", c.cap},
                            {"slack", c.slack},
                            {"violated", c.violated}});
        json widths = json::object();
        json intervals = json::array();
        for (size_t i = 0; i < block.masses.size(); ++i)
            intervals.push_back({{"mass_target", block.masses[i]},
                                 {"interval", interval_to_json(block.intervals[i])}});
        per_n.push_back({{"n", block.n},
                         {"replicas", block.replicas},
                         {"m", block.m},
                         {"alpha", block.alpha},
                         {"tv_bound", block.tv_bound},
                         {"sum_eps_sq", block.sum_eps_sq},
                         {"observable",
                          {{"mean", block.mean},
                           {"sd", block.sd},
                           {"se", block.se},
                           {"variance", block.variance},
                           {"min", block.min},
                           {"max", block.max}}},
                         {"intervals", intervals},
                         {"tail", tail},
                         {"delta", {{"mean", block.delta_mean}, {"max", block.delta_max}}},
                         {"d_lb_mean", block.d_lb_mean},
                         {"cap_checks", caps},
                         {"boundary_touches", block.boundary_touches}});
    }
    json fits = json::object();
    if (report.variance_power_fit) fits["variance_power"] = fit_to_json(*report.variance_power_fit);
    if (report.width_sqrtlog_fit) fits["width_sqrtlog"] = fit_to_json(*report.width_sqrtlog_fit);
    return json{{"v", kSchemaVersion},
                {"config", config_to_json(report.config)},
                {"per_n", per_n},
                {"fits", fits}};
}

std::string replica_jsonl_line(int n, int replica, const experiments::ReplicaOutcome& o) {
    json j{{"n", n},
           {"replica", replica},
           {"value", o.value},
           {"value_tilde", o.value_tilde},
           {"delta", o.delta},
           {"d_lb", o.d_lb},
           {"touched_boundary", o.touched_boundary}};
    return j.dump();
}

std::string replica_csv_header() {
    return "n,replica,value,value_tilde,delta,d_lb,touched_boundary";
}

std::string replica_csv_line(int n, int replica, const experiments::ReplicaOutcome& o) {
    std::ostringstream os;
    os.precision(17);
    os << n << ',' << replica << ',' << o.value << ',' << o.value_tilde << ',' << o.delta << ','
       << o.d_lb << ',' << (o.touched_boundary ? 1 : 0);
    return os.str();
}

std::vector<std::pair<int, experiments::ReplicaOutcome>> parse_jsonl(const std::string& text) {
    std::vector<std::pair<int, experiments::ReplicaOutcome>> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            fail(std::string("jsonl: ") + e.what());
        }
        experiments::ReplicaOutcome o;
        o.value = field<double>(j, "value");
        o.value_tilde = field<double>(j, "value_tilde");
        o.delta = field<double>(j, "delta");
        o.d_lb = field<double>(j, "d_lb");
        o.touched_boundary = field_or<bool>(j, "touched_boundary", false);
        out.emplace_back(field<int>(j, "n"), o);
    }
    return out;
}

json dump_edge_environment(const fpp::EdgeEnvironment& env) {
    json edges = json::array();
    const Box& box = env.box;
    for (int32_t x = box.center.x - box.radius; x <= box.center.x + box.radius; ++x) {
        for (int32_t y = box.center.y - box.radius; y <= box.center.y + box.radius; ++y) {
            for (uint8_t dir : {uint8_t{0}, uint8_t{1}}) {
                const Edge e{{x, y}, dir};
                if (!box.contains_edge(e)) continue;
                edges.push_back({{"x", x}, {"y", y}, {"dir", dir}, {"w", env.weight(e)}});
            }
        }
    }
    return json{{"v", kSchemaVersion},
                {"law", law_to_json(env.law)},
                {"seed", env.seed},
                {"box", {{"cx", box.center.x}, {"cy", box.center.y}, {"radius", box.radius}}},
                {"edges", edges}};
}

}  // namespace growthlab::jsonio
