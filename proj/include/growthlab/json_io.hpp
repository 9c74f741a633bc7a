#pragma once

#include <string>

#include <json.hpp>

#include "growthlab/experiments.hpp"
#include "growthlab/fpp.hpp"
#include "growthlab/law.hpp"

// Versioned JSON schemas for every external surface: law and schedule
// descriptors, experiment configs, summary reports, and per-replica JSONL
// records. Parsing failures throw std::invalid_argument naming the offending
// field.

namespace growthlab::jsonio {

inline constexpr int kSchemaVersion = 1;

nlohmann::json law_to_json(const WeightLaw& law);
WeightLaw law_from_json(const nlohmann::json& j);

nlohmann::json schedule_to_json(const coupling::EpsilonSchedule& s);
coupling::EpsilonSchedule schedule_from_json(const nlohmann::json& j);

nlohmann::json condition_report_to_json(const ConditionReport& rep);

nlohmann::json config_to_json(const experiments::ExperimentConfig& cfg);
experiments::ExperimentConfig config_from_json(const nlohmann::json& j);

// Summary report. Wall time and output paths live in the invocation record
// the CLI attaches; the report body is a pure function of (config, seed).
nlohmann::json report_to_json(const experiments::FluctuationReport& report);

// One JSONL line per replica.
std::string replica_jsonl_line(int n, int replica, const experiments::ReplicaOutcome& o);
std::string replica_csv_header();
std::string replica_csv_line(int n, int replica, const experiments::ReplicaOutcome& o);

// Rebuilds per-n outcome groups from JSONL text (for report-merge).
std::vector<std::pair<int, experiments::ReplicaOutcome>> parse_jsonl(const std::string& text);

// Debug/replay dump of an edge environment's weights over its box.
nlohmann::json dump_edge_environment(const fpp::EdgeEnvironment& env);

}  // namespace growthlab::jsonio
