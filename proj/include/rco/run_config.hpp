// Copyright 2026 The RCO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runner configuration. Keys of the JSON config file mirror the command-line
// flags (with underscores); flags win over the file, the file over defaults.

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rco/episode.hpp"

namespace rco::cli {

enum class BackendKind { kScripted, kHttp };

}  // namespace rco::cli

namespace rco {
template <>
struct EnumNames<cli::BackendKind> {
  static constexpr std::array<std::pair<cli::BackendKind, std::string_view>, 2> kNames{{
      {cli::BackendKind::kScripted, "scripted"},
      {cli::BackendKind::kHttp, "http"},
  }};
};
}  // namespace rco

namespace rco::cli {

RCO_JSON_ENUM(BackendKind)

struct RunConfig {
  std::vector<std::string> scenarios;
  episode::Mode mode = episode::Mode::kRco;
  BackendKind backend = BackendKind::kScripted;
  std::string table;    // scripted backend table
  std::string prompts;  // optional template directory
  std::optional<double> latency_ms;  // overrides the scripted table latency
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string out = "results";
  std::vector<int> limits{1, 3, 5, 8};
  episode::EpisodeConfig episode;
};

/// Applies every key present in `j` on top of `cfg`. Unknown keys are
/// rejected so that typos do not silently fall back to defaults.
inline void apply_json(RunConfig& cfg, const Json& j) {
  using namespace json_detail;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> kKnown{
      "scenarios",      "mode",           "backend",        "table",        "prompts",
      "seed",           "jobs",           "out",            "limits",       "n_max",
      "k",              "shift_threshold", "ratio_threshold", "ratio_all_views", "replan_budget",
      "wait_cap",       "timeout_ms",     "delta_throttle", "delta_brake",  "penalties",
      "backend_constraints", "latency_ms"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    auto& orch = cfg.episode.orchestrator;
    if (j.contains("scenarios")) cfg.scenarios = j["scenarios"].get<std::vector<std::string>>();
    if (j.contains("mode")) cfg.mode = token<episode::Mode>(j, "mode");
    if (j.contains("backend")) cfg.backend = token<BackendKind>(j, "backend");
    if (j.contains("table")) cfg.table = j["table"].get<std::string>();
    if (j.contains("prompts")) cfg.prompts = j["prompts"].get<std::string>();
    if (j.contains("latency_ms")) cfg.latency_ms = number(j, "latency_ms");
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<unsigned>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("limits")) cfg.limits = j["limits"].get<std::vector<int>>();
    if (j.contains("n_max")) orch.planner.max_steps = j["n_max"].get<int>();
    if (j.contains("k")) orch.planner.history_len = orch.verifier.history_len = j["k"].get<int>();
    if (j.contains("shift_threshold")) orch.verifier.shift_threshold = number(j, "shift_threshold");
    if (j.contains("ratio_threshold")) orch.verifier.hazard_ratio_threshold = number(j, "ratio_threshold");
    if (j.contains("ratio_all_views")) orch.verifier.ratio_all_views = j["ratio_all_views"].get<bool>();
    if (j.contains("replan_budget")) orch.planner.replan_budget = j["replan_budget"].get<int>();
    if (j.contains("wait_cap")) orch.planner.wait_cap = j["wait_cap"].get<int>();
    if (j.contains("timeout_ms")) orch.planner.timeout_ms = j["timeout_ms"].get<int>();
    if (j.contains("delta_throttle")) orch.gains.delta_throttle = number(j, "delta_throttle");
    if (j.contains("delta_brake")) orch.gains.delta_brake = number(j, "delta_brake");
    if (j.contains("backend_constraints")) orch.backend_constraints = j["backend_constraints"].get<bool>();
    if (j.contains("penalties")) {
      const Json& p = j["penalties"];
      auto& pen = cfg.episode.penalties;
      pen.collision_pedestrian = p.value("collision_pedestrian", pen.collision_pedestrian);
      pen.collision_vehicle = p.value("collision_vehicle", pen.collision_vehicle);
      pen.collision_static = p.value("collision_static", pen.collision_static);
      pen.red_light = p.value("red_light", pen.red_light);
      pen.stop_sign = p.value("stop_sign", pen.stop_sign);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const SchemaViolation& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Json j = Json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw ConfigError(path + " is not valid JSON");
  return j;
}

/// Range checks and file existence; throws ConfigError.
inline void validate(const RunConfig& cfg, bool needs_backend) {
  if (cfg.scenarios.empty()) throw ConfigError("no scenarios given");
  for (const auto& s : cfg.scenarios) {
    if (!std::filesystem::exists(s)) throw ConfigError("no such scenario file or directory: " + s);
  }
  if (cfg.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (cfg.latency_ms && !(*cfg.latency_ms >= 0.0)) throw ConfigError("latency_ms must be non-negative");
  try {
    orchestrator::validate_config(cfg.episode.orchestrator);
    metrics::validate_penalties(cfg.episode.penalties);
  } catch (const OutOfRange& e) {
    throw ConfigError(std::string("override out of range: ") + e.what());
  }
  for (int n : cfg.limits) {
    if (n < 1) throw ConfigError("step limits must be positive");
  }
  if (needs_backend && cfg.backend == BackendKind::kScripted && !std::filesystem::is_regular_file(cfg.table)) {
    throw ConfigError("scripted backend table not found: '" + cfg.table + "'");
  }
  if (!cfg.prompts.empty() && !std::filesystem::is_directory(cfg.prompts)) {
    throw ConfigError("prompt directory not found: " + cfg.prompts);
  }
}

}  // namespace rco::cli
