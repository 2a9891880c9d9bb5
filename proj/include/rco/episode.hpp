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

// Closed-loop episode runner, suite runner and step-limit sweep.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rco/metrics.hpp"
#include "rco/orchestrator.hpp"
#include "rco/simenv.hpp"

namespace rco::episode {

enum class Mode { kBaseline, kRco, kAlwaysStop };

}  // namespace rco::episode

namespace rco {
template <>
struct EnumNames<episode::Mode> {
  static constexpr std::array<std::pair<episode::Mode, std::string_view>, 3> kNames{{
      {episode::Mode::kBaseline, "baseline"},
      {episode::Mode::kRco, "rco"},
      {episode::Mode::kAlwaysStop, "always_stop"},
  }};
};
}  // namespace rco

namespace rco::episode {

RCO_JSON_ENUM(Mode)

struct EpisodeConfig {
  orchestrator::OrchestratorConfig orchestrator;
  metrics::Penalties penalties;
  sim::BaseAgentConfig base_agent;
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
};

struct EpisodeOutput {
  metrics::EpisodeResult result;
  std::vector<orchestrator::DecisionRecord> log;
  std::vector<Vec2> trajectory;
};

using BackendFactory = std::function<std::unique_ptr<backend::ReasoningBackend>()>;

inline EpisodeOutput run_episode(std::shared_ptr<const sim::Scenario> sc, Mode mode,
                                 backend::ReasoningBackend* reasoner, const prompts::Templates* templates,
                                 const EpisodeConfig& cfg) {
  orchestrator::validate_config(cfg.orchestrator);
  metrics::validate_penalties(cfg.penalties);
  if (mode == Mode::kRco && reasoner == nullptr) throw ConfigError("rco mode needs a reasoning backend");

  const sim::DeficitPolicy& policy = sc->deficit_policy;
  const orchestrator::Dependencies deps{reasoner, templates, sc->script_key};
  const std::size_t window = static_cast<std::size_t>(
      std::max(cfg.orchestrator.planner.history_len, cfg.orchestrator.verifier.history_len));

  EpisodeOutput out;
  sim::WorldState w = sim::initial_world(sc, cfg.seed);
  std::vector<EnvironmentSnapshot> history;
  orchestrator::OverrideState state;
  std::vector<sim::InfractionEvent> events;
  const double length = sc->route.length();
  out.trajectory.push_back(w.ego.pose.position());

  while (w.tick < sc->time_limit_ticks) {
    history.push_back(sim::perceive(w, policy));
    if (history.size() > window) history.erase(history.begin());
    const VehicleMeasurements m = sim::measure(w);
    const bool deficit = history.back().has_deficit();

    orchestrator::DecisionRecord rec;
    rec.tick = w.tick;
    rec.measurements = m;
    auto base = [&] {
      rec.source = orchestrator::Source::kBaseAgent;
      rec.emitted = sim::base_agent(w, policy, cfg.base_agent);
    };
    switch (mode) {
      case Mode::kBaseline:
        base();
        break;
      case Mode::kAlwaysStop:
        if (deficit) {
          rec.source = orchestrator::Source::kAlwaysStop;
          rec.emitted = kFailSafeStop;
        } else {
          base();
        }
        break;
      case Mode::kRco:
        state = orchestrator::engage(deficit, std::move(state));
        if (state.active) {
          const orchestrator::TickInput in{w.tick, history, w.ego.pose, m, w.dt};
          orchestrator::StepOutput so = orchestrator::step(std::move(state), in, deps, cfg.orchestrator);
          state = std::move(so.state);
          rec = std::move(so.record);
          ++out.result.override_ticks;
        } else {
          base();
        }
        break;
    }
    state.prev_action = rec.emitted;
    rec.active = state.active && mode == Mode::kRco;

    sim::WorldState next = sim::tick(w, rec.emitted);
    for (auto& e : sim::detect_infractions(w, next)) events.push_back(e);
    w = std::move(next);
    out.trajectory.push_back(w.ego.pose.position());
    out.log.push_back(std::move(rec));
    if (length - w.max_progress_s <= 0.5) {
      out.result.route_completed = true;
      break;
    }
  }

  metrics::EpisodeResult& r = out.result;
  r.scenario = sc->name;
  r.mode = std::string(to_string(mode));
  r.ticks = w.tick;
  r.game_time_s = w.time_s();
  r.rc = r.route_completed ? 100.0 : metrics::route_completion(length, w.max_progress_s);
  r.infractions = events;
  r.is_score = metrics::infraction_score(events, policy, cfg.penalties);
  r.ds = metrics::driving_score(r.rc, r.is_score);
  r.as_speed = r.game_time_s > 0.0 ? metrics::average_speed(length * r.rc / 100.0, r.game_time_s) : 0.0;
  r.planning_events = state.planning_events;
  r.backend_calls = state.planning_calls + state.constraint_calls;
  return out;
}

/// Runs every scenario, up to `jobs` at a time. Each episode gets its own
/// backend instance; results come back in scenario order.
inline std::vector<EpisodeOutput> run_suite(const std::vector<std::shared_ptr<const sim::Scenario>>& scenarios,
                                            Mode mode, const BackendFactory& make_backend,
                                            const prompts::Templates* templates, const EpisodeConfig& cfg,
                                            unsigned jobs = 1) {
  std::vector<EpisodeOutput> results(scenarios.size());
  std::vector<std::exception_ptr> errors(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        std::unique_ptr<backend::ReasoningBackend> b = make_backend ? make_backend() : nullptr;
        results[i] = run_episode(scenarios[i], mode, b.get(), templates, cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, scenarios.size()))));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

inline std::vector<metrics::EpisodeResult> results_of(const std::vector<EpisodeOutput>& outs) {
  std::vector<metrics::EpisodeResult> r;
  r.reserve(outs.size());
  for (const auto& o : outs) r.push_back(o.result);
  return r;
}

struct SweepRow {
  int n_max = 0;
  metrics::Aggregate rco;
  metrics::Aggregate baseline;
};

inline std::vector<SweepRow> sweep_step_limit(const std::vector<std::shared_ptr<const sim::Scenario>>& scenarios,
                                              const std::vector<int>& limits, const BackendFactory& make_backend,
                                              const prompts::Templates* templates, const EpisodeConfig& cfg,
                                              unsigned jobs = 1) {
  if (limits.empty()) throw ConfigError("sweep needs at least one step limit");
  const auto base = results_of(run_suite(scenarios, Mode::kBaseline, nullptr, templates, cfg, jobs));
  const metrics::Aggregate base_agg = metrics::aggregate(base);
  std::vector<SweepRow> rows;
  for (int n : limits) {
    EpisodeConfig c = cfg;
    c.orchestrator.planner.max_steps = n;
    const auto res = results_of(run_suite(scenarios, Mode::kRco, make_backend, templates, c, jobs));
    rows.push_back({n, metrics::aggregate(res), base_agg});
  }
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  using metrics::fmt6;
  std::string out = "n_max,rc,is,ds,as,delta_rc,delta_is,delta_ds\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n_max) + "," + fmt6(r.rco.rc) + "," + fmt6(r.rco.is_score) + "," + fmt6(r.rco.ds) + "," +
           fmt6(r.rco.as_speed) + "," + fmt6(r.rco.rc - r.baseline.rc) + "," +
           fmt6(r.rco.is_score - r.baseline.is_score) + "," + fmt6(r.rco.ds - r.baseline.ds) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decision logs

inline std::string decision_log_jsonl(const std::vector<orchestrator::DecisionRecord>& log) {
  std::string out;
  for (const auto& r : log) {
    out += Json(r).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<orchestrator::DecisionRecord> parse_decision_log(const std::string& text) {
  std::vector<orchestrator::DecisionRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) throw SchemaViolation("line " + std::to_string(lineno), "not JSON");
    try {
      out.push_back(j.get<orchestrator::DecisionRecord>());
    } catch (const SchemaViolation& e) {
      throw SchemaViolation("line " + std::to_string(lineno) + "/" + e.where(), e.what());
    } catch (const nlohmann::json::exception& e) {
      throw SchemaViolation("line " + std::to_string(lineno), e.what());
    }
  }
  return out;
}

/// One human-readable line per tick.
inline std::string render_trace(const std::vector<orchestrator::DecisionRecord>& log) {
  std::string out;
  char buf[256];
  for (const auto& r : log) {
    std::snprintf(buf, sizeof buf, "t=%5ld %-4s %-16s", r.tick, r.active ? "RCO" : "base",
                  std::string(to_string(r.source)).c_str());
    out += buf;
    if (r.classification) out += " cls=" + std::string(to_string(*r.classification));
    if (r.verdict) out += " " + std::string(to_string(*r.verdict));
    if (r.pair) {
      out += " pair=(" + std::string(to_string(r.pair->condition)) + ", " +
             std::string(to_string(r.pair->action.behavior)) + ", " + std::string(to_string(r.pair->action.speed)) +
             ")";
    }
    std::snprintf(buf, sizeof buf, " act=(%.3f, %.3f, %+.3f) v=%.2f", r.emitted.throttle(), r.emitted.brake(),
                  r.emitted.steer(), r.measurements.v);
    out += buf;
    if (!r.triggered.empty()) {
      out += " limits=";
      for (std::size_t i = 0; i < r.triggered.size(); ++i) {
        out += (i ? "," : "") + std::string(to_string(r.triggered[i]));
      }
    }
    if (r.planning_events > 0) out += " plan=" + std::to_string(r.planning_events);
    if (r.strategy) out += " strategy=" + std::string(to_string(*r.strategy));
    out += " seq=" + std::to_string(r.sequence_len);
    out += '\n';
  }
  return out;
}

inline std::vector<std::string> scenario_files(const std::string& path) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(path)) {
    files.push_back(path);
  } else {
    throw ConfigError("no such scenario file or directory: " + path);
  }
  return files;
}

inline std::vector<std::shared_ptr<const sim::Scenario>> load_scenarios(const std::vector<std::string>& paths) {
  std::vector<std::shared_ptr<const sim::Scenario>> out;
  for (const auto& p : paths) {
    for (const auto& f : scenario_files(p)) out.push_back(std::make_shared<const sim::Scenario>(sim::load_scenario(f)));
  }
  return out;
}

}  // namespace rco::episode
