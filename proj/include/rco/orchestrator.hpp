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

// The control-override loop. While a perception deficit is present the
// orchestrator owns actuation: it keeps a queue of condition-action pairs,
// verifies the head against the live classification each tick, executes it
// through the control mapping and the safety envelope, and replans when the
// queue runs dry or the head is denied. Every path that cannot produce a
// verified action emits the fail-safe stop.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rco/backend.hpp"
#include "rco/controlmap.hpp"
#include "rco/domain.hpp"
#include "rco/planner.hpp"
#include "rco/prompts.hpp"
#include "rco/safety.hpp"
#include "rco/verifier.hpp"

namespace rco::orchestrator {

inline constexpr int kDecisionLogSchema = 1;

enum class Source {
  kBaseAgent,
  kVerifiedPair,
  kWaitExtension,
  kFailsafePending,
  kFailsafeDenied,
  kFailsafeBudget,
  kFailsafeError,
  kAlwaysStop,
};

}  // namespace rco::orchestrator

namespace rco {
template <>
struct EnumNames<orchestrator::Source> {
  static constexpr std::array<std::pair<orchestrator::Source, std::string_view>, 8> kNames{{
      {orchestrator::Source::kBaseAgent, "base_agent"},
      {orchestrator::Source::kVerifiedPair, "verified_pair"},
      {orchestrator::Source::kWaitExtension, "wait_extension"},
      {orchestrator::Source::kFailsafePending, "failsafe_pending"},
      {orchestrator::Source::kFailsafeDenied, "failsafe_denied"},
      {orchestrator::Source::kFailsafeBudget, "failsafe_budget"},
      {orchestrator::Source::kFailsafeError, "failsafe_error"},
      {orchestrator::Source::kAlwaysStop, "always_stop"},
  }};
};
}  // namespace rco

namespace rco::orchestrator {

RCO_JSON_ENUM(Source)

inline bool is_failsafe(Source s) {
  return s == Source::kFailsafePending || s == Source::kFailsafeDenied || s == Source::kFailsafeBudget ||
         s == Source::kFailsafeError || s == Source::kAlwaysStop;
}

struct OrchestratorConfig {
  planner::PlannerConfig planner;
  verifier::VerifierConfig verifier;
  control::ControlConfig control;
  safety::SafetyGains gains;
  bool backend_constraints = true;  // ask the backend for the envelope
  long constraints_ttl_ticks = 50;  // refresh the envelope at least this often
};

inline const OrchestratorConfig& validate_config(const OrchestratorConfig& cfg) {
  planner::validate_config(cfg.planner);
  verifier::validate_config(cfg.verifier);
  safety::validate_gains(cfg.gains);
  if (cfg.constraints_ttl_ticks < 1) throw OutOfRange("constraints_ttl_ticks", cfg.constraints_ttl_ticks);
  return cfg;
}

struct Dependencies {
  backend::ReasoningBackend* backend = nullptr;
  const prompts::Templates* templates = nullptr;
  std::string scenario_key;
};

/// Stop-observe-move bookkeeping. `planned` stop ticks are mandatory; after
/// that the wait continues while the live classification differs from the
/// trigger, up to wait_cap ticks in total.
struct WaitState {
  ExecutionCondition move_trigger = ExecutionCondition::kConsistentNoImmediateHazard;
  int planned = 0;
  int waited = 0;
};

/// A plan whose simulated backend latency has not elapsed yet.
struct PendingPlan {
  long ready_tick = 0;
  MotionPlan plan;
  bool truncated = false;
};

struct OverrideState {
  ActionSequence sequence;
  int consecutive_replans = 0;
  bool active = false;
  Action prev_action{0.0, 0.0, 0.0};

  std::optional<WaitState> waiting;
  std::optional<PendingPlan> pending;
  control::SteerControllerState controller;

  std::optional<SafetyConstraints> constraints;
  std::string constraints_context;
  long constraints_tick = 0;

  long planning_events = 0;
  long planning_calls = 0;    // hazard inference + motion planning
  long constraint_calls = 0;  // envelope generation
};

/// Hands actuation to the override when a deficit appears and back to the
/// base agent when it clears. Throttle memory and the envelope cache survive
/// both transitions; everything plan-related starts fresh.
inline OverrideState engage(bool deficit_present, OverrideState s) {
  if (deficit_present == s.active) return s;
  s.active = deficit_present;
  s.sequence.clear();
  s.consecutive_replans = 0;
  s.waiting.reset();
  s.pending.reset();
  s.controller = s.controller.reset();
  return s;
}

struct TickInput {
  long tick = 0;
  std::span<const EnvironmentSnapshot> history;  // oldest first, current frame last
  Pose ego;
  VehicleMeasurements measurements;
  double dt = 0.1;

  const EnvironmentSnapshot& current() const { return history.back(); }
};

struct DecisionRecord {
  long tick = 0;
  bool active = false;
  Source source = Source::kBaseAgent;
  std::optional<verifier::Classification> classification;
  std::optional<verifier::Verdict> verdict;
  std::optional<ConditionActionPair> pair;
  std::optional<Action> resolved;  // before the safety envelope
  Action emitted{0.0, 0.0, 0.0};
  VehicleMeasurements measurements;
  std::optional<SafetyConstraints> constraints;
  std::vector<safety::Constraint> triggered;
  int planning_events = 0;
  int backend_calls = 0;
  std::size_t sequence_len = 0;
  std::optional<Strategy> strategy;
  bool direction_mismatch = false;
  bool truncated = false;
  std::vector<std::string> diagnostics;
};

inline void to_json(Json& j, const DecisionRecord& r) {
  auto opt = [](const auto& o) { return o ? Json(*o) : Json(nullptr); };
  j = Json{{"schema", kDecisionLogSchema},
           {"tick", r.tick},
           {"active", r.active},
           {"source", r.source},
           {"classification", opt(r.classification)},
           {"verdict", opt(r.verdict)},
           {"pair", opt(r.pair)},
           {"resolved", opt(r.resolved)},
           {"emitted", r.emitted},
           {"measurements", r.measurements},
           {"constraints", opt(r.constraints)},
           {"triggered", r.triggered},
           {"planning_events", r.planning_events},
           {"backend_calls", r.backend_calls},
           {"sequence_len", r.sequence_len},
           {"strategy", opt(r.strategy)},
           {"direction_mismatch", r.direction_mismatch},
           {"truncated", r.truncated},
           {"diagnostics", r.diagnostics}};
}

inline void from_json(const Json& j, DecisionRecord& r) {
  using namespace json_detail;
  if (integer(j, "schema") != kDecisionLogSchema) throw SchemaViolation("schema", "unsupported decision log schema");
  auto opt = [&j]<typename T>(const char* key, std::optional<T>& into) {
    auto it = j.find(key);
    into = (it == j.end() || it->is_null()) ? std::nullopt : std::optional<T>(it->template get<T>());
  };
  r.tick = integer(j, "tick");
  r.active = at(j, "active").get<bool>();
  r.source = token<Source>(j, "source");
  opt("classification", r.classification);
  opt("verdict", r.verdict);
  opt("pair", r.pair);
  opt("resolved", r.resolved);
  r.emitted = at(j, "emitted").get<Action>();
  r.measurements = at(j, "measurements").get<VehicleMeasurements>();
  opt("constraints", r.constraints);
  r.triggered = at(j, "triggered").get<std::vector<safety::Constraint>>();
  r.planning_events = static_cast<int>(integer(j, "planning_events"));
  r.backend_calls = static_cast<int>(integer(j, "backend_calls"));
  r.sequence_len = static_cast<std::size_t>(integer(j, "sequence_len"));
  opt("strategy", r.strategy);
  r.direction_mismatch = j.value("direction_mismatch", false);
  r.truncated = j.value("truncated", false);
  r.diagnostics = j.value("diagnostics", std::vector<std::string>{});
}

struct StepOutput {
  Action action;
  OverrideState state;
  DecisionRecord record;
};

namespace detail {

inline std::string constraints_context(const Navi& navi, const Surrounding& s) {
  const bool close = s.nearest_obstacle_m && *s.nearest_obstacle_m < safety::kCloseObstacleM;
  return std::string(to_string(s.weather)) + "|" + std::string(to_string(s.daylight)) + "|" +
         std::string(to_string(s.traffic_density)) + "|" + std::string(to_string(navi.road_geometry)) +
         (close ? "|close" : "|open");
}

class Stepper {
 public:
  Stepper(OverrideState s, const TickInput& in, const Dependencies& deps, const OrchestratorConfig& cfg)
      : s_(std::move(s)), in_(in), deps_(deps), cfg_(cfg) {
    rec_.tick = in.tick;
    rec_.active = s_.active;
    rec_.measurements = in.measurements;
  }

  StepOutput run() {
    try {
      classify();
      decide();
    } catch (const Error& e) {
      rec_.diagnostics.push_back(e.what());
      s_.sequence.clear();
      s_.waiting.reset();
      s_.pending.reset();
      failsafe(Source::kFailsafeError);
    }
    s_.prev_action = rec_.emitted;
    rec_.sequence_len = s_.sequence.size();
    return {rec_.emitted, std::move(s_), std::move(rec_)};
  }

 private:
  void classify() {
    const auto& h = in_.history;
    const std::size_t k = std::min(h.size(), static_cast<std::size_t>(cfg_.verifier.history_len));
    cls_ = k < 2 ? verifier::Classification::kReplan : verifier::classify_condition(h.last(k), cfg_.verifier);
    rec_.classification = cls_;
  }

  void decide() {
    if (s_.pending) {
      if (in_.tick < s_.pending->ready_tick) return failsafe(Source::kFailsafePending);
      install(*s_.pending);
      s_.pending.reset();
    }
    int requests = 0;
    bool denied = false;
    while (true) {
      if (s_.sequence.empty()) {
        if (wait_continues()) return emit_wait_extension();
        if (requests >= 2) return failsafe(denied ? Source::kFailsafeDenied : Source::kFailsafeError);
        ++requests;
        s_.waiting.reset();
        if (!request_plan()) return failsafe(Source::kFailsafePending);
        continue;
      }
      ConditionActionPair pair = s_.sequence.front();
      if (s_.waiting && cls_ != verifier::Classification::kReplan) pair.condition = *verifier::as_condition(cls_);
      rec_.pair = pair;
      rec_.verdict = verifier::verify(pair, cls_);
      if (*rec_.verdict == verifier::Verdict::kExecute) {
        s_.sequence.pop_front();
        s_.consecutive_replans = 0;
        if (s_.waiting) ++s_.waiting->waited;
        return execute(pair, Source::kVerifiedPair);
      }
      s_.sequence.clear();
      s_.waiting.reset();
      if (s_.consecutive_replans >= cfg_.planner.replan_budget) {
        s_.consecutive_replans = 0;
        return failsafe(Source::kFailsafeBudget);
      }
      ++s_.consecutive_replans;
      denied = true;
      if (requests >= 2) return failsafe(Source::kFailsafeDenied);
    }
  }

  bool wait_continues() const {
    if (!s_.waiting || cls_ == verifier::Classification::kReplan) return false;
    const WaitState& w = *s_.waiting;
    if (w.waited < w.planned) return true;
    return w.waited < cfg_.planner.wait_cap && *verifier::as_condition(cls_) != w.move_trigger;
  }

  void emit_wait_extension() {
    ++s_.waiting->waited;
    const ConditionActionPair pair{*verifier::as_condition(cls_),
                                   HighLevelAction(Behavior::kStop, SpeedControl::kDecelerationToZero)};
    rec_.pair = pair;
    rec_.verdict = verifier::verify(pair, cls_);
    execute(pair, Source::kWaitExtension);
  }

  void execute(const ConditionActionPair& pair, Source source) {
    const Navi& navi = in_.current().navi;
    const control::ResolvedAction r =
        control::resolve_action(pair.action, s_.prev_action, in_.ego, navi, s_.controller, in_.dt, cfg_.control);
    s_.controller = r.controller;
    const SafetyConstraints sc =
        s_.constraints ? *s_.constraints : safety::default_constraints(navi, in_.current().surrounding);
    rec_.source = source;
    rec_.resolved = r.action;
    rec_.constraints = sc;
    rec_.triggered = safety::triggered_constraints(in_.measurements, sc);
    rec_.emitted = safety::apply_constraints(r.action, in_.measurements, sc, cfg_.gains);
    rec_.direction_mismatch = r.direction_mismatch;
  }

  void failsafe(Source source) {
    rec_.source = source;
    rec_.emitted = kFailSafeStop;
  }

  void refresh_constraints() {
    const EnvironmentSnapshot& cur = in_.current();
    const std::string ctx = constraints_context(cur.navi, cur.surrounding);
    if (s_.constraints && ctx == s_.constraints_context && in_.tick - s_.constraints_tick < cfg_.constraints_ttl_ticks) {
      return;
    }
    safety::GeneratedConstraints g;
    if (cfg_.backend_constraints && deps_.backend != nullptr) {
      const prompts::Templates defaults;
      const prompts::Templates& t = deps_.templates ? *deps_.templates : defaults;
      Json payload = planner::base_payload({deps_.scenario_key, deps_.templates}, in_.history.last(1), cfg_.planner);
      payload["navi"] = cur.navi;
      payload["surrounding"] = cur.surrounding;
      const std::string prompt =
          prompts::render(t.safety, {{"navi", Json(cur.navi).dump()}, {"surrounding", Json(cur.surrounding).dump()}});
      g = safety::generate_constraints(cur.navi, cur.surrounding, deps_.backend, prompt, std::move(payload),
                                       cfg_.planner.timeout_ms);
      ++s_.constraint_calls;
      ++rec_.backend_calls;
    } else {
      g = {safety::default_constraints(cur.navi, cur.surrounding), false, "backend constraints disabled"};
    }
    if (!g.diagnostic.empty()) rec_.diagnostics.push_back("constraints: " + g.diagnostic);
    s_.constraints = g.constraints;
    s_.constraints_context = ctx;
    s_.constraints_tick = in_.tick;
  }

  /// One planning event. Returns true when the plan is installed right away,
  /// false when it waits out its latency.
  bool request_plan() {
    if (deps_.backend == nullptr) throw ConfigError("override engaged without a reasoning backend");
    ++s_.planning_events;
    ++rec_.planning_events;
    refresh_constraints();

    const planner::PlanningContext ctx{deps_.scenario_key, deps_.templates};
    const std::size_t k = std::min(in_.history.size(), static_cast<std::size_t>(cfg_.planner.history_len));
    const planner::HazardInference hi = planner::infer_hazards(in_.history.last(k), *deps_.backend, ctx, cfg_.planner);
    const planner::PlanResult pr = planner::plan_motion(hi.hazards, hi.strategy, in_.current().navi, in_.current(),
                                                        *deps_.backend, ctx, cfg_.planner);
    s_.planning_calls += 2;
    rec_.backend_calls += 2;
    if (hi.fell_back) rec_.diagnostics.push_back("hazards: " + hi.diagnostic);
    if (pr.fell_back) rec_.diagnostics.push_back("plan: " + pr.diagnostic);
    rec_.strategy = pr.plan.strategy();
    rec_.truncated = rec_.truncated || pr.truncated;

    const double latency_ms = hi.latency_ms + pr.latency_ms;
    const long delay = static_cast<long>(std::ceil(latency_ms / (in_.dt * 1000.0) - 1e-9));
    PendingPlan p{in_.tick + std::max(0L, delay), pr.plan, pr.truncated};
    if (p.ready_tick <= in_.tick) {
      install(p);
      return true;
    }
    s_.pending = std::move(p);
    return false;
  }

  void install(const PendingPlan& p) {
    s_.waiting.reset();
    const auto n_max = static_cast<std::size_t>(cfg_.planner.max_steps);
    if (const MovePlan* m = p.plan.move()) {
      std::vector<ConditionActionPair> pairs(m->sequence.pairs().begin(), m->sequence.pairs().end());
      if (pairs.size() > n_max) pairs.resize(n_max);
      s_.sequence = ActionSequence(std::move(pairs), in_.tick, n_max);
      return;
    }
    // The first n_max stop ticks go through the queue; the remainder of the
    // wait is served by wait extensions.
    const planner::Expansion e = planner::expand_stop_observe_move(p.plan, cfg_.planner.wait_cap, in_.tick);
    const auto& all = e.sequence.pairs();
    const std::size_t keep = std::min(all.size(), n_max);
    s_.sequence = ActionSequence(std::vector<ConditionActionPair>(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep)),
                                 in_.tick, n_max);
    s_.waiting = WaitState{p.plan.wait()->move_trigger, static_cast<int>(all.size()), 0};
    rec_.truncated = rec_.truncated || e.truncated;
  }

  OverrideState s_;
  const TickInput& in_;
  const Dependencies& deps_;
  const OrchestratorConfig& cfg_;
  DecisionRecord rec_;
  verifier::Classification cls_ = verifier::Classification::kReplan;
};

}  // namespace detail

/// One override tick. Must only be called while the state is active; the
/// returned action always satisfies the actuator range invariants.
inline StepOutput step(OverrideState state, const TickInput& in, const Dependencies& deps,
                       const OrchestratorConfig& cfg) {
  if (in.history.empty()) throw InsufficientHistory(0);
  return detail::Stepper(std::move(state), in, deps, cfg).run();
}

}  // namespace rco::orchestrator
