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

// Hazard inference and short-term motion planning on top of a reasoning
// backend. Both stages are total: backend failures and malformed output
// degrade to stop-observe-move.

#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "rco/backend.hpp"
#include "rco/domain.hpp"
#include "rco/prompts.hpp"

namespace rco::planner {

struct PlannerConfig {
  int history_len = 5;
  int max_steps = 5;
  int wait_cap = 50;
  int replan_budget = 3;
  int timeout_ms = 10000;
  /// Half-width of the central image band treated as the driving path when
  /// summarizing where deficits sit.
  double path_band_half_width = 0.1;
};

inline const PlannerConfig& validate_config(const PlannerConfig& cfg) {
  if (cfg.history_len < 1) throw OutOfRange("history_len", cfg.history_len);
  if (cfg.max_steps < 1) throw OutOfRange("max_steps", cfg.max_steps);
  if (cfg.wait_cap < 1) throw OutOfRange("wait_cap", cfg.wait_cap);
  if (cfg.replan_budget < 1) throw OutOfRange("replan_budget", cfg.replan_budget);
  if (cfg.timeout_ms < 1) throw OutOfRange("timeout_ms", cfg.timeout_ms);
  return cfg;
}

/// What the planner knows about the episode beyond perception.
struct PlanningContext {
  std::string scenario_key;
  const prompts::Templates* templates = nullptr;
};

/// Coarse location of the current deficits: "path" when a front-view deficit
/// overlaps the central band, "side" for any other deficit, "clear" otherwise.
inline std::string situation_tag(const EnvironmentSnapshot& s, double band_half_width = 0.1) {
  bool any = false;
  for (const auto& cv : s.perception) {
    for (const auto& d : cv.deficits) {
      any = true;
      if (cv.view == View::kFront && d.box.x1 > 0.5 - band_half_width && d.box.x0 < 0.5 + band_half_width) {
        return "path";
      }
    }
  }
  return any ? "side" : "clear";
}

/// Snapshot JSON with ground-truth mask ids removed.
inline Json planner_json(const EnvironmentSnapshot& s) {
  Json j = s;
  for (auto& cv : j["perception"]) {
    for (auto& d : cv["deficits"]) d.erase("masked_object_id");
  }
  return j;
}

inline Json base_payload(const PlanningContext& ctx, std::span<const EnvironmentSnapshot> history,
                         const PlannerConfig& cfg) {
  Json payload;
  payload["scenario_key"] = ctx.scenario_key;
  payload["situation"] = history.empty() ? "clear" : situation_tag(history.back(), cfg.path_band_half_width);
  payload["tick"] = history.empty() ? 0L : history.back().tick;
  return payload;
}

struct HazardInference {
  HazardSet hazards;
  Strategy strategy = Strategy::kStopObserveMove;
  bool fell_back = false;
  std::string diagnostic;
  double latency_ms = 0.0;
};

inline HazardInference infer_hazards(std::span<const EnvironmentSnapshot> history, backend::ReasoningBackend& reasoner,
                                     const PlanningContext& ctx, const PlannerConfig& cfg = {}) {
  const prompts::Templates defaults;
  const prompts::Templates& t = ctx.templates ? *ctx.templates : defaults;

  Json payload = base_payload(ctx, history, cfg);
  payload["history"] = Json::array();
  for (const auto& s : history) payload["history"].push_back(planner_json(s));

  backend::BackendRequest req{backend::Purpose::kHazardAndPlan,
                              prompts::render(t.hazard, {{"history", prompts::describe_history(history)}}),
                              std::move(payload), cfg.timeout_ms};
  HazardInference out;
  try {
    backend::BackendResponse resp = reasoner.call(req);
    out.latency_ms = resp.latency_ms;
    const auto* report = std::get_if<backend::HazardReport>(&resp.parsed);
    if (report == nullptr) throw backend::BackendError(backend::BackendError::Kind::kSchemaViolation, "wrong purpose");
    out.hazards = report->hazards;
    out.strategy = report->strategy;
  } catch (const Error& e) {
    out = HazardInference{{}, Strategy::kStopObserveMove, true, e.what(), out.latency_ms};
  }
  return out;
}

struct PlanResult {
  MotionPlan plan;
  bool truncated = false;
  bool fell_back = false;
  std::string diagnostic;
  double latency_ms = 0.0;
};

inline MotionPlan fallback_plan(const PlannerConfig& cfg) {
  return {WaitPlan{cfg.wait_cap, ExecutionCondition::kConsistentNoImmediateHazard}};
}

inline std::string hazards_text(const HazardSet& hazards) {
  if (hazards.empty()) return "none";
  std::string s;
  for (const auto& h : hazards) {
    if (!s.empty()) s += "; ";
    s += std::string(to_string(h.object)) + ", " + std::string(to_string(h.motion));
  }
  return s;
}

/// Short-term motion planning. A move plan keeps at most max_steps pairs
/// (prefix); a wait is capped at wait_cap. The backend must answer with the
/// strategy chosen by hazard inference; anything else falls back.
inline PlanResult plan_motion(const HazardSet& hazards, Strategy strategy, const Navi& navi,
                              const EnvironmentSnapshot& current, backend::ReasoningBackend& reasoner,
                              const PlanningContext& ctx, const PlannerConfig& cfg = {}) {
  const prompts::Templates defaults;
  const prompts::Templates& t = ctx.templates ? *ctx.templates : defaults;

  const EnvironmentSnapshot one[] = {current};
  Json payload = base_payload(ctx, one, cfg);
  payload["hazards"] = hazards;
  payload["strategy"] = strategy;
  payload["navi"] = navi;
  payload["perception"] = planner_json(current)["perception"];

  const std::string prompt = prompts::render(t.motion, {{"hazards", hazards_text(hazards)},
                                                        {"strategy", std::string(to_string(strategy))},
                                                        {"navi", Json(navi).dump()},
                                                        {"perception", prompts::describe_frame(current)},
                                                        {"max_steps", std::to_string(cfg.max_steps)},
                                                        {"wait_cap", std::to_string(cfg.wait_cap)}});

  PlanResult out;
  try {
    backend::BackendResponse resp = reasoner.call({backend::Purpose::kShortTermMotion, prompt, std::move(payload), cfg.timeout_ms});
    out.latency_ms = resp.latency_ms;
    const auto* skel = std::get_if<backend::PlanSkeleton>(&resp.parsed);
    if (skel == nullptr) throw backend::BackendError(backend::BackendError::Kind::kSchemaViolation, "wrong purpose");
    if (skel->strategy() != strategy) {
      throw backend::BackendError(backend::BackendError::Kind::kSchemaViolation, "strategy differs from hazard inference");
    }
    if (const auto* pairs = std::get_if<std::vector<ConditionActionPair>>(&skel->body)) {
      if (pairs->empty()) throw backend::BackendError(backend::BackendError::Kind::kSchemaViolation, "empty move plan");
      const std::size_t n = std::min(pairs->size(), static_cast<std::size_t>(cfg.max_steps));
      out.truncated = pairs->size() > n;
      std::vector<ConditionActionPair> kept(pairs->begin(), pairs->begin() + static_cast<std::ptrdiff_t>(n));
      out.plan = {MovePlan{ActionSequence(std::move(kept), current.tick, static_cast<std::size_t>(cfg.max_steps))}};
    } else {
      WaitPlan w = std::get<WaitPlan>(skel->body);
      out.truncated = w.wait_ticks > cfg.wait_cap;
      w.wait_ticks = std::min(w.wait_ticks, cfg.wait_cap);
      out.plan = {w};
    }
  } catch (const Error& e) {
    const double latency = out.latency_ms;
    out = PlanResult{fallback_plan(cfg), false, true, e.what(), latency};
  }
  return out;
}

inline ExecutionCondition complement(ExecutionCondition c) {
  return c == ExecutionCondition::kConsistentNoImmediateHazard ? ExecutionCondition::kConsistentImmediateHazard
                                                               : ExecutionCondition::kConsistentNoImmediateHazard;
}

struct Expansion {
  ActionSequence sequence;
  bool truncated = false;
};

/// Stop-observe-move as a queue of stop pairs, one per waiting tick. Each
/// pair is guarded by the complement of the move trigger; the orchestrator
/// re-stamps the guard with the live consistent classification, so a waiting
/// stop runs under either consistent state and only inconsistency replans.
inline Expansion expand_stop_observe_move(const MotionPlan& plan, int wait_cap, long created_tick = 0) {
  const WaitPlan* w = plan.wait();
  if (w == nullptr) throw WrongStrategy();
  const int n = std::clamp(w->wait_ticks, 0, wait_cap);
  const ConditionActionPair stop{complement(w->move_trigger),
                                 HighLevelAction(Behavior::kStop, SpeedControl::kDecelerationToZero)};
  return {ActionSequence(std::vector<ConditionActionPair>(static_cast<std::size_t>(n), stop), created_tick,
                         static_cast<std::size_t>(wait_cap)),
          w->wait_ticks > wait_cap};
}

}  // namespace rco::planner
