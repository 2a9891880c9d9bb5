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

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rco/rco.hpp"

namespace rco::testing_util {

inline std::string source_path(const std::string& rel) { return std::string(RCO_SOURCE_DIR) + "/" + rel; }

inline std::shared_ptr<const sim::Scenario> bundled(const std::string& name) {
  return std::make_shared<const sim::Scenario>(sim::load_scenario(source_path("scenarios/" + name + ".json")));
}

inline backend::ScriptedBackend bundled_table() {
  return backend::ScriptedBackend::load(source_path("data/scripted_backend.json"));
}

/// Snapshot with the given front-view deficit boxes.
inline EnvironmentSnapshot front_deficits(long tick, const std::vector<Rect>& boxes) {
  EnvironmentSnapshot s;
  s.tick = tick;
  for (const Rect& r : boxes) s.view(View::kFront).deficits.push_back({View::kFront, r, std::nullopt});
  return s;
}

inline Rect square_at(double cx, double cy, double half) { return {cx - half, cy - half, cx + half, cy + half}; }

/// Straight route along +x with an empty world.
inline sim::Scenario straight_scenario(double length = 200.0) {
  sim::Scenario sc;
  sc.name = "straight";
  sc.script_key = "none";
  sc.route = sim::Route({{0.0, 0.0}, {length, 0.0}}, {RoadGeometry::kStraight});
  sc.time_limit_ticks = 600;
  return sc;
}

/// Answers each purpose with a fixed text, or throws a fixed error kind.
class CannedBackend : public backend::ReasoningBackend {
 public:
  void answer(backend::Purpose p, std::string text) { text_[p] = std::move(text); }
  void fail_with(backend::BackendError::Kind k) { failure_ = k; }
  void set_latency_ms(double ms) { latency_ms_ = ms; }
  int calls() const { return calls_; }

  backend::BackendResponse call(const backend::BackendRequest& req) override {
    ++calls_;
    if (failure_) throw backend::BackendError(*failure_, "canned failure");
    auto it = text_.find(req.purpose);
    if (it == text_.end()) throw backend::BackendError(backend::BackendError::Kind::kSchemaViolation, "no answer");
    try {
      return {it->second, backend::parse_structured(it->second, req.purpose), latency_ms_};
    } catch (const SchemaViolation& e) {
      throw backend::BackendError(backend::BackendError::Kind::kSchemaViolation, e.what());
    }
  }

 private:
  std::map<backend::Purpose, std::string> text_;
  std::optional<backend::BackendError::Kind> failure_;
  double latency_ms_ = 0.0;
  int calls_ = 0;
};

/// Move-plan response with n copies of one pair.
inline std::string move_plan_text(int n, const char* condition = "consistent_no_immediate_hazard",
                                  const char* behavior = "move_forward", const char* speed = "constant_speed") {
  std::string pairs;
  for (int i = 0; i < n; ++i) {
    if (i) pairs += ",";
    pairs += std::string("{\"condition\":\"") + condition + "\",\"behavior\":\"" + behavior + "\",\"speed\":\"" +
             speed + "\"}";
  }
  return "{\"strategy\":\"move\",\"pairs\":[" + pairs + "]}";
}

inline std::string wait_plan_text(int wait, const char* trigger = "consistent_no_immediate_hazard") {
  return "{\"strategy\":\"stop_observe_move\",\"wait\":" + std::to_string(wait) + ",\"trigger\":\"" + trigger +
         "\"}";
}

inline std::string hazard_report_text(const char* strategy) {
  return std::string("{\"hazards\":[],\"strategy\":\"") + strategy + "\"}";
}

}  // namespace rco::testing_util
