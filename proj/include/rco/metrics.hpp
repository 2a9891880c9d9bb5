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

// Leaderboard-style episode metrics: route completion, infraction score,
// driving score and average speed, plus fixed-format tables.

#pragma once

#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "rco/simenv.hpp"

namespace rco::metrics {

struct Penalties {
  double collision_pedestrian = 0.50;
  double collision_vehicle = 0.60;
  double collision_static = 0.65;
  double red_light = 0.70;
  double stop_sign = 0.80;
};

inline const Penalties& validate_penalties(const Penalties& p) {
  for (auto [name, v] : {std::pair{"collision_pedestrian", p.collision_pedestrian},
                         std::pair{"collision_vehicle", p.collision_vehicle},
                         std::pair{"collision_static", p.collision_static}, std::pair{"red_light", p.red_light},
                         std::pair{"stop_sign", p.stop_sign}}) {
    if (!(v > 0.0 && v <= 1.0)) throw OutOfRange(name, v);
  }
  return p;
}

inline double penalty(sim::InfractionKind k, const Penalties& p = {}) {
  switch (k) {
    case sim::InfractionKind::kCollisionPedestrian: return p.collision_pedestrian;
    case sim::InfractionKind::kCollisionVehicle: return p.collision_vehicle;
    case sim::InfractionKind::kCollisionStatic: return p.collision_static;
    case sim::InfractionKind::kRedLight: return p.red_light;
    case sim::InfractionKind::kStopSign: return p.stop_sign;
  }
  return 1.0;
}

/// Signal violations do not count when that signal class is masked: the
/// agent had no way to see it.
inline bool excluded(sim::InfractionKind k, const sim::DeficitPolicy& policy) {
  if (k == sim::InfractionKind::kRedLight) return policy.contains(ObjectClass::kTrafficLight);
  if (k == sim::InfractionKind::kStopSign) return policy.contains(ObjectClass::kStopSign);
  return false;
}

inline double infraction_score(std::span<const sim::InfractionEvent> events, const sim::DeficitPolicy& policy,
                               const Penalties& p = {}) {
  double is = 1.0;
  for (const auto& e : events) {
    if (!excluded(e.kind, policy)) is *= penalty(e.kind, p);
  }
  return is;
}

/// Percentage of the route covered, from the furthest projected progress.
inline double route_completion(double route_length_m, double progress_m) {
  if (!(route_length_m > 0.0)) return 0.0;
  return std::clamp(100.0 * progress_m / route_length_m, 0.0, 100.0);
}

inline double route_completion(const sim::Route& route, std::span<const Vec2> trajectory) {
  if (trajectory.empty()) throw InsufficientHistory(0);
  double s = route.project(trajectory.front(), 0.0, 5.0, 1e9).s;
  double best = s;
  for (const Vec2& p : trajectory.subspan(1)) {
    s = route.project(p, s).s;
    best = std::max(best, s);
  }
  // Within half a metre of the end counts as arrived.
  if (route.length() - best <= 0.5) best = route.length();
  return route_completion(route.length(), best);
}

inline double driving_score(double rc, double is_score) {
  if (!(rc >= 0.0 && rc <= 100.0)) throw OutOfRange("rc", rc);
  if (!(is_score >= 0.0 && is_score <= 1.0)) throw OutOfRange("is_score", is_score);
  return rc * is_score;
}

inline double average_speed(double route_length_m, double game_time_s) {
  if (!(game_time_s > 0.0)) throw ZeroTime();
  return route_length_m / game_time_s;
}

struct EpisodeResult {
  std::string scenario;
  std::string mode;
  double rc = 0.0;
  double is_score = 1.0;
  double ds = 0.0;
  double as_speed = 0.0;
  std::vector<sim::InfractionEvent> infractions;
  double game_time_s = 0.0;
  long ticks = 0;
  bool route_completed = false;
  long planning_events = 0;
  long backend_calls = 0;
  long override_ticks = 0;
};

inline void to_json(Json& j, const EpisodeResult& r) {
  j = Json{{"scenario", r.scenario},
           {"mode", r.mode},
           {"rc", r.rc},
           {"is", r.is_score},
           {"ds", r.ds},
           {"as", r.as_speed},
           {"infractions", r.infractions},
           {"game_time_s", r.game_time_s},
           {"ticks", r.ticks},
           {"route_completed", r.route_completed},
           {"planning_events", r.planning_events},
           {"backend_calls", r.backend_calls},
           {"override_ticks", r.override_ticks}};
}

inline void from_json(const Json& j, EpisodeResult& r) {
  using namespace json_detail;
  r.scenario = at(j, "scenario").get<std::string>();
  r.mode = at(j, "mode").get<std::string>();
  r.rc = number(j, "rc");
  r.is_score = number(j, "is");
  r.ds = number(j, "ds");
  r.as_speed = number(j, "as");
  r.infractions = at(j, "infractions").get<std::vector<sim::InfractionEvent>>();
  r.game_time_s = number(j, "game_time_s");
  r.ticks = integer(j, "ticks");
  r.route_completed = j.value("route_completed", false);
  r.planning_events = j.value("planning_events", 0L);
  r.backend_calls = j.value("backend_calls", 0L);
  r.override_ticks = j.value("override_ticks", 0L);
}

struct Aggregate {
  double rc = 0.0;
  double is_score = 0.0;
  double ds = 0.0;
  double as_speed = 0.0;
  std::size_t episodes = 0;
};

/// Arithmetic means, accumulated in the given order.
inline Aggregate aggregate(std::span<const EpisodeResult> results) {
  Aggregate a;
  for (const auto& r : results) {
    a.rc += r.rc;
    a.is_score += r.is_score;
    a.ds += r.ds;
    a.as_speed += r.as_speed;
  }
  a.episodes = results.size();
  if (a.episodes > 0) {
    const double n = static_cast<double>(a.episodes);
    a.rc /= n;
    a.is_score /= n;
    a.ds /= n;
    a.as_speed /= n;
  }
  return a;
}

inline std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string summary_csv(std::span<const EpisodeResult> results) {
  std::string out = "scenario,mode,rc,is,ds,as,infractions,game_time_s\n";
  for (const auto& r : results) {
    out += r.scenario + "," + r.mode + "," + fmt6(r.rc) + "," + fmt6(r.is_score) + "," + fmt6(r.ds) + "," +
           fmt6(r.as_speed) + "," + std::to_string(r.infractions.size()) + "," + fmt6(r.game_time_s) + "\n";
  }
  const Aggregate a = aggregate(results);
  out += "mean,," + fmt6(a.rc) + "," + fmt6(a.is_score) + "," + fmt6(a.ds) + "," + fmt6(a.as_speed) + ",,\n";
  return out;
}

inline Json summary_json(std::span<const EpisodeResult> results) {
  const Aggregate a = aggregate(results);
  Json j;
  j["episodes"] = Json::array();
  for (const auto& r : results) j["episodes"].push_back(r);
  j["mean"] = Json{{"rc", a.rc}, {"is", a.is_score}, {"ds", a.ds}, {"as", a.as_speed}, {"episodes", a.episodes}};
  return j;
}

}  // namespace rco::metrics
