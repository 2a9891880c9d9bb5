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

// Context-dependent safety envelope and the trigger/transform algebra that
// turns a planned action into the executed one.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rco/backend.hpp"
#include "rco/domain.hpp"

namespace rco::safety {

struct SafetyGains {
  double delta_throttle = 0.1;
  double delta_brake = 0.1;
};

inline const SafetyGains& validate_gains(const SafetyGains& g) {
  if (!(g.delta_throttle > 0.0 && g.delta_throttle <= 1.0)) throw OutOfRange("delta_throttle", g.delta_throttle);
  if (!(g.delta_brake > 0.0 && g.delta_brake <= 1.0)) throw OutOfRange("delta_brake", g.delta_brake);
  return g;
}

enum class Constraint { kMaxSpeed, kMinFollowingDistance, kMaxAcceleration, kMaxDeceleration, kMaxYawRate, kMinBrakingDistance };

}  // namespace rco::safety

namespace rco {
template <>
struct EnumNames<safety::Constraint> {
  static constexpr std::array<std::pair<safety::Constraint, std::string_view>, 6> kNames{{
      {safety::Constraint::kMaxSpeed, "max_speed"},
      {safety::Constraint::kMinFollowingDistance, "min_following_distance"},
      {safety::Constraint::kMaxAcceleration, "max_acceleration"},
      {safety::Constraint::kMaxDeceleration, "max_deceleration"},
      {safety::Constraint::kMaxYawRate, "max_yaw_rate"},
      {safety::Constraint::kMinBrakingDistance, "min_braking_distance"},
  }};
};
}  // namespace rco

namespace rco::safety {

RCO_JSON_ENUM(Constraint)

/// Which envelope limits the current measurements violate. A missing lead
/// vehicle (infinite d_follow) never triggers the following-distance limit.
inline std::vector<Constraint> triggered_constraints(const VehicleMeasurements& m, const SafetyConstraints& sc) {
  std::vector<Constraint> out;
  if (m.v >= sc.v_max) out.push_back(Constraint::kMaxSpeed);
  if (m.d_follow < sc.d_min) out.push_back(Constraint::kMinFollowingDistance);
  if (m.a_x > sc.ac_max) out.push_back(Constraint::kMaxAcceleration);
  if (m.a_x < -sc.de_max) out.push_back(Constraint::kMaxDeceleration);
  if (std::abs(m.omega_z) > sc.psi_max) out.push_back(Constraint::kMaxYawRate);
  if (m.v * m.v / (2.0 * sc.de_max) > sc.d_brake) out.push_back(Constraint::kMinBrakingDistance);
  return out;
}

/// Applies every triggered transform, summing the throttle and brake terms
/// before a single clamp. The deceleration-limit term subtracts
/// delta_brake * (-de_max - a_x), the excess deceleration, which is positive
/// exactly when that limit fires. Yaw-rate limiting scales steer by
/// 1 - (1 - psi_max / |omega_z|), kept in that form so results match the
/// reference expression to the last bit.
inline Action apply_constraints(const Action& a, const VehicleMeasurements& m, const SafetyConstraints& sc,
                                const SafetyGains& g) {
  double throttle = a.throttle();
  if (m.v >= sc.v_max) throttle = throttle - g.delta_throttle;
  if (m.d_follow < sc.d_min) throttle = throttle - g.delta_throttle;
  if (m.a_x > sc.ac_max) throttle = throttle - g.delta_throttle * (m.a_x - sc.ac_max);

  double brake = a.brake();
  if (m.v * m.v / (2.0 * sc.de_max) > sc.d_brake) brake = brake + g.delta_brake;
  if (m.a_x < -sc.de_max) brake = brake - g.delta_brake * (-sc.de_max - m.a_x);

  double steer = a.steer();
  const double yaw = std::abs(m.omega_z);
  if (yaw > sc.psi_max) steer = steer * (1.0 - (1.0 - sc.psi_max / yaw));

  return Action(clamp01(throttle), clamp01(brake), std::clamp(steer, -1.0, 1.0));
}

// ---------------------------------------------------------------------------
// Constraint generation

/// Multiplier of one context factor on each envelope field.
struct Scale {
  double v_max = 1.0;
  double d_min = 1.0;
  double ac_max = 1.0;
  double de_max = 1.0;
  double psi_max = 1.0;
  double d_brake = 1.0;
};

inline constexpr SafetyConstraints kBaseConstraints{8.0, 6.0, 2.5, 6.0, 0.5, 8.0};

inline Scale weather_scale(Weather w) {
  switch (w) {
    case Weather::kClear: return {};
    case Weather::kRain: return {0.8, 1.25, 0.8, 0.8, 1.0, 1.25};
    case Weather::kFog: return {0.7, 1.5, 0.8, 0.9, 1.0, 1.5};
    case Weather::kSnow: return {0.6, 1.5, 0.6, 0.6, 0.7, 1.5};
  }
  return {};
}

inline Scale daylight_scale(Daylight d) {
  switch (d) {
    case Daylight::kDay: return {};
    case Daylight::kDusk: return {0.9, 1.1, 1.0, 1.0, 1.0, 1.1};
    case Daylight::kNight: return {0.75, 1.2, 1.0, 1.0, 1.0, 1.2};
  }
  return {};
}

inline Scale traffic_scale(TrafficDensity t) {
  switch (t) {
    case TrafficDensity::kLow: return {};
    case TrafficDensity::kMedium: return {1.0, 1.0, 0.9, 1.0, 1.0, 1.0};
    case TrafficDensity::kHigh: return {1.0, 1.0, 0.8, 1.0, 1.0, 1.0};
  }
  return {};
}

inline Scale geometry_scale(RoadGeometry g) {
  switch (g) {
    case RoadGeometry::kStraight: return {};
    case RoadGeometry::kLeftCurve:
    case RoadGeometry::kRightCurve: return {0.8, 1.0, 1.0, 1.0, 1.2, 1.0};
    case RoadGeometry::kIntersection: return {1.0, 1.0, 1.0, 1.0, 1.4, 1.0};
  }
  return {};
}

/// An obstacle this close (LiDAR summary) lowers the speed limit.
inline constexpr double kCloseObstacleM = 15.0;

inline Scale obstacle_scale(const std::optional<double>& nearest_m) {
  if (nearest_m && *nearest_m < kCloseObstacleM) return {0.75, 1.0, 1.0, 1.0, 1.0, 1.0};
  return {};
}

/// Rule-based envelope: base row times the product of the context factors.
inline SafetyConstraints default_constraints(const Navi& navi, const Surrounding& s) {
  SafetyConstraints sc = kBaseConstraints;
  for (const Scale& f : {weather_scale(s.weather), daylight_scale(s.daylight), traffic_scale(s.traffic_density),
                         geometry_scale(navi.road_geometry), obstacle_scale(s.nearest_obstacle_m)}) {
    sc.v_max *= f.v_max;
    sc.d_min *= f.d_min;
    sc.ac_max *= f.ac_max;
    sc.de_max *= f.de_max;
    sc.psi_max *= f.psi_max;
    sc.d_brake *= f.d_brake;
  }
  return sc;
}

struct GeneratedConstraints {
  SafetyConstraints constraints;
  bool from_backend = false;
  std::string diagnostic;  // why the default table was used, if it was
};

/// Asks the backend for the envelope; any failure yields the default table.
inline GeneratedConstraints generate_constraints(const Navi& navi, const Surrounding& surrounding,
                                                 backend::ReasoningBackend* reasoner, const std::string& prompt,
                                                 Json payload, int timeout_ms = 10000) {
  GeneratedConstraints out{default_constraints(navi, surrounding), false, {}};
  if (reasoner == nullptr) {
    out.diagnostic = "no backend";
    return out;
  }
  try {
    backend::BackendResponse resp =
        reasoner->call({backend::Purpose::kSafetyConstraints, prompt, std::move(payload), timeout_ms});
    const auto* sc = std::get_if<SafetyConstraints>(&resp.parsed);
    if (sc == nullptr) {
      out.diagnostic = "backend returned a different purpose";
      return out;
    }
    out.constraints = validate_constraints(*sc);
    out.from_backend = true;
  } catch (const Error& e) {
    out.diagnostic = e.what();
  }
  return out;
}

}  // namespace rco::safety
