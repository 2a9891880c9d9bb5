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

// High-level action tokens -> actuator commands.

#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "rco/domain.hpp"

namespace rco::control {

struct ThrottleBrake {
  double throttle = 0.0;
  double brake = 0.0;
  friend bool operator==(const ThrottleBrake&, const ThrottleBrake&) = default;
};

/// Speed token table. Only the previous throttle carries over between ticks.
inline ThrottleBrake map_speed_control(SpeedControl speed, double prev_throttle) {
  const double prev = clamp01(prev_throttle);
  ThrottleBrake out;
  switch (speed) {
    case SpeedControl::kConstantSpeed:
      out = {0.7, 0.0};
      break;
    case SpeedControl::kDeceleration:
      out = {std::max(0.0, prev - 0.2), 0.2};
      break;
    case SpeedControl::kQuickDeceleration:
      out = {std::max(0.0, prev - 0.4), 0.4};
      break;
    case SpeedControl::kDecelerationToZero:
      out = {0.0, 0.8};
      break;
    case SpeedControl::kAcceleration:
      out = {std::min(1.0, prev + 0.2), 0.0};
      break;
    case SpeedControl::kQuickAcceleration:
      out = {std::min(1.0, prev + 0.4), 0.0};
      break;
  }
  return {clamp01(out.throttle), clamp01(out.brake)};
}

/// PID on the heading error toward a target point. The derivative term is
/// skipped on the first sample after a reset so a fresh controller behaves
/// like its proportional part.
struct SteerControllerState {
  double kp = 0.9;
  double ki = 0.0;
  double kd = 0.1;
  double integral = 0.0;
  double prev_error = 0.0;
  bool primed = false;
  double integral_limit = 1.0;

  static SteerControllerState with_gains(double kp, double ki, double kd, double integral_limit = 1.0) {
    if (kp < 0) throw OutOfRange("kp", kp);
    if (ki < 0) throw OutOfRange("ki", ki);
    if (kd < 0) throw OutOfRange("kd", kd);
    if (integral_limit < 0) throw OutOfRange("integral_limit", integral_limit);
    return {kp, ki, kd, 0.0, 0.0, false, integral_limit};
  }

  SteerControllerState reset() const { return with_gains(kp, ki, kd, integral_limit); }
};

struct SteerResult {
  double steer = 0.0;
  SteerControllerState state;
};

/// Signed bearing of `target` seen from `ego`; positive to the right.
inline double bearing_to(const Pose& ego, Vec2 target) {
  const Vec2 d = target - ego.position();
  if (d.norm() < 1e-9) throw DegenerateTarget();
  return wrap_angle(std::atan2(d.y, d.x) - ego.heading);
}

inline SteerResult compute_steer(const Pose& ego, Vec2 target, const SteerControllerState& ctrl, double dt) {
  if (!(dt > 0.0)) throw OutOfRange("dt", dt);
  const double error = bearing_to(ego, target);

  SteerControllerState next = ctrl;
  next.integral = std::clamp(ctrl.integral + error * dt, -ctrl.integral_limit, ctrl.integral_limit);
  const double derivative = ctrl.primed ? (error - ctrl.prev_error) / dt : 0.0;
  next.prev_error = error;
  next.primed = true;

  const double u = ctrl.kp * error + ctrl.ki * next.integral + ctrl.kd * derivative;
  return {std::clamp(u, -1.0, 1.0), next};
}

struct ControlConfig {
  double kp = 0.9;
  double ki = 0.0;
  double kd = 0.1;
  double integral_limit = 1.0;
  double lane_width_m = 3.5;
  /// Minimum bearing (rad) of the navigation target for an intersection turn
  /// to count as going that way.
  double turn_bearing_rad = 0.05;

  SteerControllerState fresh_controller() const {
    return SteerControllerState::with_gains(kp, ki, kd, integral_limit);
  }
};

/// Whether a driving behavior agrees with the navigation map at this point.
inline bool behavior_aligned(Behavior b, const Navi& navi, const Pose& ego, const ControlConfig& cfg = {}) {
  switch (b) {
    case Behavior::kMoveForward:
    case Behavior::kStop:
      return true;
    case Behavior::kTurnLeft:
      if (navi.road_geometry == RoadGeometry::kLeftCurve) return true;
      return navi.road_geometry == RoadGeometry::kIntersection &&
             bearing_to(ego, navi.target_point) < -cfg.turn_bearing_rad;
    case Behavior::kTurnRight:
      if (navi.road_geometry == RoadGeometry::kRightCurve) return true;
      return navi.road_geometry == RoadGeometry::kIntersection &&
             bearing_to(ego, navi.target_point) > cfg.turn_bearing_rad;
    case Behavior::kChangeLaneLeft:
    case Behavior::kChangeLaneRight:
      return navi.road_geometry == RoadGeometry::kStraight;
  }
  return false;
}

struct ResolvedAction {
  Action action;
  SteerControllerState controller;
  Behavior effective_behavior = Behavior::kMoveForward;
  bool direction_mismatch = false;
};

/// Turns a high-level action into an actuator command. A directional
/// behavior that disagrees with navigation is demoted to move_forward and
/// flagged; stop never steers.
inline ResolvedAction resolve_action(const HighLevelAction& hla, const Action& prev, const Pose& ego,
                                     const Navi& navi, const SteerControllerState& ctrl, double dt,
                                     const ControlConfig& cfg = {}) {
  const HighLevelAction normalized(hla.behavior, hla.speed);
  const ThrottleBrake tb = map_speed_control(normalized.speed, prev.throttle());

  ResolvedAction out;
  out.effective_behavior = normalized.behavior;
  if (normalized.behavior == Behavior::kStop) {
    out.action = Action(tb.throttle, tb.brake, 0.0);
    out.controller = ctrl.reset();
    return out;
  }

  if (!behavior_aligned(normalized.behavior, navi, ego, cfg)) {
    out.direction_mismatch = true;
    out.effective_behavior = Behavior::kMoveForward;
  }

  Vec2 target = navi.target_point;
  if (out.effective_behavior == Behavior::kChangeLaneLeft || out.effective_behavior == Behavior::kChangeLaneRight) {
    const double h = navi.current_direction;
    const Vec2 right{-std::sin(h), std::cos(h)};
    const double side = out.effective_behavior == Behavior::kChangeLaneRight ? 1.0 : -1.0;
    target = target + right * (side * cfg.lane_width_m);
  }

  const SteerResult s = compute_steer(ego, target, ctrl, dt);
  out.action = Action(tb.throttle, tb.brake, s.steer);
  out.controller = s.state;
  return out;
}

}  // namespace rco::control
