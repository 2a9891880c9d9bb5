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

// Deterministic 2D closed-loop driving world.
//
// The ego follows a kinematic bicycle model, actors replay timed waypoint
// scripts, and perception is produced symbolically: every actor and signal in
// one of three 60 degree camera sectors becomes a normalized box, except that
// classes named by the deficit policy are replaced by deficit regions.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rco/controlmap.hpp"
#include "rco/domain.hpp"

namespace rco::sim {

// ---------------------------------------------------------------------------
// Parameters

struct VehicleParams {
  double k_throttle = 3.0;  // m/s^2 per unit throttle
  double k_brake = 8.0;     // m/s^2 per unit brake
  double drag = 0.25;       // 1/s
  double wheelbase = 2.5;   // m
  double max_steer_rad = deg2rad(35.0);
  double length = 4.5;
  double width = 1.9;
};

struct CameraParams {
  double hfov_rad = deg2rad(60.0);
  double vfov_rad = deg2rad(40.0);
  double range_m = 40.0;
  double mount_height_m = 1.5;
};

struct ObjectShape {
  double length;        // footprint along heading
  double width;         // footprint across heading
  double visual_width;  // apparent width in the image
  double z_min;
  double z_max;
};

inline ObjectShape shape_of(ObjectClass c) {
  switch (c) {
    case ObjectClass::kCar: return {4.5, 1.9, 2.0, 0.0, 1.5};
    case ObjectClass::kTruck: return {8.0, 2.5, 2.5, 0.0, 3.5};
    case ObjectClass::kBus: return {12.0, 2.6, 2.6, 0.0, 3.2};
    case ObjectClass::kBicycle: return {1.8, 0.6, 1.0, 0.0, 1.7};
    case ObjectClass::kPedestrian: return {0.6, 0.6, 0.6, 0.0, 1.8};
    case ObjectClass::kMotorcycle: return {2.2, 0.8, 1.0, 0.0, 1.5};
    case ObjectClass::kTrafficLight: return {0.4, 0.4, 0.4, 3.0, 4.2};
    case ObjectClass::kStopSign: return {0.1, 0.75, 0.75, 1.5, 2.25};
    case ObjectClass::kUnknown: return {1.0, 1.0, 1.0, 0.0, 1.0};
  }
  return {1.0, 1.0, 1.0, 0.0, 1.0};
}

// ---------------------------------------------------------------------------
// Route

struct RouteProjection {
  double s = 0.0;
  double lateral = 0.0;  // positive to the right of the route
  std::size_t segment = 0;
};

/// Polyline route with a geometry tag per segment. Arc length s runs from 0
/// at the first waypoint to length() at the last.
class Route {
 public:
  Route() = default;
  Route(std::vector<Vec2> waypoints, std::vector<RoadGeometry> tags)
      : points_(std::move(waypoints)), tags_(std::move(tags)) {
    if (points_.size() < 2) throw ConfigError("route needs at least two waypoints");
    if (tags_.size() != points_.size() - 1) throw ConfigError("route needs one geometry tag per segment");
    cumulative_.push_back(0.0);
    for (std::size_t i = 1; i < points_.size(); ++i) {
      const double len = (points_[i] - points_[i - 1]).norm();
      if (!(len > 1e-9)) throw ConfigError("route waypoints must be strictly ordered (zero-length segment)");
      cumulative_.push_back(cumulative_.back() + len);
    }
  }

  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  const std::vector<Vec2>& waypoints() const { return points_; }
  const std::vector<RoadGeometry>& tags() const { return tags_; }

  std::size_t segment_at(double s) const {
    if (s <= 0.0) return 0;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const auto idx = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
    return std::min(idx == 0 ? 0 : idx - 1, tags_.size() - 1);
  }

  Vec2 point_at(double s) const {
    s = std::clamp(s, 0.0, length());
    const std::size_t i = segment_at(s);
    const double seg = cumulative_[i + 1] - cumulative_[i];
    const double t = (s - cumulative_[i]) / seg;
    return points_[i] + (points_[i + 1] - points_[i]) * t;
  }

  double direction_at(double s) const {
    const std::size_t i = segment_at(std::clamp(s, 0.0, length()));
    const Vec2 d = points_[i + 1] - points_[i];
    return std::atan2(d.y, d.x);
  }

  RoadGeometry geometry_at(double s) const { return tags_[segment_at(std::clamp(s, 0.0, length()))]; }

  /// Closest point among segments overlapping [near_s - back, near_s + ahead].
  RouteProjection project(Vec2 p, double near_s = 0.0, double back = 5.0, double ahead = 30.0) const {
    RouteProjection best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
      if (cumulative_[i + 1] < near_s - back || cumulative_[i] > near_s + ahead) continue;
      const Vec2 a = points_[i];
      const Vec2 ab = points_[i + 1] - a;
      const double seg2 = dot(ab, ab);
      const double t = std::clamp(dot(p - a, ab) / seg2, 0.0, 1.0);
      const Vec2 q = a + ab * t;
      const double d = (p - q).norm();
      if (d < best_d) {
        best_d = d;
        best.s = cumulative_[i] + t * std::sqrt(seg2);
        best.lateral = cross(ab, p - a) / std::sqrt(seg2);
        best.segment = i;
      }
    }
    return best;
  }

 private:
  std::vector<Vec2> points_;
  std::vector<RoadGeometry> tags_;
  std::vector<double> cumulative_;
};

// ---------------------------------------------------------------------------
// Actors, signals, scenario

struct ScriptPoint {
  double t = 0.0;  // seconds since episode start
  Vec2 p;
};

struct Actor {
  int id = 0;
  ObjectClass cls = ObjectClass::kCar;
  Pose pose;
  Vec2 velocity;
  std::vector<ScriptPoint> script;
};

/// Pose and velocity of a scripted actor at time t. Before the first and
/// after the last script point the actor is at rest there.
inline void advance_actor(Actor& a, double t) {
  const auto& sc = a.script;
  if (sc.empty()) return;
  if (t <= sc.front().t || sc.size() == 1) {
    a.pose.x = sc.front().p.x;
    a.pose.y = sc.front().p.y;
    a.velocity = {};
    return;
  }
  if (t >= sc.back().t) {
    a.pose.x = sc.back().p.x;
    a.pose.y = sc.back().p.y;
    a.velocity = {};
    return;
  }
  std::size_t i = 1;
  while (sc[i].t < t) ++i;
  const ScriptPoint& p0 = sc[i - 1];
  const ScriptPoint& p1 = sc[i];
  const double span = p1.t - p0.t;
  const double u = span > 0 ? (t - p0.t) / span : 1.0;
  const Vec2 d = p1.p - p0.p;
  const Vec2 pos = p0.p + d * u;
  a.pose.x = pos.x;
  a.pose.y = pos.y;
  a.velocity = span > 0 ? d * (1.0 / span) : Vec2{};
  if (d.norm() > 1e-9) a.pose.heading = std::atan2(d.y, d.x);
}

enum class LightState { kRed, kGreen };

}  // namespace rco::sim

namespace rco {
template <>
struct EnumNames<sim::LightState> {
  static constexpr std::array<std::pair<sim::LightState, std::string_view>, 2> kNames{{
      {sim::LightState::kRed, "red"},
      {sim::LightState::kGreen, "green"},
  }};
};
}  // namespace rco

namespace rco::sim {

RCO_JSON_ENUM(LightState)

struct TrafficLight {
  int id = 0;
  Vec2 position;
  double stop_s = 0.0;  // stop line, as route arc length
  std::vector<std::pair<long, LightState>> phases{{0, LightState::kRed}};

  LightState state_at(long tick) const {
    LightState s = phases.empty() ? LightState::kGreen : phases.front().second;
    for (const auto& [start, st] : phases) {
      if (start <= tick) s = st;
    }
    return s;
  }
};

struct StopSign {
  int id = 0;
  Vec2 position;
  double stop_s = 0.0;
};

struct StaticObstacle {
  int id = 0;
  Pose pose;
  double length = 1.0;
  double width = 1.0;
};

/// Classes that may be masked, and the tick window [from_tick, to_tick) in
/// which masking is active.
struct DeficitPolicy {
  std::vector<ObjectClass> classes;
  long from_tick = 0;
  long to_tick = std::numeric_limits<long>::max();

  bool contains(ObjectClass c) const { return std::find(classes.begin(), classes.end(), c) != classes.end(); }
  bool masks(ObjectClass c, long tick) const { return tick >= from_tick && tick < to_tick && contains(c); }
};

inline bool maskable_class(ObjectClass c) {
  return c == ObjectClass::kTrafficLight || c == ObjectClass::kStopSign || c == ObjectClass::kPedestrian ||
         c == ObjectClass::kBicycle;
}

struct Scenario {
  std::string name;
  std::string script_key;
  std::uint64_t seed = 0;
  double dt = 0.1;
  long time_limit_ticks = 600;
  Weather weather = Weather::kClear;
  Daylight daylight = Daylight::kDay;
  TrafficDensity traffic_density = TrafficDensity::kLow;
  Route route;
  Pose ego_start;
  double ego_start_v = 0.0;
  std::vector<Actor> actors;
  std::vector<TrafficLight> lights;
  std::vector<StopSign> stop_signs;
  std::vector<StaticObstacle> obstacles;
  DeficitPolicy deficit_policy;
  double timing_jitter_s = 0.0;
  VehicleParams vehicle;
  CameraParams camera;
};

// ---------------------------------------------------------------------------
// World state

struct EgoState {
  Pose pose;
  double v = 0.0;
  double a_x = 0.0;
  double omega_z = 0.0;
};

/// One simulation instant. Static scenario data is shared, so copying a
/// WorldState is cheap and copies never alias mutable state.
struct WorldState {
  long tick = 0;
  double dt = 0.1;
  EgoState ego;
  double progress_s = 0.0;      // ego centre projected on the route
  double max_progress_s = 0.0;  // furthest projection reached
  std::vector<Actor> actors;
  std::vector<bool> stop_sign_satisfied;
  std::shared_ptr<const Scenario> scenario;

  double time_s() const { return static_cast<double>(tick) * dt; }
  double front_s() const { return progress_s + scenario->vehicle.length / 2.0; }
};

inline WorldState initial_world(std::shared_ptr<const Scenario> sc, std::optional<std::uint64_t> seed = std::nullopt) {
  if (!(sc->dt > 0.0)) throw ConfigError("dt must be positive");
  WorldState w;
  w.dt = sc->dt;
  w.ego.pose = sc->ego_start;
  w.ego.v = sc->ego_start_v;
  w.actors = sc->actors;
  if (sc->timing_jitter_s > 0.0) {
    SplitMix64 rng(seed.value_or(sc->seed));
    for (auto& a : w.actors) {
      const double shift = rng.uniform(-sc->timing_jitter_s, sc->timing_jitter_s);
      for (auto& p : a.script) p.t += shift;
    }
  }
  for (auto& a : w.actors) advance_actor(a, 0.0);
  w.stop_sign_satisfied.assign(sc->stop_signs.size(), false);
  w.scenario = std::move(sc);
  const RouteProjection proj = w.scenario->route.project(w.ego.pose.position(), 0.0, 5.0, 1e9);
  w.progress_s = w.max_progress_s = proj.s;
  return w;
}

/// Advances the world by one step under the ego action.
inline WorldState tick(const WorldState& w, const Action& a) {
  const VehicleParams& vp = w.scenario->vehicle;
  WorldState n = w;
  const double accel = vp.k_throttle * a.throttle() - vp.k_brake * a.brake() - vp.drag * w.ego.v;
  n.ego.v = std::max(0.0, w.ego.v + accel * w.dt);
  const double dheading = (n.ego.v / vp.wheelbase) * std::tan(a.steer() * vp.max_steer_rad) * w.dt;
  n.ego.pose.heading = wrap_angle(w.ego.pose.heading + dheading);
  n.ego.pose.x = w.ego.pose.x + n.ego.v * std::cos(n.ego.pose.heading) * w.dt;
  n.ego.pose.y = w.ego.pose.y + n.ego.v * std::sin(n.ego.pose.heading) * w.dt;
  n.ego.a_x = (n.ego.v - w.ego.v) / w.dt;
  n.ego.omega_z = dheading / w.dt;

  n.tick = w.tick + 1;
  for (auto& actor : n.actors) advance_actor(actor, n.time_s());

  const RouteProjection proj = w.scenario->route.project(n.ego.pose.position(), w.progress_s);
  n.progress_s = proj.s;
  n.max_progress_s = std::max(w.max_progress_s, proj.s);

  const double half = vp.length / 2.0;
  for (std::size_t i = 0; i < w.scenario->stop_signs.size(); ++i) {
    const double d = w.scenario->stop_signs[i].stop_s - (n.progress_s + half);
    if (d >= 0.0 && d <= 5.0 && n.ego.v < 0.1) n.stop_sign_satisfied[i] = true;
  }
  return n;
}

inline VehicleMeasurements measure(const WorldState& w) {
  VehicleMeasurements m;
  m.v = w.ego.v;
  m.a_x = w.ego.a_x;
  m.omega_z = w.ego.omega_z;
  const double half_len = w.scenario->vehicle.length / 2.0;
  for (const auto& a : w.actors) {
    if (a.cls == ObjectClass::kPedestrian) continue;
    const Vec2 local = to_local(w.ego.pose, a.pose.position());
    if (local.x <= 0.0 || std::abs(local.y) > 1.75) continue;
    const double gap = std::max(0.0, local.x - half_len - shape_of(a.cls).length / 2.0);
    m.d_follow = std::min(m.d_follow, gap);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Perception

struct Projection {
  View view = View::kFront;
  Rect box;
  double range = 0.0;
};

/// Angular-sector camera model: the box spans the object's angular width and
/// its height from z_min to z_max as seen from the camera mount.
inline std::optional<Projection> project_object(const Pose& ego, Vec2 p, const ObjectShape& shape,
                                                const CameraParams& cam) {
  const Vec2 local = to_local(ego, p);
  const double range = local.norm();
  if (range > cam.range_m || range < 0.5) return std::nullopt;
  const double bearing = std::atan2(local.y, local.x);
  const double half_fov = cam.hfov_rad / 2.0;
  if (std::abs(bearing) > 3.0 * half_fov) return std::nullopt;

  Projection out;
  double center = 0.0;
  if (bearing < -half_fov) {
    out.view = View::kLeft;
    center = -cam.hfov_rad;
  } else if (bearing > half_fov) {
    out.view = View::kRight;
    center = cam.hfov_rad;
  } else {
    out.view = View::kFront;
  }
  const double hw = std::atan2(shape.visual_width / 2.0, range);
  const double x0 = 0.5 + (bearing - center - hw) / cam.hfov_rad;
  const double x1 = 0.5 + (bearing - center + hw) / cam.hfov_rad;
  auto image_y = [&](double z) { return 0.5 - std::atan2(z - cam.mount_height_m, range) / cam.vfov_rad; };
  out.box = {std::clamp(x0, 0.0, 1.0), std::clamp(image_y(shape.z_max), 0.0, 1.0), std::clamp(x1, 0.0, 1.0),
             std::clamp(image_y(shape.z_min), 0.0, 1.0)};
  if (out.box.width() < 1e-6 || out.box.height() < 1e-6) return std::nullopt;
  out.range = range;
  return out;
}

/// Navigation record: lookahead target on the route, route heading and the
/// geometry tag at the ego's projection.
inline Navi navigation(const WorldState& w) {
  const Route& r = w.scenario->route;
  const double lookahead = 6.0 + 0.5 * w.ego.v;
  return {r.point_at(w.progress_s + lookahead), r.direction_at(w.progress_s), r.geometry_at(w.progress_s)};
}

/// LiDAR summary: nearest actor or obstacle within 50 m ahead in a 6 m wide
/// corridor. LiDAR is not affected by camera deficits.
inline std::optional<double> nearest_obstacle(const WorldState& w) {
  std::optional<double> best;
  auto consider = [&](Vec2 p) {
    const Vec2 local = to_local(w.ego.pose, p);
    if (local.x <= 0.0 || local.x > 50.0 || std::abs(local.y) > 3.0) return;
    const double d = local.norm();
    if (!best || d < *best) best = d;
  };
  for (const auto& a : w.actors) consider(a.pose.position());
  for (const auto& o : w.scenario->obstacles) consider(o.pose.position());
  return best;
}

inline EnvironmentSnapshot perceive(const WorldState& w, const DeficitPolicy& policy) {
  const Scenario& sc = *w.scenario;
  EnvironmentSnapshot snap;
  snap.tick = w.tick;

  auto add = [&](int id, ObjectClass cls, Vec2 pos) {
    auto proj = project_object(w.ego.pose, pos, shape_of(cls), sc.camera);
    if (!proj) return;
    CameraView& cv = snap.view(proj->view);
    if (policy.masks(cls, w.tick)) {
      cv.deficits.push_back({proj->view, proj->box, id});
    } else {
      cv.visible_objects.push_back({cls, proj->box, proj->range});
    }
  };
  for (const auto& a : w.actors) add(a.id, a.cls, a.pose.position());
  for (const auto& l : sc.lights) add(l.id, ObjectClass::kTrafficLight, l.position);
  for (const auto& s : sc.stop_signs) add(s.id, ObjectClass::kStopSign, s.position);

  // Anything fully covered by a deficit in the same view is not visible.
  for (auto& cv : snap.perception) {
    std::erase_if(cv.visible_objects, [&](const VisibleObject& o) {
      return std::any_of(cv.deficits.begin(), cv.deficits.end(),
                         [&](const DeficitRegion& d) { return d.box.contains(o.box); });
    });
  }

  snap.navi = navigation(w);
  snap.surrounding = {sc.weather, sc.daylight, sc.traffic_density, nearest_obstacle(w)};
  return snap;
}

// ---------------------------------------------------------------------------
// Infractions

enum class InfractionKind { kCollisionPedestrian, kCollisionVehicle, kCollisionStatic, kRedLight, kStopSign };

}  // namespace rco::sim

namespace rco {
template <>
struct EnumNames<sim::InfractionKind> {
  static constexpr std::array<std::pair<sim::InfractionKind, std::string_view>, 5> kNames{{
      {sim::InfractionKind::kCollisionPedestrian, "collision_pedestrian"},
      {sim::InfractionKind::kCollisionVehicle, "collision_vehicle"},
      {sim::InfractionKind::kCollisionStatic, "collision_static"},
      {sim::InfractionKind::kRedLight, "red_light"},
      {sim::InfractionKind::kStopSign, "stop_sign"},
  }};
};
}  // namespace rco

namespace rco::sim {

RCO_JSON_ENUM(InfractionKind)

struct InfractionEvent {
  long tick = 0;
  InfractionKind kind = InfractionKind::kCollisionVehicle;
  std::optional<int> actor_id;
  friend bool operator==(const InfractionEvent&, const InfractionEvent&) = default;
};

inline void to_json(Json& j, const InfractionEvent& e) {
  j = Json{{"tick", e.tick}, {"kind", e.kind}};
  j["actor_id"] = e.actor_id ? Json(*e.actor_id) : Json(nullptr);
}
inline void from_json(const Json& j, InfractionEvent& e) {
  using namespace json_detail;
  e.tick = integer(j, "tick");
  e.kind = token<InfractionKind>(j, "kind");
  auto it = j.find("actor_id");
  e.actor_id = (it == j.end() || it->is_null()) ? std::nullopt : std::optional<int>(it->get<int>());
}

/// Separating-axis overlap test for two oriented rectangles.
inline bool boxes_overlap(const Pose& a, double a_len, double a_wid, const Pose& b, double b_len, double b_wid) {
  auto corners = [](const Pose& p, double len, double wid) {
    const double c = std::cos(p.heading), s = std::sin(p.heading);
    const Vec2 f{c * len / 2, s * len / 2};
    const Vec2 r{-s * wid / 2, c * wid / 2};
    const Vec2 o = p.position();
    return std::array<Vec2, 4>{o + f + r, o + f - r, o - f - r, o - f + r};
  };
  const auto ca = corners(a, a_len, a_wid);
  const auto cb = corners(b, b_len, b_wid);
  const std::array<Vec2, 4> axes{Vec2{std::cos(a.heading), std::sin(a.heading)},
                                 Vec2{-std::sin(a.heading), std::cos(a.heading)},
                                 Vec2{std::cos(b.heading), std::sin(b.heading)},
                                 Vec2{-std::sin(b.heading), std::cos(b.heading)}};
  for (const Vec2& ax : axes) {
    double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
    for (const Vec2& p : ca) {
      amin = std::min(amin, dot(p, ax));
      amax = std::max(amax, dot(p, ax));
    }
    for (const Vec2& p : cb) {
      bmin = std::min(bmin, dot(p, ax));
      bmax = std::max(bmax, dot(p, ax));
    }
    if (amax < bmin || bmax < amin) return false;
  }
  return true;
}

inline bool ego_touches(const WorldState& w, const Actor& a) {
  const ObjectShape s = shape_of(a.cls);
  return boxes_overlap(w.ego.pose, w.scenario->vehicle.length, w.scenario->vehicle.width, a.pose, s.length, s.width);
}

inline bool ego_touches(const WorldState& w, const StaticObstacle& o) {
  return boxes_overlap(w.ego.pose, w.scenario->vehicle.length, w.scenario->vehicle.width, o.pose, o.length, o.width);
}

/// Events caused by the transition prev -> next. A collision is reported
/// only on the first tick of a contiguous overlap, so each contact episode
/// yields exactly one event.
inline std::vector<InfractionEvent> detect_infractions(const WorldState& prev, const WorldState& next) {
  std::vector<InfractionEvent> out;
  for (std::size_t i = 0; i < next.actors.size(); ++i) {
    const Actor& a = next.actors[i];
    if (ego_touches(next, a) && !ego_touches(prev, prev.actors[i])) {
      const InfractionKind k =
          a.cls == ObjectClass::kPedestrian ? InfractionKind::kCollisionPedestrian : InfractionKind::kCollisionVehicle;
      out.push_back({next.tick, k, a.id});
    }
  }
  for (const auto& o : next.scenario->obstacles) {
    if (ego_touches(next, o) && !ego_touches(prev, o)) out.push_back({next.tick, InfractionKind::kCollisionStatic, o.id});
  }
  const double half = next.scenario->vehicle.length / 2.0;
  const double s0 = prev.progress_s + half;
  const double s1 = next.progress_s + half;
  for (const auto& l : next.scenario->lights) {
    if (s0 < l.stop_s && s1 >= l.stop_s && l.state_at(prev.tick) == LightState::kRed) {
      out.push_back({next.tick, InfractionKind::kRedLight, l.id});
    }
  }
  for (std::size_t i = 0; i < next.scenario->stop_signs.size(); ++i) {
    const StopSign& s = next.scenario->stop_signs[i];
    if (s0 < s.stop_s && s1 >= s.stop_s && next.ego.v > 0.1 && !next.stop_sign_satisfied[i]) {
      out.push_back({next.tick, InfractionKind::kStopSign, s.id});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Base agent

struct BaseAgentConfig {
  double hazard_range_m = 12.0;
  double corridor_half_width_m = 1.6;
  double creep_throttle = 0.35;
  double stop_standoff_m = 2.0;
  double approach_decel = 2.5;
};

/// Deterministic waypoint follower standing in for an end-to-end driving
/// agent. It reacts only to what it can see: masked objects and signals do
/// not exist for it.
inline Action base_agent(const WorldState& w, const DeficitPolicy& policy, const BaseAgentConfig& cfg = {}) {
  const Scenario& sc = *w.scenario;
  const double half_len = sc.vehicle.length / 2.0;

  for (const auto& a : w.actors) {
    if (policy.masks(a.cls, w.tick) || !is_traffic_object(a.cls)) continue;
    const Vec2 local = to_local(w.ego.pose, a.pose.position());
    if (local.norm() > sc.camera.range_m) continue;
    const double reach = cfg.corridor_half_width_m + shape_of(a.cls).width / 2.0;
    if (local.x > 0.0 && std::abs(local.y) < reach && local.x - half_len <= cfg.hazard_range_m) {
      return Action(0.0, 0.8, 0.0);
    }
  }

  // Stop-line targets: visible red lights and unsatisfied visible stop signs.
  std::optional<double> stop_gap;
  auto consider = [&](ObjectClass cls, Vec2 pos, double stop_s) {
    if (policy.masks(cls, w.tick)) return;
    if (!project_object(w.ego.pose, pos, shape_of(cls), sc.camera)) return;
    const double gap = stop_s - w.front_s();
    if (gap < -0.5 || gap > cfg.hazard_range_m) return;
    if (!stop_gap || gap < *stop_gap) stop_gap = gap;
  };
  for (const auto& l : sc.lights) {
    if (l.state_at(w.tick) == LightState::kRed) consider(ObjectClass::kTrafficLight, l.position, l.stop_s);
  }
  for (std::size_t i = 0; i < sc.stop_signs.size(); ++i) {
    if (!w.stop_sign_satisfied[i]) consider(ObjectClass::kStopSign, sc.stop_signs[i].position, sc.stop_signs[i].stop_s);
  }

  const Navi navi = navigation(w);
  control::ControlConfig cc;
  const double steer = (navi.target_point - w.ego.pose.position()).norm() < 1e-6
                           ? 0.0
                           : control::compute_steer(w.ego.pose, navi.target_point, cc.fresh_controller(), w.dt).steer;
  if (stop_gap) {
    const double room = std::max(0.0, *stop_gap - cfg.stop_standoff_m);
    const double v_des = std::sqrt(2.0 * cfg.approach_decel * room);
    if (*stop_gap <= cfg.stop_standoff_m || w.ego.v > v_des) return Action(0.0, 0.8, 0.0);
    return Action(cfg.creep_throttle, 0.0, steer);
  }
  const control::ThrottleBrake tb = control::map_speed_control(SpeedControl::kConstantSpeed, 0.0);
  return Action(tb.throttle, tb.brake, steer);
}

// ---------------------------------------------------------------------------
// Scenario files

namespace detail {

inline Route route_from_json(const Json& j) {
  using namespace json_detail;
  if (j.contains("waypoints")) {
    std::vector<Vec2> pts = at(j, "waypoints").get<std::vector<Vec2>>();
    std::vector<RoadGeometry> tags;
    if (j.contains("geometry")) {
      tags = j["geometry"].get<std::vector<RoadGeometry>>();
    } else {
      tags.assign(pts.empty() ? 0 : pts.size() - 1, RoadGeometry::kStraight);
    }
    return Route(std::move(pts), std::move(tags));
  }
  // Segment form: straights and arcs chained from a start pose, discretized
  // every `step` metres.
  const Json& segs = at(j, "segments");
  Pose p = j.contains("start") ? j["start"].get<Pose>() : Pose{};
  const double step = j.value("step", 2.0);
  std::vector<Vec2> pts{p.position()};
  std::vector<RoadGeometry> tags;
  for (const auto& s : segs) {
    const std::string type = s.at("type").get<std::string>();
    const bool intersection = s.value("intersection", false);
    if (type == "straight") {
      const double len = number(s, "length");
      const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
      for (int i = 1; i <= n; ++i) {
        const double d = len * i / n;
        pts.push_back({p.x + d * std::cos(p.heading), p.y + d * std::sin(p.heading)});
        tags.push_back(intersection ? RoadGeometry::kIntersection : RoadGeometry::kStraight);
      }
      p.x += len * std::cos(p.heading);
      p.y += len * std::sin(p.heading);
    } else if (type == "arc") {
      const double radius = number(s, "radius");
      const double angle = deg2rad(number(s, "angle_deg"));  // positive turns right
      const double len = radius * std::abs(angle);
      const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
      const double sign = angle > 0 ? 1.0 : -1.0;
      // Centre of the turning circle lies to the turning side.
      const Vec2 centre{p.x - sign * radius * std::sin(p.heading), p.y + sign * radius * std::cos(p.heading)};
      const double start_phi = p.heading - sign * std::numbers::pi / 2.0;
      for (int i = 1; i <= n; ++i) {
        const double phi = start_phi + angle * i / n;
        pts.push_back({centre.x + radius * std::cos(phi), centre.y + radius * std::sin(phi)});
        tags.push_back(intersection ? RoadGeometry::kIntersection
                                    : (angle > 0 ? RoadGeometry::kRightCurve : RoadGeometry::kLeftCurve));
      }
      p.heading = wrap_angle(p.heading + angle);
      p.x = pts.back().x;
      p.y = pts.back().y;
    } else {
      throw SchemaViolation("route/segments/type", "unknown segment type '" + type + "'");
    }
  }
  return Route(std::move(pts), std::move(tags));
}

}  // namespace detail

inline Scenario scenario_from_json(const Json& j) {
  using namespace json_detail;
  Scenario sc;
  sc.name = at(j, "name").get<std::string>();
  sc.script_key = j.value("script_key", sc.name);
  sc.seed = j.value("seed", std::uint64_t{0});
  sc.dt = j.value("dt", 0.1);
  sc.time_limit_ticks = j.value("time_limit_ticks", 600L);
  if (!(sc.dt > 0.0)) throw SchemaViolation("dt", "must be positive");
  if (sc.time_limit_ticks <= 0) throw SchemaViolation("time_limit_ticks", "must be positive");
  if (j.contains("weather")) sc.weather = token<Weather>(j, "weather");
  if (j.contains("daylight")) sc.daylight = token<Daylight>(j, "daylight");
  if (j.contains("traffic_density")) sc.traffic_density = token<TrafficDensity>(j, "traffic_density");
  sc.route = detail::route_from_json(at(j, "route"));

  if (j.contains("ego")) {
    const Json& e = j["ego"];
    sc.ego_start = {e.value("x", 0.0), e.value("y", 0.0), e.value("heading", 0.0)};
    sc.ego_start_v = e.value("v", 0.0);
  } else {
    const Vec2 p0 = sc.route.point_at(0.0);
    sc.ego_start = {p0.x, p0.y, sc.route.direction_at(0.0)};
  }

  std::set<int> ids;
  auto claim = [&](int id) {
    if (!ids.insert(id).second) throw SchemaViolation("id", "duplicate object id " + std::to_string(id));
    return id;
  };
  for (const auto& a : j.value("actors", Json::array())) {
    Actor actor;
    actor.id = claim(a.at("id").get<int>());
    actor.cls = token<ObjectClass>(a, "class");
    if (actor.cls == ObjectClass::kTrafficLight || actor.cls == ObjectClass::kStopSign ||
        actor.cls == ObjectClass::kUnknown) {
      throw SchemaViolation("actors/class", "signals are declared separately");
    }
    actor.pose.heading = a.value("heading", 0.0);
    double last_t = -std::numeric_limits<double>::infinity();
    for (const auto& p : at(a, "script")) {
      if (!p.is_array() || p.size() != 3) throw SchemaViolation("actors/script", "expected [t, x, y]");
      ScriptPoint sp{p[0].get<double>(), {p[1].get<double>(), p[2].get<double>()}};
      if (sp.t < last_t) throw SchemaViolation("actors/script", "times must be monotone");
      last_t = sp.t;
      actor.script.push_back(sp);
    }
    if (actor.script.empty()) throw SchemaViolation("actors/script", "empty script");
    sc.actors.push_back(std::move(actor));
  }
  for (const auto& l : j.value("traffic_lights", Json::array())) {
    TrafficLight tl;
    tl.id = claim(l.at("id").get<int>());
    tl.position = at(l, "position").get<Vec2>();
    tl.stop_s = number(l, "stop_s");
    tl.phases.clear();
    for (const auto& ph : at(l, "phases")) {
      if (!ph.is_array() || ph.size() != 2) throw SchemaViolation("traffic_lights/phases", "expected [tick, state]");
      tl.phases.emplace_back(ph[0].get<long>(), ph[1].get<LightState>());
    }
    sc.lights.push_back(std::move(tl));
  }
  for (const auto& s : j.value("stop_signs", Json::array())) {
    sc.stop_signs.push_back({claim(s.at("id").get<int>()), at(s, "position").get<Vec2>(), number(s, "stop_s")});
  }
  for (const auto& o : j.value("static_obstacles", Json::array())) {
    sc.obstacles.push_back({claim(o.at("id").get<int>()), at(o, "pose").get<Pose>(), number(o, "length"),
                            number(o, "width")});
  }
  if (j.contains("deficit_policy")) {
    const Json& d = j["deficit_policy"];
    sc.deficit_policy.classes = d.value("classes", Json::array()).get<std::vector<ObjectClass>>();
    for (ObjectClass c : sc.deficit_policy.classes) {
      if (!maskable_class(c)) {
        throw SchemaViolation("deficit_policy/classes", "class '" + std::string(to_string(c)) + "' cannot be masked");
      }
    }
    sc.deficit_policy.from_tick = d.value("from_tick", 0L);
    if (d.contains("to_tick") && !d["to_tick"].is_null()) sc.deficit_policy.to_tick = d["to_tick"].get<long>();
  }
  sc.timing_jitter_s = j.value("timing_jitter_s", 0.0);
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Json j = Json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw ConfigError("scenario is not valid JSON: " + path);
  try {
    return scenario_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaViolation(path, e.what());
  }
}

}  // namespace rco::sim
