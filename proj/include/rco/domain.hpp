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

// Shared vocabulary: actuator actions, condition-action plans, symbolic
// perception snapshots, hazards and safety envelopes, plus their canonical
// JSON form (snake_case keys, enums as lowercase strings).

#pragma once

#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rco/common.hpp"

namespace rco {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Enumerations

enum class Behavior { kMoveForward, kStop, kChangeLaneLeft, kChangeLaneRight, kTurnLeft, kTurnRight };

enum class SpeedControl {
  kConstantSpeed,
  kDeceleration,
  kQuickDeceleration,
  kDecelerationToZero,
  kAcceleration,
  kQuickAcceleration,
};

/// Closed set: inconsistent deficits are never a condition, they force a replan.
enum class ExecutionCondition { kConsistentNoImmediateHazard, kConsistentImmediateHazard };

enum class View { kLeft, kFront, kRight };

enum class ObjectClass {
  kCar,
  kTruck,
  kBus,
  kBicycle,
  kPedestrian,
  kMotorcycle,
  kTrafficLight,
  kStopSign,
  kUnknown,  // hazards only
};

enum class Motion { kStationary, kOncoming, kCrossing, kSameDirection, kUnknown };
enum class RoadGeometry { kStraight, kLeftCurve, kRightCurve, kIntersection };
enum class Weather { kClear, kRain, kFog, kSnow };
enum class Daylight { kDay, kDusk, kNight };
enum class TrafficDensity { kLow, kMedium, kHigh };
enum class Strategy { kMove, kStopObserveMove };

template <>
struct EnumNames<Behavior> {
  static constexpr std::array<std::pair<Behavior, std::string_view>, 6> kNames{{
      {Behavior::kMoveForward, "move_forward"},
      {Behavior::kStop, "stop"},
      {Behavior::kChangeLaneLeft, "change_lane_left"},
      {Behavior::kChangeLaneRight, "change_lane_right"},
      {Behavior::kTurnLeft, "turn_left"},
      {Behavior::kTurnRight, "turn_right"},
  }};
};

template <>
struct EnumNames<SpeedControl> {
  static constexpr std::array<std::pair<SpeedControl, std::string_view>, 6> kNames{{
      {SpeedControl::kConstantSpeed, "constant_speed"},
      {SpeedControl::kDeceleration, "deceleration"},
      {SpeedControl::kQuickDeceleration, "quick_deceleration"},
      {SpeedControl::kDecelerationToZero, "deceleration_to_zero"},
      {SpeedControl::kAcceleration, "acceleration"},
      {SpeedControl::kQuickAcceleration, "quick_acceleration"},
  }};
};

template <>
struct EnumNames<ExecutionCondition> {
  static constexpr std::array<std::pair<ExecutionCondition, std::string_view>, 2> kNames{{
      {ExecutionCondition::kConsistentNoImmediateHazard, "consistent_no_immediate_hazard"},
      {ExecutionCondition::kConsistentImmediateHazard, "consistent_immediate_hazard"},
  }};
};

template <>
struct EnumNames<View> {
  static constexpr std::array<std::pair<View, std::string_view>, 3> kNames{{
      {View::kLeft, "left"},
      {View::kFront, "front"},
      {View::kRight, "right"},
  }};
};

template <>
struct EnumNames<ObjectClass> {
  static constexpr std::array<std::pair<ObjectClass, std::string_view>, 9> kNames{{
      {ObjectClass::kCar, "car"},
      {ObjectClass::kTruck, "truck"},
      {ObjectClass::kBus, "bus"},
      {ObjectClass::kBicycle, "bicycle"},
      {ObjectClass::kPedestrian, "pedestrian"},
      {ObjectClass::kMotorcycle, "motorcycle"},
      {ObjectClass::kTrafficLight, "traffic_light"},
      {ObjectClass::kStopSign, "stop_sign"},
      {ObjectClass::kUnknown, "unknown"},
  }};
};

template <>
struct EnumNames<Motion> {
  static constexpr std::array<std::pair<Motion, std::string_view>, 5> kNames{{
      {Motion::kStationary, "stationary"},
      {Motion::kOncoming, "oncoming"},
      {Motion::kCrossing, "crossing"},
      {Motion::kSameDirection, "same_direction"},
      {Motion::kUnknown, "unknown"},
  }};
};

template <>
struct EnumNames<RoadGeometry> {
  static constexpr std::array<std::pair<RoadGeometry, std::string_view>, 4> kNames{{
      {RoadGeometry::kStraight, "straight"},
      {RoadGeometry::kLeftCurve, "left_curve"},
      {RoadGeometry::kRightCurve, "right_curve"},
      {RoadGeometry::kIntersection, "intersection"},
  }};
};

template <>
struct EnumNames<Weather> {
  static constexpr std::array<std::pair<Weather, std::string_view>, 4> kNames{{
      {Weather::kClear, "clear"},
      {Weather::kRain, "rain"},
      {Weather::kFog, "fog"},
      {Weather::kSnow, "snow"},
  }};
};

template <>
struct EnumNames<Daylight> {
  static constexpr std::array<std::pair<Daylight, std::string_view>, 3> kNames{{
      {Daylight::kDay, "day"},
      {Daylight::kDusk, "dusk"},
      {Daylight::kNight, "night"},
  }};
};

template <>
struct EnumNames<TrafficDensity> {
  static constexpr std::array<std::pair<TrafficDensity, std::string_view>, 3> kNames{{
      {TrafficDensity::kLow, "low"},
      {TrafficDensity::kMedium, "medium"},
      {TrafficDensity::kHigh, "high"},
  }};
};

template <>
struct EnumNames<Strategy> {
  static constexpr std::array<std::pair<Strategy, std::string_view>, 2> kNames{{
      {Strategy::kMove, "move"},
      {Strategy::kStopObserveMove, "stop_observe_move"},
  }};
};

/// Traffic participants that count toward the hazard proximity ratio.
inline bool is_traffic_object(ObjectClass c) {
  switch (c) {
    case ObjectClass::kCar:
    case ObjectClass::kTruck:
    case ObjectClass::kBus:
    case ObjectClass::kBicycle:
    case ObjectClass::kPedestrian:
    case ObjectClass::kMotorcycle:
      return true;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Actions

struct RawAction {
  double throttle = 0.0;
  double brake = 0.0;
  double steer = 0.0;
};

/// Range check for an actuator triple; NaN is out of range.
inline RawAction validate_action(const RawAction& a) {
  if (!(a.throttle >= 0.0 && a.throttle <= 1.0)) throw OutOfRange("throttle", a.throttle);
  if (!(a.brake >= 0.0 && a.brake <= 1.0)) throw OutOfRange("brake", a.brake);
  if (!(a.steer >= -1.0 && a.steer <= 1.0)) throw OutOfRange("steer", a.steer);
  return a;
}

/// Actuator command executed for one tick. Always within
/// [0,1] x [0,1] x [-1,1]; steer is negative to the left.
class Action {
 public:
  Action() = default;
  Action(double throttle, double brake, double steer) : raw_(validate_action({throttle, brake, steer})) {}
  explicit Action(const RawAction& raw) : raw_(validate_action(raw)) {}

  double throttle() const { return raw_.throttle; }
  double brake() const { return raw_.brake; }
  double steer() const { return raw_.steer; }
  const RawAction& raw() const { return raw_; }

  friend bool operator==(const Action& a, const Action& b) {
    return a.raw_.throttle == b.raw_.throttle && a.raw_.brake == b.raw_.brake &&
           a.raw_.steer == b.raw_.steer;
  }

 private:
  RawAction raw_{};
};

inline Action validate_action(const Action& a) { return Action(validate_action(a.raw())); }

inline const Action kFailSafeStop{0.0, 0.8, 0.0};

struct HighLevelAction {
  Behavior behavior = Behavior::kMoveForward;
  SpeedControl speed = SpeedControl::kConstantSpeed;

  HighLevelAction() = default;
  HighLevelAction(Behavior b, SpeedControl s)
      : behavior(b), speed(b == Behavior::kStop ? SpeedControl::kDecelerationToZero : s) {}

  friend bool operator==(const HighLevelAction&, const HighLevelAction&) = default;
};

struct ConditionActionPair {
  ExecutionCondition condition = ExecutionCondition::kConsistentNoImmediateHazard;
  HighLevelAction action;

  friend bool operator==(const ConditionActionPair&, const ConditionActionPair&) = default;
};

/// Plan-ahead queue, consumed strictly front to back. The limit is fixed at
/// construction and the queue can never hold more pairs than that.
class ActionSequence {
 public:
  ActionSequence() = default;
  ActionSequence(std::vector<ConditionActionPair> pairs, long created_tick, std::size_t limit)
      : pairs_(pairs.begin(), pairs.end()), created_tick_(created_tick), limit_(limit) {
    if (pairs_.size() > limit_) throw OutOfRange("sequence_length", static_cast<double>(pairs_.size()));
  }

  bool empty() const { return pairs_.empty(); }
  std::size_t size() const { return pairs_.size(); }
  std::size_t limit() const { return limit_; }
  long created_tick() const { return created_tick_; }
  const ConditionActionPair& front() const { return pairs_.front(); }
  ConditionActionPair& front() { return pairs_.front(); }
  void pop_front() { pairs_.pop_front(); }
  void clear() { pairs_.clear(); }
  const std::deque<ConditionActionPair>& pairs() const { return pairs_; }

  friend bool operator==(const ActionSequence&, const ActionSequence&) = default;

 private:
  std::deque<ConditionActionPair> pairs_;
  long created_tick_ = 0;
  std::size_t limit_ = 0;
};

// ---------------------------------------------------------------------------
// Perception

struct DeficitRegion {
  View view = View::kFront;
  Rect box;
  std::optional<int> masked_object_id;  // ground truth, never shown to the planner

  friend bool operator==(const DeficitRegion&, const DeficitRegion&) = default;
};

struct VisibleObject {
  ObjectClass cls = ObjectClass::kCar;
  Rect box;
  double range_m = 0.0;

  friend bool operator==(const VisibleObject&, const VisibleObject&) = default;
};

struct CameraView {
  View view = View::kFront;
  std::vector<VisibleObject> visible_objects;
  std::vector<DeficitRegion> deficits;

  friend bool operator==(const CameraView&, const CameraView&) = default;
};

struct Navi {
  Vec2 target_point;
  double current_direction = 0.0;
  RoadGeometry road_geometry = RoadGeometry::kStraight;

  friend bool operator==(const Navi&, const Navi&) = default;
};

struct Surrounding {
  Weather weather = Weather::kClear;
  Daylight daylight = Daylight::kDay;
  TrafficDensity traffic_density = TrafficDensity::kLow;
  std::optional<double> nearest_obstacle_m;

  friend bool operator==(const Surrounding&, const Surrounding&) = default;
};

struct EnvironmentSnapshot {
  long tick = 0;
  std::array<CameraView, 3> perception{
      CameraView{View::kLeft, {}, {}}, CameraView{View::kFront, {}, {}}, CameraView{View::kRight, {}, {}}};
  Navi navi;
  Surrounding surrounding;

  const CameraView& view(View v) const { return perception[static_cast<std::size_t>(v)]; }
  CameraView& view(View v) { return perception[static_cast<std::size_t>(v)]; }

  bool has_deficit() const {
    for (const auto& cv : perception) {
      if (!cv.deficits.empty()) return true;
    }
    return false;
  }

  friend bool operator==(const EnvironmentSnapshot&, const EnvironmentSnapshot&) = default;
};

// ---------------------------------------------------------------------------
// Hazards and plans

struct Hazard {
  ObjectClass object = ObjectClass::kUnknown;
  Motion motion = Motion::kUnknown;

  friend bool operator==(const Hazard&, const Hazard&) = default;
};

using HazardSet = std::vector<Hazard>;

struct MovePlan {
  ActionSequence sequence;
  friend bool operator==(const MovePlan&, const MovePlan&) = default;
};

struct WaitPlan {
  int wait_ticks = 0;
  ExecutionCondition move_trigger = ExecutionCondition::kConsistentNoImmediateHazard;
  friend bool operator==(const WaitPlan&, const WaitPlan&) = default;
};

/// Output of short-term motion planning: either a plan-ahead sequence or a
/// stop-observe-move wait. Exactly one alternative is ever present.
struct MotionPlan {
  std::variant<MovePlan, WaitPlan> body;

  Strategy strategy() const {
    return std::holds_alternative<MovePlan>(body) ? Strategy::kMove : Strategy::kStopObserveMove;
  }
  const MovePlan* move() const { return std::get_if<MovePlan>(&body); }
  const WaitPlan* wait() const { return std::get_if<WaitPlan>(&body); }

  friend bool operator==(const MotionPlan&, const MotionPlan&) = default;
};

// ---------------------------------------------------------------------------
// Safety envelope and measurements

struct SafetyConstraints {
  double v_max = 8.0;    // m/s
  double d_min = 6.0;    // m
  double ac_max = 2.5;   // m/s^2
  double de_max = 6.0;   // m/s^2, magnitude
  double psi_max = 0.5;  // rad/s
  double d_brake = 8.0;  // m

  friend bool operator==(const SafetyConstraints&, const SafetyConstraints&) = default;
};

inline const SafetyConstraints& validate_constraints(const SafetyConstraints& sc) {
  const std::pair<const char*, double> fields[] = {{"v_max", sc.v_max},   {"d_min", sc.d_min},
                                                   {"ac_max", sc.ac_max}, {"de_max", sc.de_max},
                                                   {"psi_max", sc.psi_max}, {"d_brake", sc.d_brake}};
  for (const auto& [name, v] : fields) {
    if (!(v > 0.0) || !std::isfinite(v)) throw OutOfRange(name, v);
  }
  return sc;
}

inline constexpr double kNoLeadVehicle = std::numeric_limits<double>::infinity();

struct VehicleMeasurements {
  double v = 0.0;        // m/s, >= 0
  double a_x = 0.0;      // m/s^2, negative while decelerating
  double omega_z = 0.0;  // rad/s
  double d_follow = kNoLeadVehicle;

  friend bool operator==(const VehicleMeasurements&, const VehicleMeasurements&) = default;
};

// ---------------------------------------------------------------------------
// JSON
//
// Parsing helpers convert every nlohmann failure into SchemaViolation so no
// library exception type escapes a parser.

namespace json_detail {

inline const Json& at(const Json& j, const char* key) {
  if (!j.is_object()) throw SchemaViolation(key, "parent is not an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaViolation(key, "missing field");
  return *it;
}

inline double number(const Json& j, const char* key) {
  const Json& v = at(j, key);
  if (!v.is_number()) throw SchemaViolation(key, "expected number");
  return v.get<double>();
}

inline long integer(const Json& j, const char* key) {
  const Json& v = at(j, key);
  if (!v.is_number_integer()) throw SchemaViolation(key, "expected integer");
  return v.get<long>();
}

inline std::optional<double> optional_number(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw SchemaViolation(key, "expected number or null");
  return it->get<double>();
}

template <typename E>
E token(const Json& j, const char* key) {
  const Json& v = at(j, key);
  if (!v.is_string()) throw SchemaViolation(key, "expected string token");
  return enum_from_string<E>(v.get_ref<const std::string&>(), key);
}

}  // namespace json_detail

#define RCO_JSON_ENUM(E)                                                        \
  template <typename BasicJsonType>                                             \
  inline void to_json(BasicJsonType& j, const E& e) {                           \
    j = std::string(::rco::to_string(e));                                       \
  }                                                                             \
  template <typename BasicJsonType>                                             \
  inline void from_json(const BasicJsonType& j, E& e) {                         \
    if (!j.is_string()) throw ::rco::SchemaViolation(#E, "expected string");    \
    e = ::rco::enum_from_string<E>(j.template get<std::string>(), #E);          \
  }

RCO_JSON_ENUM(Behavior)
RCO_JSON_ENUM(SpeedControl)
RCO_JSON_ENUM(ExecutionCondition)
RCO_JSON_ENUM(View)
RCO_JSON_ENUM(ObjectClass)
RCO_JSON_ENUM(Motion)
RCO_JSON_ENUM(RoadGeometry)
RCO_JSON_ENUM(Weather)
RCO_JSON_ENUM(Daylight)
RCO_JSON_ENUM(TrafficDensity)
RCO_JSON_ENUM(Strategy)

inline void to_json(Json& j, const Vec2& v) { j = Json::array({v.x, v.y}); }
inline void from_json(const Json& j, Vec2& v) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw SchemaViolation("point", "expected [x, y]");
  }
  v = {j[0].get<double>(), j[1].get<double>()};
}

inline void to_json(Json& j, const Pose& p) { j = Json{{"x", p.x}, {"y", p.y}, {"heading", p.heading}}; }
inline void from_json(const Json& j, Pose& p) {
  using namespace json_detail;
  p = {number(j, "x"), number(j, "y"), number(j, "heading")};
}

inline void to_json(Json& j, const Rect& r) { j = Json::array({r.x0, r.y0, r.x1, r.y1}); }
inline void from_json(const Json& j, Rect& r) {
  if (!j.is_array() || j.size() != 4) throw SchemaViolation("box", "expected [x0, y0, x1, y1]");
  for (const auto& e : j) {
    if (!e.is_number()) throw SchemaViolation("box", "expected numbers");
  }
  r = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  require_valid_rect(r);
}

inline void to_json(Json& j, const Action& a) {
  j = Json{{"throttle", a.throttle()}, {"brake", a.brake()}, {"steer", a.steer()}};
}
inline void from_json(const Json& j, Action& a) {
  using namespace json_detail;
  a = Action(number(j, "throttle"), number(j, "brake"), number(j, "steer"));
}

inline void to_json(Json& j, const HighLevelAction& a) {
  j = Json{{"behavior", a.behavior}, {"speed", a.speed}};
}
inline void from_json(const Json& j, HighLevelAction& a) {
  using namespace json_detail;
  a = HighLevelAction(token<Behavior>(j, "behavior"), token<SpeedControl>(j, "speed"));
}

inline void to_json(Json& j, const ConditionActionPair& p) {
  j = Json{{"condition", p.condition}, {"behavior", p.action.behavior}, {"speed", p.action.speed}};
}
inline void from_json(const Json& j, ConditionActionPair& p) {
  using namespace json_detail;
  p.condition = token<ExecutionCondition>(j, "condition");
  p.action = HighLevelAction(token<Behavior>(j, "behavior"), token<SpeedControl>(j, "speed"));
}

inline void to_json(Json& j, const ActionSequence& s) {
  j = Json{{"pairs", Json::array()}, {"created_tick", s.created_tick()}, {"limit", s.limit()}};
  for (const auto& p : s.pairs()) j["pairs"].push_back(p);
}
inline void from_json(const Json& j, ActionSequence& s) {
  using namespace json_detail;
  const Json& arr = at(j, "pairs");
  if (!arr.is_array()) throw SchemaViolation("pairs", "expected array");
  std::vector<ConditionActionPair> pairs;
  for (const auto& e : arr) pairs.push_back(e.get<ConditionActionPair>());
  const long limit = integer(j, "limit");
  if (limit < 0) throw SchemaViolation("limit", "negative");
  s = ActionSequence(std::move(pairs), integer(j, "created_tick"), static_cast<std::size_t>(limit));
}

inline void to_json(Json& j, const DeficitRegion& d) {
  j = Json{{"view", d.view}, {"box", d.box}};
  j["masked_object_id"] = d.masked_object_id ? Json(*d.masked_object_id) : Json(nullptr);
}
inline void from_json(const Json& j, DeficitRegion& d) {
  using namespace json_detail;
  d.view = token<View>(j, "view");
  d.box = at(j, "box").get<Rect>();
  auto it = j.find("masked_object_id");
  d.masked_object_id = (it == j.end() || it->is_null()) ? std::nullopt : std::optional<int>(it->get<int>());
}

inline void to_json(Json& j, const VisibleObject& o) {
  j = Json{{"class", o.cls}, {"box", o.box}, {"range_m", o.range_m}};
}
inline void from_json(const Json& j, VisibleObject& o) {
  using namespace json_detail;
  o = {token<ObjectClass>(j, "class"), at(j, "box").get<Rect>(), number(j, "range_m")};
}

inline void to_json(Json& j, const CameraView& c) {
  j = Json{{"view", c.view}, {"visible_objects", c.visible_objects}, {"deficits", c.deficits}};
}
inline void from_json(const Json& j, CameraView& c) {
  using namespace json_detail;
  c.view = token<View>(j, "view");
  c.visible_objects = at(j, "visible_objects").get<std::vector<VisibleObject>>();
  c.deficits = at(j, "deficits").get<std::vector<DeficitRegion>>();
}

inline void to_json(Json& j, const Navi& n) {
  j = Json{{"target_point", n.target_point},
           {"current_direction", n.current_direction},
           {"road_geometry", n.road_geometry}};
}
inline void from_json(const Json& j, Navi& n) {
  using namespace json_detail;
  n = {at(j, "target_point").get<Vec2>(), number(j, "current_direction"),
       token<RoadGeometry>(j, "road_geometry")};
}

inline void to_json(Json& j, const Surrounding& s) {
  j = Json{{"weather", s.weather}, {"daylight", s.daylight}, {"traffic_density", s.traffic_density}};
  j["nearest_obstacle_m"] = s.nearest_obstacle_m ? Json(*s.nearest_obstacle_m) : Json(nullptr);
}
inline void from_json(const Json& j, Surrounding& s) {
  using namespace json_detail;
  s.weather = token<Weather>(j, "weather");
  s.daylight = token<Daylight>(j, "daylight");
  s.traffic_density = token<TrafficDensity>(j, "traffic_density");
  s.nearest_obstacle_m = optional_number(j, "nearest_obstacle_m");
  if (s.nearest_obstacle_m && *s.nearest_obstacle_m < 0.0) {
    throw OutOfRange("nearest_obstacle_m", *s.nearest_obstacle_m);
  }
}

inline void to_json(Json& j, const EnvironmentSnapshot& e) {
  j = Json{{"tick", e.tick},
           {"perception", Json::array({e.perception[0], e.perception[1], e.perception[2]})},
           {"navi", e.navi},
           {"surrounding", e.surrounding}};
}
inline void from_json(const Json& j, EnvironmentSnapshot& e) {
  using namespace json_detail;
  e.tick = integer(j, "tick");
  const Json& p = at(j, "perception");
  if (!p.is_array() || p.size() != 3) throw SchemaViolation("perception", "expected three views");
  for (std::size_t i = 0; i < 3; ++i) {
    e.perception[i] = p[i].get<CameraView>();
    if (static_cast<std::size_t>(e.perception[i].view) != i) {
      throw SchemaViolation("perception", "views must be ordered left, front, right");
    }
  }
  e.navi = at(j, "navi").get<Navi>();
  e.surrounding = at(j, "surrounding").get<Surrounding>();
}

inline void to_json(Json& j, const Hazard& h) { j = Json{{"object", h.object}, {"motion", h.motion}}; }
inline void from_json(const Json& j, Hazard& h) {
  using namespace json_detail;
  h = {token<ObjectClass>(j, "object"), token<Motion>(j, "motion")};
}

inline void to_json(Json& j, const MotionPlan& p) {
  if (const auto* m = p.move()) {
    j = Json{{"strategy", Strategy::kMove}, {"sequence", m->sequence}};
  } else {
    const auto* w = p.wait();
    j = Json{{"strategy", Strategy::kStopObserveMove},
             {"wait_ticks", w->wait_ticks},
             {"move_trigger", w->move_trigger}};
  }
}
inline void from_json(const Json& j, MotionPlan& p) {
  using namespace json_detail;
  if (token<Strategy>(j, "strategy") == Strategy::kMove) {
    p.body = MovePlan{at(j, "sequence").get<ActionSequence>()};
  } else {
    const long w = integer(j, "wait_ticks");
    if (w < 0) throw SchemaViolation("wait_ticks", "negative");
    p.body = WaitPlan{static_cast<int>(w), token<ExecutionCondition>(j, "move_trigger")};
  }
}

inline void to_json(Json& j, const SafetyConstraints& sc) {
  j = Json{{"v_max", sc.v_max},   {"d_min", sc.d_min},     {"ac_max", sc.ac_max},
           {"de_max", sc.de_max}, {"psi_max", sc.psi_max}, {"d_brake", sc.d_brake}};
}
inline void from_json(const Json& j, SafetyConstraints& sc) {
  using namespace json_detail;
  sc = {number(j, "v_max"),  number(j, "d_min"),   number(j, "ac_max"),
        number(j, "de_max"), number(j, "psi_max"), number(j, "d_brake")};
  validate_constraints(sc);
}

inline void to_json(Json& j, const VehicleMeasurements& m) {
  j = Json{{"v", m.v}, {"a_x", m.a_x}, {"omega_z", m.omega_z}};
  j["d_follow"] = std::isinf(m.d_follow) ? Json(nullptr) : Json(m.d_follow);
}
inline void from_json(const Json& j, VehicleMeasurements& m) {
  using namespace json_detail;
  m.v = number(j, "v");
  if (m.v < 0.0) throw OutOfRange("v", m.v);
  m.a_x = number(j, "a_x");
  m.omega_z = number(j, "omega_z");
  m.d_follow = optional_number(j, "d_follow").value_or(kNoLeadVehicle);
}

/// Parses canonical JSON text into T, mapping any parse failure to SchemaViolation.
template <typename T>
T parse_json_as(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaViolation("byte " + std::to_string(e.byte), e.what());
  }
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaViolation("value", e.what());
  }
}

}  // namespace rco
