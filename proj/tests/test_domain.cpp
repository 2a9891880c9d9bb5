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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_util.hpp"

namespace rco {
namespace {

TEST(ActionTest, AcceptsClosedRange) {
  EXPECT_NO_THROW(Action(0.7, 0.0, 0.0));
  EXPECT_NO_THROW(Action(0.0, 0.0, 0.0));
  EXPECT_NO_THROW(Action(1.0, 1.0, -1.0));
  EXPECT_NO_THROW(Action(0.0, 0.0, 1.0));
}

TEST(ActionTest, RejectsOutOfRangeWithField) {
  try {
    Action(1.2, 0.0, 0.0);
    FAIL() << "expected OutOfRange";
  } catch (const OutOfRange& e) {
    EXPECT_EQ(e.field(), "throttle");
    EXPECT_DOUBLE_EQ(e.value(), 1.2);
  }
  EXPECT_THROW(Action(0.0, -0.1, 0.0), OutOfRange);
  EXPECT_THROW(Action(0.0, 0.0, 1.5), OutOfRange);
  EXPECT_THROW(Action(std::nan(""), 0.0, 0.0), OutOfRange);
}

TEST(ActionTest, FailSafeStopIsFixed) {
  EXPECT_EQ(kFailSafeStop, Action(0.0, 0.8, 0.0));
}

TEST(HighLevelActionTest, StopForcesDecelerationToZero) {
  for (SpeedControl s : all_values<SpeedControl>()) {
    HighLevelAction a(Behavior::kStop, s);
    EXPECT_EQ(a.speed, SpeedControl::kDecelerationToZero);
  }
  HighLevelAction m(Behavior::kMoveForward, SpeedControl::kAcceleration);
  EXPECT_EQ(m.speed, SpeedControl::kAcceleration);
}

TEST(HighLevelActionTest, JsonNormalizesStop) {
  const Json j = {{"behavior", "stop"}, {"speed", "acceleration"}};
  EXPECT_EQ(j.get<HighLevelAction>().speed, SpeedControl::kDecelerationToZero);
}

TEST(ActionSequenceTest, LimitIsEnforcedAtConstruction) {
  const ConditionActionPair p{};
  EXPECT_NO_THROW(ActionSequence(std::vector<ConditionActionPair>(5, p), 0, 5));
  EXPECT_THROW(ActionSequence(std::vector<ConditionActionPair>(6, p), 0, 5), OutOfRange);
}

TEST(ActionSequenceTest, ConsumesFrontToBack) {
  ConditionActionPair a{ExecutionCondition::kConsistentNoImmediateHazard, {Behavior::kMoveForward, SpeedControl::kAcceleration}};
  ConditionActionPair b{ExecutionCondition::kConsistentImmediateHazard, {Behavior::kStop, SpeedControl::kDecelerationToZero}};
  ActionSequence s({a, b}, 3, 5);
  EXPECT_EQ(s.created_tick(), 3);
  EXPECT_EQ(s.front(), a);
  s.pop_front();
  EXPECT_EQ(s.front(), b);
  s.pop_front();
  EXPECT_TRUE(s.empty());
}

TEST(EnumTest, TokensRoundTripAndUnknownThrows) {
  for (Behavior b : all_values<Behavior>()) EXPECT_EQ(enum_from_string<Behavior>(to_string(b)), b);
  for (SpeedControl s : all_values<SpeedControl>()) EXPECT_EQ(enum_from_string<SpeedControl>(to_string(s)), s);
  EXPECT_EQ(to_string(ExecutionCondition::kConsistentImmediateHazard), "consistent_immediate_hazard");
  EXPECT_THROW(enum_from_string<Behavior>("MoveForward"), SchemaViolation);
  EXPECT_THROW(enum_from_string<Behavior>("fly"), SchemaViolation);
}

TEST(JsonTest, SnapshotRoundTrip) {
  EnvironmentSnapshot s;
  s.tick = 42;
  s.view(View::kFront).deficits.push_back({View::kFront, {0.4, 0.4, 0.5, 0.6}, 7});
  s.view(View::kLeft).visible_objects.push_back({ObjectClass::kCar, {0.1, 0.2, 0.3, 0.4}, 12.5});
  s.navi = {{10.0, -2.0}, 0.25, RoadGeometry::kIntersection};
  s.surrounding = {Weather::kRain, Daylight::kNight, TrafficDensity::kHigh, 9.5};
  const auto back = parse_json_as<EnvironmentSnapshot>(Json(s).dump());
  EXPECT_EQ(back, s);
}

TEST(JsonTest, MotionPlanRoundTrip) {
  ConditionActionPair p{ExecutionCondition::kConsistentNoImmediateHazard, {Behavior::kTurnLeft, SpeedControl::kDeceleration}};
  const MotionPlan move{MovePlan{ActionSequence({p, p}, 9, 5)}};
  EXPECT_EQ(parse_json_as<MotionPlan>(Json(move).dump()), move);
  const MotionPlan wait{WaitPlan{3, ExecutionCondition::kConsistentNoImmediateHazard}};
  EXPECT_EQ(parse_json_as<MotionPlan>(Json(wait).dump()), wait);
}

TEST(JsonTest, MeasurementsWithoutLeadVehicle) {
  VehicleMeasurements m{4.0, -1.0, 0.1, kNoLeadVehicle};
  const Json j = m;
  EXPECT_TRUE(j["d_follow"].is_null());
  EXPECT_EQ(j.get<VehicleMeasurements>(), m);
}

TEST(JsonTest, MalformedInputIsSchemaViolation) {
  EXPECT_THROW(parse_json_as<Action>("{\"throttle\": 0.5"), SchemaViolation);
  EXPECT_THROW(parse_json_as<Action>("{\"throttle\": \"x\", \"brake\": 0, \"steer\": 0}"), SchemaViolation);
  EXPECT_THROW(parse_json_as<Action>("{\"throttle\": 2, \"brake\": 0, \"steer\": 0}"), OutOfRange);
  EXPECT_THROW(parse_json_as<Rect>("[0.5, 0.5, 0.4, 0.6]"), OutOfRange);
  EXPECT_THROW(parse_json_as<SafetyConstraints>(
                   R"({"v_max": 0, "d_min": 1, "ac_max": 1, "de_max": 1, "psi_max": 1, "d_brake": 1})"),
               OutOfRange);
}

TEST(GeometryTest, ToLocalFollowsRightHandedConvention) {
  const Pose ego{0.0, 0.0, 0.0};
  const Vec2 right = to_local(ego, {0.0, 2.0});
  EXPECT_DOUBLE_EQ(right.x, 0.0);
  EXPECT_DOUBLE_EQ(right.y, 2.0);
  const Pose turned{1.0, 1.0, std::numbers::pi / 2};
  const Vec2 ahead = to_local(turned, {1.0, 4.0});
  EXPECT_NEAR(ahead.x, 3.0, 1e-12);
  EXPECT_NEAR(ahead.y, 0.0, 1e-12);
}

TEST(GeometryTest, WrapAngle) {
  EXPECT_NEAR(wrap_angle(3.0 * std::numbers::pi), -std::numbers::pi, 1e-12);
  EXPECT_NEAR(wrap_angle(-0.5), -0.5, 1e-15);
  EXPECT_NEAR(wrap_angle(2.0 * std::numbers::pi + 0.1), 0.1, 1e-12);
}

TEST(SplitMix64Test, KnownSequenceAndRanges) {
  // Reference values of splitmix64 seeded with 0.
  SplitMix64 r(0);
  EXPECT_EQ(r.next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(r.next(), 0x6E789E6AA1B965F4ULL);
  SplitMix64 q(123);
  for (int i = 0; i < 1000; ++i) {
    const double u = q.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const auto k = q.integer(-3, 3);
    EXPECT_GE(k, -3);
    EXPECT_LE(k, 3);
  }
}

}  // namespace
}  // namespace rco
