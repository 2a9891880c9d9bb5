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

#include <string>

#include "test_util.hpp"

namespace rco::backend {
namespace {

TEST(ParseStructuredTest, MovePlan) {
  const auto v = parse_structured(
      R"({"strategy":"move","pairs":[{"condition":"consistent_no_immediate_hazard","behavior":"move_forward","speed":"constant_speed"}]})",
      Purpose::kShortTermMotion);
  const auto& plan = std::get<PlanSkeleton>(v);
  ASSERT_EQ(plan.strategy(), Strategy::kMove);
  const auto& pairs = std::get<std::vector<ConditionActionPair>>(plan.body);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].action.behavior, Behavior::kMoveForward);
}

TEST(ParseStructuredTest, StopObserveMove) {
  const auto v = parse_structured(R"({"strategy":"stop_observe_move","wait":3,"trigger":"consistent_no_immediate_hazard"})",
                                  Purpose::kShortTermMotion);
  const auto& plan = std::get<PlanSkeleton>(v);
  EXPECT_EQ(std::get<WaitPlan>(plan.body), (WaitPlan{3, ExecutionCondition::kConsistentNoImmediateHazard}));
}

TEST(ParseStructuredTest, ObjectEmbeddedInProse) {
  const auto v = parse_structured(
      "Sure. The answer is {\"hazards\": [{\"object\": \"pedestrian\", \"motion\": \"crossing\"}], "
      "\"strategy\": \"stop_observe_move\"} as requested {not json}",
      Purpose::kHazardAndPlan);
  const auto& r = std::get<HazardReport>(v);
  ASSERT_EQ(r.hazards.size(), 1u);
  EXPECT_EQ(r.hazards[0], (Hazard{ObjectClass::kPedestrian, Motion::kCrossing}));
}

TEST(ParseStructuredTest, BracesInsideStrings) {
  const auto v = parse_structured(R"({"note": "a } brace", "hazards": [], "strategy": "move"})", Purpose::kHazardAndPlan);
  EXPECT_EQ(std::get<HazardReport>(v).strategy, Strategy::kMove);
}

TEST(ParseStructuredTest, Rejections) {
  EXPECT_THROW(parse_structured("no json here at all", Purpose::kHazardAndPlan), SchemaViolation);
  EXPECT_THROW(parse_structured("{broken", Purpose::kHazardAndPlan), SchemaViolation);
  EXPECT_THROW(parse_structured(R"({"hazards": [], "strategy": "sprint"})", Purpose::kHazardAndPlan), SchemaViolation);
  EXPECT_THROW(parse_structured(R"({"hazards": [{"object": "ghost", "motion": "crossing"}], "strategy": "move"})",
                                Purpose::kHazardAndPlan),
               SchemaViolation);
  EXPECT_THROW(parse_structured(R"({"strategy":"stop_observe_move","wait":-1,"trigger":"consistent_no_immediate_hazard"})",
                                Purpose::kShortTermMotion),
               SchemaViolation);
  EXPECT_THROW(parse_structured(R"({"v_max": -2, "d_min": 5, "ac_max": 3, "de_max": 5, "psi_max": 0.6, "d_brake": 10})",
                                Purpose::kSafetyConstraints),
               SchemaViolation);
}

TEST(ParseStructuredTest, ErrorCarriesLocation) {
  try {
    parse_structured(R"(xx {"hazards": [{"object": "pedestrian", "motion": "flying"}], "strategy": "move"})",
                     Purpose::kHazardAndPlan);
    FAIL();
  } catch (const SchemaViolation& e) {
    EXPECT_NE(e.where().find("byte 3"), std::string::npos) << e.where();
    EXPECT_NE(e.where().find("hazards/0"), std::string::npos) << e.where();
  }
}

// Mutated valid responses must either parse completely or throw
// SchemaViolation; nothing else may escape.
TEST(ParseStructuredTest, FuzzNeverLeaksOtherExceptions) {
  const std::string seeds[] = {
      R"({"strategy":"move","pairs":[{"condition":"consistent_no_immediate_hazard","behavior":"move_forward","speed":"constant_speed"}]})",
      R"({"strategy":"stop_observe_move","wait":3,"trigger":"consistent_immediate_hazard"})",
      R"({"hazards":[{"object":"bicycle","motion":"oncoming"}],"strategy":"move"})",
      R"({"v_max": 10, "d_min": 5, "ac_max": 3, "de_max": 5, "psi_max": 0.6, "d_brake": 10})"};
  const char alphabet[] = "{}[]\":,0123456789.-eE abcxyz\\";
  SplitMix64 rng(31337);
  int parsed = 0;
  for (int i = 0; i < 20000; ++i) {
    std::string s = seeds[rng.integer(0, 3)];
    const int edits = static_cast<int>(rng.integer(1, 4));
    for (int e = 0; e < edits; ++e) {
      const auto pos = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(s.size()) - 1));
      switch (rng.integer(0, 2)) {
        case 0: s[pos] = alphabet[rng.integer(0, sizeof(alphabet) - 2)]; break;
        case 1: s.erase(pos, 1); break;
        default: s.insert(pos, 1, alphabet[rng.integer(0, sizeof(alphabet) - 2)]); break;
      }
      if (s.empty()) s = "{";
    }
    const Purpose p = all_values<Purpose>()[static_cast<std::size_t>(rng.integer(0, 2))];
    try {
      parse_structured(s, p);
      ++parsed;
    } catch (const SchemaViolation&) {
    } catch (const std::exception& e) {
      ADD_FAILURE() << "leaked " << e.what() << " for input " << s;
    }
  }
  EXPECT_GT(parsed, 0);
}

TEST(ScriptedBackendTest, BundledTableAnswersPedestrianCross) {
  ScriptedBackend b = testing_util::bundled_table();
  const auto r = b.call({Purpose::kHazardAndPlan, "", Json{{"scenario_key", "pedestrian_cross"}}, 1000});
  const auto& rep = std::get<HazardReport>(r.parsed);
  ASSERT_EQ(rep.hazards.size(), 1u);
  EXPECT_EQ(rep.hazards[0], (Hazard{ObjectClass::kPedestrian, Motion::kCrossing}));
  EXPECT_EQ(rep.strategy, Strategy::kStopObserveMove);
}

TEST(ScriptedBackendTest, BundledTableAnswersBicycleOncoming) {
  ScriptedBackend b = testing_util::bundled_table();
  const auto r = b.call({Purpose::kHazardAndPlan, "", Json{{"scenario_key", "bicycle_oncoming"}}, 1000});
  const auto& rep = std::get<HazardReport>(r.parsed);
  ASSERT_EQ(rep.hazards.size(), 1u);
  EXPECT_EQ(rep.hazards[0], (Hazard{ObjectClass::kBicycle, Motion::kOncoming}));
  EXPECT_EQ(rep.strategy, Strategy::kMove);
}

TEST(ScriptedBackendTest, SituationKeyTakesPrecedence) {
  ScriptedBackend b;
  b.set(Purpose::kHazardAndPlan, "k", R"({"hazards": [], "strategy": "stop_observe_move"})");
  b.set(Purpose::kHazardAndPlan, "k@side", R"({"hazards": [], "strategy": "move"})");
  auto strategy = [&](const char* situation) {
    return std::get<HazardReport>(
               b.call({Purpose::kHazardAndPlan, "", Json{{"scenario_key", "k"}, {"situation", situation}}, 10}).parsed)
        .strategy;
  };
  EXPECT_EQ(strategy("side"), Strategy::kMove);
  EXPECT_EQ(strategy("path"), Strategy::kStopObserveMove);
}

TEST(ScriptedBackendTest, MissAndBadEntryAreSchemaViolations) {
  ScriptedBackend b;
  b.set(Purpose::kShortTermMotion, "bad", "not json");
  try {
    b.call({Purpose::kHazardAndPlan, "", Json{{"scenario_key", "unknown"}}, 10});
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendError::Kind::kSchemaViolation);
  }
  try {
    b.call({Purpose::kShortTermMotion, "", Json{{"scenario_key", "bad"}}, 10});
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendError::Kind::kSchemaViolation);
  }
}

TEST(ScriptedBackendTest, TableFileFormat) {
  const Json j = {{"latency_ms", 40},
                  {"entries", Json::array({Json{{"purpose", "hazard_and_plan"},
                                                {"key", "x"},
                                                {"response", Json{{"hazards", Json::array()}, {"strategy", "move"}}}}})}};
  ScriptedBackend b = ScriptedBackend::from_json(j);
  EXPECT_EQ(b.size(), 1u);
  EXPECT_EQ(b.latency_ms(), 40.0);
  EXPECT_EQ(b.call({Purpose::kHazardAndPlan, "", Json{{"scenario_key", "x"}}, 10}).latency_ms, 40.0);
  EXPECT_THROW(ScriptedBackend::from_json(Json{{"entries", Json::array({Json{{"purpose", "dance"}, {"key", "x"}, {"response", "{}"}}})}}),
               SchemaViolation);
  EXPECT_THROW(ScriptedBackend::load("/nonexistent/table.json"), ConfigError);
}

TEST(ScriptedBackendTest, EveryBundledEntryParses) {
  const Json j = Json::parse(std::ifstream(testing_util::source_path("data/scripted_backend.json")));
  for (const auto& e : j["entries"]) {
    const std::string raw = e["response"].is_string() ? e["response"].get<std::string>() : e["response"].dump();
    EXPECT_NO_THROW(parse_structured(raw, e["purpose"].get<Purpose>())) << e["key"];
  }
}

}  // namespace
}  // namespace rco::backend
