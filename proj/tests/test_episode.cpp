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

#include <algorithm>

#include "test_util.hpp"

namespace rco::episode {
namespace {

using testing_util::bundled;

BackendFactory table_factory() {
  const backend::ScriptedBackend table = testing_util::bundled_table();
  return [table] { return std::make_unique<backend::ScriptedBackend>(table); };
}

EpisodeOutput run(const std::string& name, Mode mode, const EpisodeConfig& cfg = {}) {
  backend::ScriptedBackend table = testing_util::bundled_table();
  return run_episode(bundled(name), mode, mode == Mode::kRco ? &table : nullptr, nullptr, cfg);
}

bool has(const metrics::EpisodeResult& r, sim::InfractionKind k) {
  return std::any_of(r.infractions.begin(), r.infractions.end(), [k](const auto& e) { return e.kind == k; });
}

TEST(EpisodeTest, BaselineHitsMaskedPedestrian) {
  const EpisodeOutput out = run("ped_hazard", Mode::kBaseline);
  EXPECT_TRUE(has(out.result, sim::InfractionKind::kCollisionPedestrian));
  EXPECT_LE(out.result.is_score, 0.5);
  EXPECT_EQ(out.result.override_ticks, 0);
  EXPECT_EQ(out.result.backend_calls, 0);
}

TEST(EpisodeTest, RcoAvoidsMaskedPedestrian) {
  const EpisodeOutput rco = run("ped_hazard", Mode::kRco);
  const EpisodeOutput base = run("ped_hazard", Mode::kBaseline);
  EXPECT_TRUE(rco.result.infractions.empty());
  EXPECT_EQ(rco.result.rc, 100.0);
  EXPECT_GT(rco.result.ds, base.result.ds);
  EXPECT_GT(rco.result.override_ticks, 0);
  EXPECT_GT(rco.result.planning_events, 0);
}

TEST(EpisodeTest, LogHasOneRecordPerTick) {
  const EpisodeOutput out = run("ped_hazard", Mode::kRco);
  ASSERT_EQ(static_cast<long>(out.log.size()), out.result.ticks);
  ASSERT_EQ(out.trajectory.size(), out.log.size() + 1);
  for (std::size_t i = 0; i < out.log.size(); ++i) EXPECT_EQ(out.log[i].tick, static_cast<long>(i));
  EXPECT_NEAR(out.result.ds, out.result.rc * out.result.is_score, 1e-9);
}

TEST(EpisodeTest, AlwaysStopHaltsAtFirstDeficit) {
  const EpisodeOutput out = run("ped_hazard", Mode::kAlwaysStop);
  EXPECT_LT(out.result.rc, 100.0);
  EXPECT_FALSE(out.result.route_completed);
  EXPECT_TRUE(std::any_of(out.log.begin(), out.log.end(),
                          [](const auto& r) { return r.source == orchestrator::Source::kAlwaysStop; }));
}

TEST(EpisodeTest, RcoNeedsBackend) {
  EXPECT_THROW(run_episode(bundled("ped_hazard"), Mode::kRco, nullptr, nullptr, {}), ConfigError);
}

TEST(EpisodeTest, DecisionLogRoundTrip) {
  const EpisodeOutput out = run("tl_hazard", Mode::kRco);
  const std::string text = decision_log_jsonl(out.log);
  const auto back = parse_decision_log(text);
  ASSERT_EQ(back.size(), out.log.size());
  EXPECT_EQ(decision_log_jsonl(back), text);
  const std::string trace = render_trace(back);
  EXPECT_EQ(static_cast<std::size_t>(std::count(trace.begin(), trace.end(), '\n')), back.size());
  EXPECT_THROW(parse_decision_log("{\"schema\": 1}\nnot json\n"), SchemaViolation);
}

TEST(SuiteTest, ParallelMatchesSerial) {
  const auto scenarios = load_scenarios({testing_util::source_path("scenarios")});
  const auto serial = results_of(run_suite(scenarios, Mode::kRco, table_factory(), nullptr, {}, 1));
  const auto parallel = results_of(run_suite(scenarios, Mode::kRco, table_factory(), nullptr, {}, 4));
  EXPECT_EQ(metrics::summary_csv(serial), metrics::summary_csv(parallel));
  EXPECT_EQ(metrics::summary_json(serial), metrics::summary_json(parallel));
}

TEST(SuiteTest, SeedOverrideIsReproducible) {
  EpisodeConfig cfg;
  cfg.seed = 99;
  const auto a = run("ped_benign", Mode::kRco, cfg);
  const auto b = run("ped_benign", Mode::kRco, cfg);
  EXPECT_EQ(Json(a.result), Json(b.result));
  EXPECT_EQ(decision_log_jsonl(a.log), decision_log_jsonl(b.log));
}

TEST(SweepTest, OneRowPerLimit) {
  const std::vector<std::shared_ptr<const sim::Scenario>> scenarios{bundled("tl_benign")};
  const auto rows = sweep_step_limit(scenarios, {1, 5}, table_factory(), nullptr, {});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].n_max, 1);
  EXPECT_EQ(rows[1].n_max, 5);
  EXPECT_EQ(rows[0].baseline.ds, rows[1].baseline.ds);
  const std::string csv = sweep_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n_max,rc,is,ds,as,delta_rc,delta_is,delta_ds");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_THROW(sweep_step_limit(scenarios, {}, table_factory(), nullptr, {}), ConfigError);
}

TEST(ScenarioFilesTest, MissingPath) { EXPECT_THROW(scenario_files("/nonexistent/dir"), ConfigError); }

}  // namespace
}  // namespace rco::episode
