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

// Runs one scenario under the three modes and prints the metrics.
//
//   minimal_episode [scenario.json] [scripted_backend.json]

#include <cstdio>
#include <memory>

#include "rco/rco.hpp"

int main(int argc, char** argv) {
  const std::string scenario_path = argc > 1 ? argv[1] : RCO_DATA_DIR "/../scenarios/ped_hazard.json";
  const std::string table_path = argc > 2 ? argv[2] : RCO_DATA_DIR "/scripted_backend.json";

  auto scenario = std::make_shared<const rco::sim::Scenario>(rco::sim::load_scenario(scenario_path));
  rco::backend::ScriptedBackend backend = rco::backend::ScriptedBackend::load(table_path);
  const rco::episode::EpisodeConfig cfg;

  std::printf("%-12s %8s %6s %8s %6s %s\n", "mode", "RC", "IS", "DS", "AS", "infractions");
  for (auto mode : rco::all_values<rco::episode::Mode>()) {
    const rco::episode::EpisodeOutput out = rco::episode::run_episode(scenario, mode, &backend, nullptr, cfg);
    const rco::metrics::EpisodeResult& r = out.result;
    std::printf("%-12s %8.2f %6.3f %8.2f %6.2f", r.mode.c_str(), r.rc, r.is_score, r.ds, r.as_speed);
    for (const auto& e : r.infractions) std::printf(" %s@%ld", std::string(rco::to_string(e.kind)).c_str(), e.tick);
    std::printf("\n");
  }
  return 0;
}
