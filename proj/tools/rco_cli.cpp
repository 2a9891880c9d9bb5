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

// rco: scenario runner, step-limit sweep and decision-log replay.
//
//   rco run   --scenarios scenarios/ --mode rco --backend scripted --seed 7
//   rco sweep --scenarios scenarios/stale_plan.json --limits 1,3,5,8
//   rco replay results/logs/ped_hazard.jsonl
//
// Exit status: 0 on success, 2 on configuration errors, 1 on anything else.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rco/http_backend.hpp"
#include "rco/rco.hpp"
#include "rco/run_config.hpp"

#ifndef RCO_DATA_DIR
#define RCO_DATA_DIR "data"
#endif

namespace {

namespace fs = std::filesystem;
using rco::cli::RunConfig;

struct Flags {
  std::string config;
  std::vector<std::string> scenarios;
  std::string mode;
  std::string backend;
  std::string table;
  std::string prompts;
  double latency_ms = 0.0;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string out;
  std::vector<int> limits;
  int n_max = 0;
  int k = 0;
  double shift_threshold = 0.0;
  double ratio_threshold = 0.0;
  bool ratio_all_views = false;
  int replan_budget = 0;
  int wait_cap = 0;
  int timeout_ms = 0;
  double delta_throttle = 0.0;
  double delta_brake = 0.0;
  double pen_ped = 0.0, pen_vehicle = 0.0, pen_static = 0.0, pen_red = 0.0, pen_stop = 0.0;
};

void add_run_options(CLI::App* app, Flags& f, bool sweep) {
  app->add_option("--config", f.config, "JSON config file; flags override its keys");
  app->add_option("--scenarios", f.scenarios, "scenario files or directories");
  if (!sweep) app->add_option("--mode", f.mode, "baseline | rco | always_stop");
  app->add_option("--backend", f.backend, "scripted | http");
  app->add_option("--table", f.table, "scripted backend response table");
  app->add_option("--prompts", f.prompts, "directory with hazard.txt / motion.txt / safety.txt");
  app->add_option("--latency-ms", f.latency_ms, "scripted backend latency in game time");
  app->add_option("--seed", f.seed, "world seed override");
  app->add_option("--jobs", f.jobs, "episodes run in parallel");
  app->add_option("--out", f.out, "output directory");
  if (sweep) app->add_option("--limits", f.limits, "step limits to sweep")->delimiter(',');
  app->add_option("--n-max", f.n_max, "plan-ahead step limit");
  app->add_option("--k", f.k, "history window length");
  app->add_option("--shift-threshold", f.shift_threshold, "deficit centroid shift threshold");
  app->add_option("--ratio-threshold", f.ratio_threshold, "hazard proximity ratio threshold");
  app->add_flag("--ratio-all-views", f.ratio_all_views, "use the worst of the three views for the ratio");
  app->add_option("--replan-budget", f.replan_budget, "consecutive replans before the fail-safe stop");
  app->add_option("--wait-cap", f.wait_cap, "upper bound on stop-observe-move waits, ticks");
  app->add_option("--timeout-ms", f.timeout_ms, "backend call timeout");
  app->add_option("--delta-throttle", f.delta_throttle, "throttle adjustment gain");
  app->add_option("--delta-brake", f.delta_brake, "brake adjustment gain");
  app->add_option("--penalty-pedestrian", f.pen_ped);
  app->add_option("--penalty-vehicle", f.pen_vehicle);
  app->add_option("--penalty-static", f.pen_static);
  app->add_option("--penalty-red-light", f.pen_red);
  app->add_option("--penalty-stop-sign", f.pen_stop);
}

/// Defaults, then the config file, then every flag given on the command line.
RunConfig resolve(const CLI::App* app, const Flags& f) {
  RunConfig cfg;
  cfg.table = std::string(RCO_DATA_DIR) + "/scripted_backend.json";
  if (!f.config.empty()) rco::cli::apply_json(cfg, rco::cli::load_json_file(f.config));

  rco::Json j = rco::Json::object();
  auto given = [&](const char* name) {
    const CLI::Option* o = app->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  if (given("--scenarios")) j["scenarios"] = f.scenarios;
  if (given("--mode")) j["mode"] = f.mode;
  if (given("--backend")) j["backend"] = f.backend;
  if (given("--table")) j["table"] = f.table;
  if (given("--prompts")) j["prompts"] = f.prompts;
  if (given("--latency-ms")) j["latency_ms"] = f.latency_ms;
  if (given("--seed")) j["seed"] = f.seed;
  if (given("--jobs")) j["jobs"] = f.jobs;
  if (given("--out")) j["out"] = f.out;
  if (given("--limits")) j["limits"] = f.limits;
  if (given("--n-max")) j["n_max"] = f.n_max;
  if (given("--k")) j["k"] = f.k;
  if (given("--shift-threshold")) j["shift_threshold"] = f.shift_threshold;
  if (given("--ratio-threshold")) j["ratio_threshold"] = f.ratio_threshold;
  if (given("--ratio-all-views")) j["ratio_all_views"] = f.ratio_all_views;
  if (given("--replan-budget")) j["replan_budget"] = f.replan_budget;
  if (given("--wait-cap")) j["wait_cap"] = f.wait_cap;
  if (given("--timeout-ms")) j["timeout_ms"] = f.timeout_ms;
  if (given("--delta-throttle")) j["delta_throttle"] = f.delta_throttle;
  if (given("--delta-brake")) j["delta_brake"] = f.delta_brake;
  rco::Json pen = rco::Json::object();
  if (given("--penalty-pedestrian")) pen["collision_pedestrian"] = f.pen_ped;
  if (given("--penalty-vehicle")) pen["collision_vehicle"] = f.pen_vehicle;
  if (given("--penalty-static")) pen["collision_static"] = f.pen_static;
  if (given("--penalty-red-light")) pen["red_light"] = f.pen_red;
  if (given("--penalty-stop-sign")) pen["stop_sign"] = f.pen_stop;
  if (!pen.empty()) j["penalties"] = pen;
  rco::cli::apply_json(cfg, j);
  cfg.episode.seed = cfg.seed;
  return cfg;
}

rco::episode::BackendFactory backend_factory(const RunConfig& cfg) {
  if (cfg.backend == rco::cli::BackendKind::kHttp) {
    const rco::backend::HttpConfig http = rco::backend::HttpConfig::from_env();
    if (http.url.empty()) throw rco::ConfigError("RCO_BACKEND_URL is not set");
    rco::backend::split_url(http.url);
    return [http] { return std::make_unique<rco::backend::HttpBackend>(http); };
  }
  rco::backend::ScriptedBackend table;
  try {
    table = rco::backend::ScriptedBackend::load(cfg.table);
  } catch (const rco::SchemaViolation& e) {
    throw rco::ConfigError(std::string("scripted backend table: ") + e.what());
  }
  if (cfg.latency_ms) table.set_latency_ms(*cfg.latency_ms);
  return [table] { return std::make_unique<rco::backend::ScriptedBackend>(table); };
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

std::vector<std::shared_ptr<const rco::sim::Scenario>> scenarios_of(const RunConfig& cfg) {
  try {
    return rco::episode::load_scenarios(cfg.scenarios);
  } catch (const rco::SchemaViolation& e) {
    throw rco::ConfigError(std::string("scenario: ") + e.what());
  }
}

int cmd_run(const RunConfig& cfg) {
  rco::cli::validate(cfg, cfg.mode == rco::episode::Mode::kRco);
  const auto scenarios = scenarios_of(cfg);
  const rco::prompts::Templates templates =
      cfg.prompts.empty() ? rco::prompts::Templates{} : rco::prompts::Templates::from_directory(cfg.prompts);
  const auto factory = cfg.mode == rco::episode::Mode::kRco ? backend_factory(cfg) : nullptr;
  const auto outs = rco::episode::run_suite(scenarios, cfg.mode, factory, &templates, cfg.episode, cfg.jobs);

  const fs::path root(cfg.out);
  for (const auto& o : outs) {
    write_file(root / "episodes" / (o.result.scenario + ".json"), rco::Json(o.result).dump(2) + "\n");
    write_file(root / "logs" / (o.result.scenario + ".jsonl"), rco::episode::decision_log_jsonl(o.log));
  }
  const auto results = rco::episode::results_of(outs);
  const std::string csv = rco::metrics::summary_csv(results);
  write_file(root / "summary.csv", csv);
  write_file(root / "summary.json", rco::metrics::summary_json(results).dump(2) + "\n");
  std::cout << csv;
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  rco::cli::validate(cfg, true);
  const auto scenarios = scenarios_of(cfg);
  const rco::prompts::Templates templates =
      cfg.prompts.empty() ? rco::prompts::Templates{} : rco::prompts::Templates::from_directory(cfg.prompts);
  const auto rows =
      rco::episode::sweep_step_limit(scenarios, cfg.limits, backend_factory(cfg), &templates, cfg.episode, cfg.jobs);
  const std::string csv = rco::episode::sweep_csv(rows);
  write_file(fs::path(cfg.out) / "sweep.csv", csv);
  std::cout << csv;
  return 0;
}

int cmd_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rco::ConfigError("cannot open decision log " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::vector<rco::orchestrator::DecisionRecord> log;
  try {
    log = rco::episode::parse_decision_log(ss.str());
  } catch (const rco::SchemaViolation& e) {
    throw rco::ConfigError(std::string("decision log: ") + e.what());
  }
  std::cout << rco::episode::render_trace(log);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-averse control override: scenario runner"};
  app.require_subcommand(1);
  Flags run_flags, sweep_flags;
  std::string replay_path;
  CLI::App* run = app.add_subcommand("run", "run scenarios and write results");
  add_run_options(run, run_flags, false);
  CLI::App* sweep = app.add_subcommand("sweep", "sweep the plan-ahead step limit");
  add_run_options(sweep, sweep_flags, true);
  CLI::App* replay = app.add_subcommand("replay", "render a decision log as a readable trace");
  replay->add_option("log", replay_path, "decision log (.jsonl)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(resolve(run, run_flags));
    if (sweep->parsed()) return cmd_sweep(resolve(sweep, sweep_flags));
    return cmd_replay(replay_path);
  } catch (const rco::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
