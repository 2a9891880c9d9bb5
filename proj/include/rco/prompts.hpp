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

#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>

#include "rco/backend.hpp"
#include "rco/domain.hpp"

namespace rco::prompts {

inline constexpr const char* kHazardSystem =
    "You are the hazard inference module of a driving assistant. Parts of the camera images are "
    "missing (deficit regions). Infer which objects may hide in the deficit regions and how they move, "
    "then choose a strategy: \"move\" to proceed cautiously or \"stop_observe_move\" to halt and observe. "
    "Answer with one JSON object only.";

inline constexpr const char* kHazardTemplate = R"(Past frames, oldest first:
{{history}}

Respond with:
{"hazards": [{"object": <car|truck|bus|bicycle|pedestrian|motorcycle|traffic_light|stop_sign|unknown>,
              "motion": <stationary|oncoming|crossing|same_direction|unknown>}],
 "strategy": <"move"|"stop_observe_move">}
)";

inline constexpr const char* kMotionSystem =
    "You are the short-term motion planner of a driving assistant operating with partial perception "
    "deficits. Every action you plan carries an execution condition and is executed only when the live "
    "observation satisfies it. Answer with one JSON object only.";

inline constexpr const char* kMotionTemplate = R"(Inferred hazards: {{hazards}}
Chosen strategy: {{strategy}}
Navigation: {{navi}}
Current frame:
{{perception}}

If the strategy is "move", respond with at most {{max_steps}} condition-action pairs:
{"strategy": "move", "pairs": [{"condition": <"consistent_no_immediate_hazard"|"consistent_immediate_hazard">,
  "behavior": <move_forward|stop|change_lane_left|change_lane_right|turn_left|turn_right>,
  "speed": <constant_speed|deceleration|quick_deceleration|deceleration_to_zero|acceleration|quick_acceleration>}]}
If the strategy is "stop_observe_move", respond with a wait in ticks (at most {{wait_cap}}) and the
condition that should trigger a new round of planning:
{"strategy": "stop_observe_move", "wait": <int>, "trigger": <condition>}
)";

inline constexpr const char* kSafetySystem =
    "You are the safety constraint generator of a driving assistant. Given weather, daylight, traffic "
    "density, road geometry and the nearest LiDAR obstacle, produce loose vehicle control limits in SI "
    "units. Answer with one JSON object only.";

inline constexpr const char* kSafetyTemplate = R"(Navigation: {{navi}}
Surroundings: {{surrounding}}

Respond with:
{"v_max": <m/s>, "d_min": <m>, "ac_max": <m/s^2>, "de_max": <m/s^2>, "psi_max": <rad/s>, "d_brake": <m>}
)";

struct Templates {
  std::string hazard = kHazardTemplate;
  std::string motion = kMotionTemplate;
  std::string safety = kSafetyTemplate;

  /// Overrides any of hazard.txt / motion.txt / safety.txt present in `dir`.
  static Templates from_directory(const std::string& dir) {
    Templates t;
    auto load = [&](const char* name, std::string& into) {
      std::ifstream in(dir + "/" + name);
      if (!in) return;
      std::stringstream ss;
      ss << in.rdbuf();
      into = ss.str();
    };
    load("hazard.txt", t.hazard);
    load("motion.txt", t.motion);
    load("safety.txt", t.safety);
    return t;
  }
};

inline const char* system_preamble(backend::Purpose p) {
  switch (p) {
    case backend::Purpose::kHazardAndPlan:
      return kHazardSystem;
    case backend::Purpose::kShortTermMotion:
      return kMotionSystem;
    case backend::Purpose::kSafetyConstraints:
      return kSafetySystem;
  }
  return "";
}

/// Replaces every {{name}} with vars[name]; unknown placeholders are left as is.
inline std::string render(const std::string& tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const std::size_t open = tmpl.find("{{", pos);
    if (open == std::string::npos) break;
    const std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string::npos) break;
    out.append(tmpl, pos, open - pos);
    auto it = vars.find(tmpl.substr(open + 2, close - open - 2));
    if (it != vars.end()) {
      out += it->second;
    } else {
      out.append(tmpl, open, close + 2 - open);
    }
    pos = close + 2;
  }
  out.append(tmpl, pos, std::string::npos);
  return out;
}

inline std::string fmt_box(const Rect& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "[%.3f, %.3f, %.3f, %.3f]", r.x0, r.y0, r.x1, r.y1);
  return buf;
}

/// Text listing of one frame as the planner sees it: no ground-truth ids.
inline std::string describe_frame(const EnvironmentSnapshot& s) {
  std::ostringstream os;
  os << "frame " << s.tick << ":\n";
  for (const auto& cv : s.perception) {
    os << "  " << to_string(cv.view) << " camera:";
    if (cv.deficits.empty() && cv.visible_objects.empty()) os << " nothing detected";
    os << "\n";
    for (const auto& d : cv.deficits) os << "    deficit region " << fmt_box(d.box) << "\n";
    for (const auto& o : cv.visible_objects) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " at %.1f m ", o.range_m);
      os << "    " << to_string(o.cls) << buf << fmt_box(o.box) << "\n";
    }
  }
  return os.str();
}

inline std::string describe_history(std::span<const EnvironmentSnapshot> history) {
  std::string out;
  for (const auto& s : history) out += describe_frame(s);
  return out;
}

}  // namespace rco::prompts
