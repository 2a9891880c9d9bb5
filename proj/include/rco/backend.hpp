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

// Reasoning backend abstraction. Three purposes share one transport:
// hazard inference, short-term motion planning and safety-constraint
// generation. Every response goes through parse_structured, which either
// yields a complete value or throws; callers never see partial results.

#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rco/domain.hpp"

namespace rco::backend {

enum class Purpose { kHazardAndPlan, kShortTermMotion, kSafetyConstraints };

}  // namespace rco::backend

namespace rco {
template <>
struct EnumNames<backend::Purpose> {
  static constexpr std::array<std::pair<backend::Purpose, std::string_view>, 3> kNames{{
      {backend::Purpose::kHazardAndPlan, "hazard_and_plan"},
      {backend::Purpose::kShortTermMotion, "short_term_motion"},
      {backend::Purpose::kSafetyConstraints, "safety_constraints"},
  }};
};
}  // namespace rco

namespace rco::backend {

RCO_JSON_ENUM(Purpose)

struct BackendRequest {
  Purpose purpose = Purpose::kHazardAndPlan;
  std::string prompt;
  Json payload;
  int timeout_ms = 10000;
};

struct HazardReport {
  HazardSet hazards;
  Strategy strategy = Strategy::kStopObserveMove;
  friend bool operator==(const HazardReport&, const HazardReport&) = default;
};

/// Planner output before the step limit is applied: an unbounded pair list
/// for move, or a wait for stop-observe-move.
struct PlanSkeleton {
  std::variant<std::vector<ConditionActionPair>, WaitPlan> body;

  Strategy strategy() const {
    return body.index() == 0 ? Strategy::kMove : Strategy::kStopObserveMove;
  }
  friend bool operator==(const PlanSkeleton&, const PlanSkeleton&) = default;
};

using ParsedValue = std::variant<HazardReport, PlanSkeleton, SafetyConstraints>;

struct BackendResponse {
  std::string raw;
  ParsedValue parsed;
  double latency_ms = 0.0;
};

class BackendError : public Error {
 public:
  enum class Kind { kTimeout, kTransportFailure, kSchemaViolation };

  BackendError(Kind kind, const std::string& what) : Error(label(kind) + ": " + what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  static std::string label(Kind k) {
    switch (k) {
      case Kind::kTimeout:
        return "timeout";
      case Kind::kTransportFailure:
        return "transport failure";
      case Kind::kSchemaViolation:
        return "schema violation";
    }
    return "backend error";
  }

  Kind kind_;
};

class ReasoningBackend {
 public:
  virtual ~ReasoningBackend() = default;
  /// Blocking call. Throws BackendError on timeout, transport failure or a
  /// response that does not validate against the purpose schema.
  virtual BackendResponse call(const BackendRequest& req) = 0;
};

// ---------------------------------------------------------------------------
// Structured output parsing

namespace detail {

/// Byte offset and text of each balanced {...} candidate, in order of
/// appearance. String literals are honoured so braces inside them do not
/// count.
inline std::vector<std::pair<std::size_t, std::string_view>> object_candidates(std::string_view raw) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  for (std::size_t start = raw.find('{'); start != std::string_view::npos; start = raw.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < raw.size(); ++i) {
      const char c = raw[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          out.emplace_back(start, raw.substr(start, i - start + 1));
          break;
        }
      }
    }
  }
  return out;
}

template <typename F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaViolation& e) {
    throw SchemaViolation(path + "/" + e.where(), e.what());
  } catch (const OutOfRange& e) {
    throw SchemaViolation(path + "/" + e.field(), e.what());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaViolation(path, e.what());
  }
}

inline HazardReport parse_hazards(const Json& j) {
  using namespace json_detail;
  HazardReport out;
  const Json& hazards = at(j, "hazards");
  if (!hazards.is_array()) throw SchemaViolation("hazards", "expected array");
  for (std::size_t i = 0; i < hazards.size(); ++i) {
    out.hazards.push_back(at_path("hazards/" + std::to_string(i), [&] {
      return Hazard{token<ObjectClass>(hazards[i], "object"), token<Motion>(hazards[i], "motion")};
    }));
  }
  out.strategy = token<Strategy>(j, "strategy");
  return out;
}

inline PlanSkeleton parse_plan(const Json& j) {
  using namespace json_detail;
  if (token<Strategy>(j, "strategy") == Strategy::kMove) {
    const Json& pairs = at(j, "pairs");
    if (!pairs.is_array()) throw SchemaViolation("pairs", "expected array");
    std::vector<ConditionActionPair> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      out.push_back(at_path("pairs/" + std::to_string(i), [&] {
        const Json& p = pairs[i];
        return ConditionActionPair{
            token<ExecutionCondition>(p, "condition"),
            HighLevelAction(token<Behavior>(p, "behavior"), token<SpeedControl>(p, "speed"))};
      }));
    }
    return {std::move(out)};
  }
  const long wait = integer(j, "wait");
  if (wait < 0) throw SchemaViolation("wait", "must be non-negative");
  if (wait > 1000000) throw SchemaViolation("wait", "unreasonably large");
  return {WaitPlan{static_cast<int>(wait), token<ExecutionCondition>(j, "trigger")}};
}

}  // namespace detail

/// Extracts the first JSON object embedded in `raw` and validates it against
/// the schema for `purpose`. Unknown tokens are rejected, never coerced.
inline ParsedValue parse_structured(std::string_view raw, Purpose purpose) {
  const auto candidates = detail::object_candidates(raw);
  if (candidates.empty()) throw SchemaViolation("byte 0", "no JSON object in response");

  // First candidate that is syntactically valid JSON wins; schema errors on
  // it are reported, not skipped.
  for (const auto& [offset, text] : candidates) {
    Json j = Json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) continue;
    return detail::at_path("byte " + std::to_string(offset), [&]() -> ParsedValue {
      switch (purpose) {
        case Purpose::kHazardAndPlan:
          return detail::parse_hazards(j);
        case Purpose::kShortTermMotion:
          return detail::parse_plan(j);
        case Purpose::kSafetyConstraints:
          return j.get<SafetyConstraints>();
      }
      throw SchemaViolation("purpose", "unhandled");
    });
  }
  throw SchemaViolation("byte " + std::to_string(candidates.front().first), "no well-formed JSON object");
}

// ---------------------------------------------------------------------------
// Scripted backend

/// Deterministic, table-driven backend. A request is looked up by its purpose
/// and the scenario key carried in the payload: first
/// "<scenario_key>@<situation>", then the bare scenario key. A miss is a
/// schema violation, which callers turn into their fallback.
class ScriptedBackend : public ReasoningBackend {
 public:
  ScriptedBackend() = default;
  explicit ScriptedBackend(double latency_ms) : latency_ms_(latency_ms) {}

  void set(Purpose purpose, std::string key, std::string response) {
    table_[{purpose, std::move(key)}] = std::move(response);
  }

  double latency_ms() const { return latency_ms_; }
  void set_latency_ms(double ms) { latency_ms_ = ms; }
  std::size_t size() const { return table_.size(); }

  /// Table file format:
  ///   {"latency_ms": 100,
  ///    "entries": [{"purpose": "hazard_and_plan", "key": "k", "response": {...} | "text"}]}
  static ScriptedBackend from_json(const Json& j) {
    using namespace json_detail;
    ScriptedBackend b(optional_number(j, "latency_ms").value_or(0.0));
    const Json& entries = at(j, "entries");
    if (!entries.is_array()) throw SchemaViolation("entries", "expected array");
    for (const auto& e : entries) {
      const Json& resp = at(e, "response");
      const Json& key = at(e, "key");
      if (!key.is_string()) throw SchemaViolation("key", "expected string");
      b.set(token<Purpose>(e, "purpose"), key.get<std::string>(), resp.is_string() ? resp.get<std::string>() : resp.dump());
    }
    return b;
  }

  static ScriptedBackend load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scripted backend table " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    Json j = Json::parse(ss.str(), nullptr, false);
    if (j.is_discarded()) throw ConfigError("scripted backend table is not valid JSON: " + path);
    return from_json(j);
  }

  BackendResponse call(const BackendRequest& req) override {
    const std::string* raw = lookup(req);
    if (raw == nullptr) {
      throw BackendError(BackendError::Kind::kSchemaViolation,
                         "no scripted response for " + std::string(to_string(req.purpose)));
    }
    try {
      return {*raw, parse_structured(*raw, req.purpose), latency_ms_};
    } catch (const SchemaViolation& e) {
      throw BackendError(BackendError::Kind::kSchemaViolation, e.what());
    }
  }

 private:
  const std::string* lookup(const BackendRequest& req) const {
    if (!req.payload.is_object()) return nullptr;
    auto k = req.payload.find("scenario_key");
    if (k == req.payload.end() || !k->is_string()) return nullptr;
    const std::string key = k->get<std::string>();
    auto s = req.payload.find("situation");
    if (s != req.payload.end() && s->is_string()) {
      auto it = table_.find({req.purpose, key + "@" + s->get<std::string>()});
      if (it != table_.end()) return &it->second;
    }
    auto it = table_.find({req.purpose, key});
    return it == table_.end() ? nullptr : &it->second;
  }

  std::map<std::pair<Purpose, std::string>, std::string> table_;
  double latency_ms_ = 0.0;
};

}  // namespace rco::backend
