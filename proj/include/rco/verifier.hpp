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

// Rule-based action condition verifier.
//
// A history window is first checked for deficit consistency (same count per
// view between consecutive frames, matched centroids moving less than the
// shift threshold). Only a consistent window is classified further, by the
// hazard proximity ratio: the union area of deficit regions and traffic
// object boxes as a fraction of the image.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "rco/domain.hpp"

namespace rco::verifier {

enum class InconsistencyReason { kQuantityMismatch, kSpatialShiftExceeded, kDeficitDisappeared, kConsistent };

enum class Classification { kReplan, kConsistentNoImmediateHazard, kConsistentImmediateHazard };

enum class Verdict { kExecute, kDeny };

}  // namespace rco::verifier

namespace rco {
template <>
struct EnumNames<verifier::InconsistencyReason> {
  static constexpr std::array<std::pair<verifier::InconsistencyReason, std::string_view>, 4> kNames{{
      {verifier::InconsistencyReason::kQuantityMismatch, "quantity_mismatch"},
      {verifier::InconsistencyReason::kSpatialShiftExceeded, "spatial_shift_exceeded"},
      {verifier::InconsistencyReason::kDeficitDisappeared, "deficit_disappeared"},
      {verifier::InconsistencyReason::kConsistent, "consistent"},
  }};
};
template <>
struct EnumNames<verifier::Classification> {
  static constexpr std::array<std::pair<verifier::Classification, std::string_view>, 3> kNames{{
      {verifier::Classification::kReplan, "replan"},
      {verifier::Classification::kConsistentNoImmediateHazard, "consistent_no_immediate_hazard"},
      {verifier::Classification::kConsistentImmediateHazard, "consistent_immediate_hazard"},
  }};
};
template <>
struct EnumNames<verifier::Verdict> {
  static constexpr std::array<std::pair<verifier::Verdict, std::string_view>, 2> kNames{{
      {verifier::Verdict::kExecute, "execute"},
      {verifier::Verdict::kDeny, "deny"},
  }};
};
}  // namespace rco

namespace rco::verifier {

RCO_JSON_ENUM(InconsistencyReason)
RCO_JSON_ENUM(Classification)
RCO_JSON_ENUM(Verdict)

struct ConsistencyVerdict {
  bool consistent = true;
  InconsistencyReason reason = InconsistencyReason::kConsistent;

  static ConsistencyVerdict ok() { return {true, InconsistencyReason::kConsistent}; }
  static ConsistencyVerdict fail(InconsistencyReason r) { return {false, r}; }
  friend bool operator==(const ConsistencyVerdict&, const ConsistencyVerdict&) = default;
};

struct VerifierConfig {
  double shift_threshold = 0.10;         // centroid displacement, image fractions
  double hazard_ratio_threshold = 0.05;  // fraction of image area, strict
  int history_len = 5;
  bool ratio_all_views = false;  // max over the three views instead of front only
};

inline const VerifierConfig& validate_config(const VerifierConfig& cfg) {
  if (!(cfg.shift_threshold > 0.0 && cfg.shift_threshold < 1.0)) throw OutOfRange("shift_threshold", cfg.shift_threshold);
  if (!(cfg.hazard_ratio_threshold > 0.0 && cfg.hazard_ratio_threshold < 1.0)) {
    throw OutOfRange("hazard_ratio_threshold", cfg.hazard_ratio_threshold);
  }
  if (cfg.history_len < 2) throw OutOfRange("history_len", cfg.history_len);
  return cfg;
}

/// Largest centroid displacement among greedy nearest-centroid matches.
/// Pairs are matched globally closest-first within one view; the caller has
/// already checked that both frames hold the same number of deficits.
inline double max_matched_shift(const std::vector<DeficitRegion>& prev, const std::vector<DeficitRegion>& cur) {
  struct Candidate {
    double dist;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Candidate> cands;
  cands.reserve(prev.size() * cur.size());
  for (std::size_t i = 0; i < prev.size(); ++i) {
    for (std::size_t j = 0; j < cur.size(); ++j) {
      const double d = std::hypot(cur[j].box.cx() - prev[i].box.cx(), cur[j].box.cy() - prev[i].box.cy());
      cands.push_back({d, i, j});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });
  std::vector<bool> used_i(prev.size(), false), used_j(cur.size(), false);
  double worst = 0.0;
  for (const auto& c : cands) {
    if (used_i[c.i] || used_j[c.j]) continue;
    used_i[c.i] = used_j[c.j] = true;
    worst = std::max(worst, c.dist);
  }
  return worst;
}

inline ConsistencyVerdict check_pair(const EnvironmentSnapshot& prev, const EnvironmentSnapshot& cur,
                                     const VerifierConfig& cfg) {
  for (View v : all_values<View>()) {
    const auto& a = prev.view(v).deficits;
    const auto& b = cur.view(v).deficits;
    if (!a.empty() && b.empty()) return ConsistencyVerdict::fail(InconsistencyReason::kDeficitDisappeared);
    if (a.size() != b.size()) return ConsistencyVerdict::fail(InconsistencyReason::kQuantityMismatch);
    if (!a.empty() && max_matched_shift(a, b) > cfg.shift_threshold) {
      return ConsistencyVerdict::fail(InconsistencyReason::kSpatialShiftExceeded);
    }
  }
  return ConsistencyVerdict::ok();
}

/// Scans consecutive frames oldest-first and reports the first inconsistency.
inline ConsistencyVerdict check_deficit_consistency(std::span<const EnvironmentSnapshot> history,
                                                    const VerifierConfig& cfg) {
  if (history.size() < 2) throw InsufficientHistory(history.size());
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (history[i].tick <= history[i - 1].tick) throw OutOfRange("tick", static_cast<double>(history[i].tick));
  }
  for (std::size_t i = 1; i < history.size(); ++i) {
    ConsistencyVerdict v = check_pair(history[i - 1], history[i], cfg);
    if (!v.consistent) return v;
  }
  return ConsistencyVerdict::ok();
}

/// Exact area of a union of axis-aligned rectangles (coordinate compression
/// on x, merged y-intervals per slab).
inline double union_area(std::span<const Rect> rects) {
  std::vector<double> xs;
  xs.reserve(rects.size() * 2);
  for (const auto& r : rects) {
    if (r.x1 <= r.x0 || r.y1 <= r.y0) continue;
    xs.push_back(r.x0);
    xs.push_back(r.x1);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double area = 0.0;
  std::vector<std::pair<double, double>> spans;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double xa = xs[k];
    const double xb = xs[k + 1];
    spans.clear();
    for (const auto& r : rects) {
      if (r.x1 <= r.x0 || r.y1 <= r.y0) continue;
      if (r.x0 <= xa && r.x1 >= xb) spans.emplace_back(r.y0, r.y1);
    }
    if (spans.empty()) continue;
    std::sort(spans.begin(), spans.end());
    double covered = 0.0;
    double lo = spans[0].first;
    double hi = spans[0].second;
    for (std::size_t s = 1; s < spans.size(); ++s) {
      if (spans[s].first > hi) {
        covered += hi - lo;
        lo = spans[s].first;
        hi = spans[s].second;
      } else {
        hi = std::max(hi, spans[s].second);
      }
    }
    covered += hi - lo;
    area += covered * (xb - xa);
  }
  return area;
}

inline double view_ratio(const CameraView& cv) {
  std::vector<Rect> boxes;
  for (const auto& d : cv.deficits) boxes.push_back(d.box);
  for (const auto& o : cv.visible_objects) {
    if (is_traffic_object(o.cls)) boxes.push_back(o.box);
  }
  return std::clamp(union_area(boxes), 0.0, 1.0);
}

inline double hazard_proximity_ratio(const EnvironmentSnapshot& snap, const VerifierConfig& cfg = {}) {
  if (!cfg.ratio_all_views) return view_ratio(snap.view(View::kFront));
  double worst = 0.0;
  for (const auto& cv : snap.perception) worst = std::max(worst, view_ratio(cv));
  return worst;
}

inline Classification classify_condition(std::span<const EnvironmentSnapshot> history, const VerifierConfig& cfg) {
  if (!check_deficit_consistency(history, cfg).consistent) return Classification::kReplan;
  return hazard_proximity_ratio(history.back(), cfg) > cfg.hazard_ratio_threshold
             ? Classification::kConsistentImmediateHazard
             : Classification::kConsistentNoImmediateHazard;
}

inline Classification as_classification(ExecutionCondition c) {
  return c == ExecutionCondition::kConsistentImmediateHazard ? Classification::kConsistentImmediateHazard
                                                             : Classification::kConsistentNoImmediateHazard;
}

inline std::optional<ExecutionCondition> as_condition(Classification c) {
  switch (c) {
    case Classification::kConsistentNoImmediateHazard:
      return ExecutionCondition::kConsistentNoImmediateHazard;
    case Classification::kConsistentImmediateHazard:
      return ExecutionCondition::kConsistentImmediateHazard;
    case Classification::kReplan:
      return std::nullopt;
  }
  return std::nullopt;
}

/// Verdict for a pair given an already computed classification.
inline Verdict verify(const ConditionActionPair& pair, Classification c) {
  return c == as_classification(pair.condition) ? Verdict::kExecute : Verdict::kDeny;
}

inline Verdict verify(const ConditionActionPair& pair, std::span<const EnvironmentSnapshot> history,
                      const VerifierConfig& cfg) {
  return verify(pair, classify_condition(history, cfg));
}

}  // namespace rco::verifier
