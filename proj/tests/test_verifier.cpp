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

#include <vector>

#include "test_util.hpp"

namespace rco::verifier {
namespace {

using testing_util::front_deficits;
using testing_util::square_at;

// Fraction of 1000x1000 pixel centres covered by at least one rectangle.
double raster_union(const std::vector<Rect>& rects) {
  constexpr int kN = 1000;
  long covered = 0;
  for (int i = 0; i < kN; ++i) {
    const double x = (i + 0.5) / kN;
    for (int j = 0; j < kN; ++j) {
      const double y = (j + 0.5) / kN;
      for (const Rect& r : rects) {
        if (x >= r.x0 && x < r.x1 && y >= r.y0 && y < r.y1) {
          ++covered;
          break;
        }
      }
    }
  }
  return static_cast<double>(covered) / (kN * kN);
}

std::vector<Rect> random_rects(SplitMix64& rng, int n) {
  std::vector<Rect> out;
  for (int k = 0; k < n; ++k) {
    const double x0 = rng.uniform(0, 0.9);
    const double y0 = rng.uniform(0, 0.9);
    out.push_back({x0, y0, std::min(1.0, x0 + rng.uniform(0.01, 0.4)), std::min(1.0, y0 + rng.uniform(0.01, 0.4))});
  }
  return out;
}

TEST(UnionAreaTest, MatchesRasterizedBruteForce) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const auto rects = random_rects(rng, 1 + static_cast<int>(rng.integer(0, 7)));
    EXPECT_NEAR(union_area(rects), raster_union(rects), 2e-3) << "trial " << trial;
  }
}

TEST(UnionAreaTest, DisjointAddsContainedDoesNot) {
  const std::vector<Rect> disjoint{{0.0, 0.0, 0.3, 0.1}, {0.5, 0.5, 0.7, 0.7}};
  EXPECT_NEAR(union_area(disjoint), 0.03 + 0.04, 1e-12);
  const std::vector<Rect> nested{{0.2, 0.2, 0.5, 0.4}, {0.3, 0.25, 0.4, 0.35}};
  EXPECT_NEAR(union_area(nested), 0.06, 1e-12);
  EXPECT_NEAR(raster_union(nested), 0.06, 2e-3);
  EXPECT_EQ(union_area(std::vector<Rect>{}), 0.0);
}

TEST(RatioTest, DeficitPlusDisjointObjects) {
  EnvironmentSnapshot s = front_deficits(0, {{0.0, 0.0, 0.3, 0.1}});
  s.view(View::kFront).visible_objects.push_back({ObjectClass::kCar, {0.5, 0.5, 0.7, 0.6}, 10});
  s.view(View::kFront).visible_objects.push_back({ObjectClass::kPedestrian, {0.8, 0.8, 0.9, 1.0}, 10});
  EXPECT_NEAR(hazard_proximity_ratio(s), 0.07, 1e-12);
  EXPECT_EQ(hazard_proximity_ratio(EnvironmentSnapshot{}), 0.0);
}

TEST(RatioTest, OnlyTrafficObjectsCount) {
  EnvironmentSnapshot s;
  s.view(View::kFront).visible_objects.push_back({ObjectClass::kUnknown, {0.0, 0.0, 0.5, 0.5}, 10});
  EXPECT_EQ(hazard_proximity_ratio(s), 0.0);
}

TEST(RatioTest, SideViewsOnlyWithAllViews) {
  EnvironmentSnapshot s;
  s.view(View::kLeft).deficits.push_back({View::kLeft, {0.0, 0.0, 0.5, 0.5}, std::nullopt});
  EXPECT_EQ(hazard_proximity_ratio(s), 0.0);
  VerifierConfig all;
  all.ratio_all_views = true;
  EXPECT_NEAR(hazard_proximity_ratio(s, all), 0.25, 1e-12);
}

TEST(RatioTest, MonotoneUnderAddedBoxes) {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    auto rects = random_rects(rng, 4);
    const double before = union_area(rects);
    rects.push_back(random_rects(rng, 1).front());
    EXPECT_GE(union_area(rects) + 1e-12, before);
  }
}

TEST(RatioTest, MonotoneUnderGrowingBox) {
  SplitMix64 rng(78);
  for (int trial = 0; trial < 200; ++trial) {
    auto rects = random_rects(rng, 3);
    const double before = union_area(rects);
    Rect& r = rects[0];
    r.x1 = std::min(1.0, r.x1 + 0.05);
    r.y1 = std::min(1.0, r.y1 + 0.05);
    EXPECT_GE(union_area(rects) + 1e-12, before);
  }
}

std::vector<EnvironmentSnapshot> steady(int n, const Rect& box) {
  std::vector<EnvironmentSnapshot> h;
  for (int i = 0; i < n; ++i) h.push_back(front_deficits(i, {box}));
  return h;
}

TEST(ConsistencyTest, QuantityRealignment) {
  const std::vector<EnvironmentSnapshot> h{
      front_deficits(0, {square_at(0.2, 0.5, 0.05), square_at(0.7, 0.5, 0.05)}),
      front_deficits(1, {square_at(0.2, 0.5, 0.05), square_at(0.7, 0.5, 0.05)}),
      front_deficits(2, {square_at(0.2, 0.5, 0.05), square_at(0.7, 0.5, 0.05), square_at(0.5, 0.2, 0.05)})};
  const auto v = check_deficit_consistency(h, {});
  EXPECT_FALSE(v.consistent);
  EXPECT_EQ(v.reason, InconsistencyReason::kQuantityMismatch);
}

TEST(ConsistencyTest, SpatialShift) {
  const std::vector<EnvironmentSnapshot> ok{front_deficits(0, {square_at(0.40, 0.5, 0.05)}),
                                            front_deficits(1, {square_at(0.42, 0.5, 0.05)})};
  EXPECT_TRUE(check_deficit_consistency(ok, {}).consistent);
  const std::vector<EnvironmentSnapshot> bad{front_deficits(0, {square_at(0.40, 0.5, 0.05)}),
                                             front_deficits(1, {square_at(0.55, 0.5, 0.05)})};
  const auto v = check_deficit_consistency(bad, {});
  EXPECT_FALSE(v.consistent);
  EXPECT_EQ(v.reason, InconsistencyReason::kSpatialShiftExceeded);
}

TEST(ConsistencyTest, DeficitDisappearance) {
  const std::vector<EnvironmentSnapshot> h{front_deficits(0, {square_at(0.5, 0.5, 0.05)}),
                                           front_deficits(1, {square_at(0.5, 0.5, 0.05)}), front_deficits(2, {})};
  const auto v = check_deficit_consistency(h, {});
  EXPECT_FALSE(v.consistent);
  EXPECT_EQ(v.reason, InconsistencyReason::kDeficitDisappeared);
}

TEST(ConsistencyTest, MatchingIsOrderIndependent) {
  const std::vector<EnvironmentSnapshot> h{
      front_deficits(0, {square_at(0.2, 0.5, 0.05), square_at(0.7, 0.5, 0.05)}),
      front_deficits(1, {square_at(0.71, 0.5, 0.05), square_at(0.21, 0.5, 0.05)})};
  EXPECT_TRUE(check_deficit_consistency(h, {}).consistent);
}

TEST(ConsistencyTest, NeedsTwoOrderedFrames) {
  const auto one = steady(1, square_at(0.5, 0.5, 0.1));
  EXPECT_THROW(check_deficit_consistency(one, {}), InsufficientHistory);
  std::vector<EnvironmentSnapshot> back = steady(2, square_at(0.5, 0.5, 0.1));
  back[1].tick = 0;
  EXPECT_THROW(check_deficit_consistency(back, {}), OutOfRange);
}

TEST(ClassifyTest, StrictThreshold) {
  // A 0.25 x 0.28 box covers 0.07; a 0.25 x 0.2 box at the origin covers
  // exactly the double nearest 0.05.
  const auto hot = steady(3, {0.3, 0.3, 0.55, 0.58});
  EXPECT_EQ(classify_condition(hot, {}), Classification::kConsistentImmediateHazard);
  const auto edge = steady(3, {0.0, 0.0, 0.25, 0.2});
  ASSERT_EQ(hazard_proximity_ratio(edge.back()), 0.05);
  EXPECT_EQ(classify_condition(edge, {}), Classification::kConsistentNoImmediateHazard);
}

TEST(ClassifyTest, BoundaryPropertyAroundThreshold) {
  SplitMix64 rng(99);
  for (int i = 0; i < 500; ++i) {
    const double w = rng.uniform(0.1, 0.5);
    const double h = rng.uniform(0.02, 0.5);
    const auto hist = steady(2, {0.0, 0.0, w, h});
    const double ratio = hazard_proximity_ratio(hist.back());
    const Classification c = classify_condition(hist, {});
    EXPECT_EQ(c == Classification::kConsistentImmediateHazard, ratio > 0.05);
  }
}

TEST(ClassifyTest, InconsistencyBeatsRatio) {
  std::vector<EnvironmentSnapshot> h = steady(3, {0.0, 0.0, 0.9, 0.9});
  h[2].view(View::kFront).deficits.push_back({View::kFront, {0.1, 0.1, 0.2, 0.2}, std::nullopt});
  EXPECT_EQ(classify_condition(h, {}), Classification::kReplan);
}

TEST(VerifyTest, ExactMatchOnly) {
  const ConditionActionPair no{ExecutionCondition::kConsistentNoImmediateHazard, {}};
  const ConditionActionPair yes{ExecutionCondition::kConsistentImmediateHazard, {}};
  EXPECT_EQ(verify(no, Classification::kConsistentNoImmediateHazard), Verdict::kExecute);
  EXPECT_EQ(verify(no, Classification::kConsistentImmediateHazard), Verdict::kDeny);
  EXPECT_EQ(verify(yes, Classification::kConsistentImmediateHazard), Verdict::kExecute);
  EXPECT_EQ(verify(no, Classification::kReplan), Verdict::kDeny);
  EXPECT_EQ(verify(yes, Classification::kReplan), Verdict::kDeny);
}

TEST(VerifierConfigTest, Validation) {
  VerifierConfig c;
  c.shift_threshold = 0.0;
  EXPECT_THROW(validate_config(c), OutOfRange);
  c = {};
  c.hazard_ratio_threshold = 1.0;
  EXPECT_THROW(validate_config(c), OutOfRange);
  c = {};
  c.history_len = 1;
  EXPECT_THROW(validate_config(c), OutOfRange);
}

}  // namespace
}  // namespace rco::verifier
