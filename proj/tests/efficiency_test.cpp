// Copyright 2026 The specne Authors.
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


#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "specne/specne.hpp"
#include "test_util.hpp"

namespace specne {
namespace {

TEST(EfficiencyTest, ToyInstance) {
  // Two primaries, one slot, q = 0.5, f(10) = 11: the optimum sells one
  // channel whenever either is available, 11 * 0.75.
  const auto e = efficiency(testing::toy_instance());
  EXPECT_NEAR(e.r_opt, 8.25, 1e-12);
  EXPECT_NEAR(e.eta, 2.0 / 3.0, 1e-12);
}

TEST(EfficiencyTest, OptimumRoutesAgree) {
  testing::Draws d(41);
  for (int t = 0; t < 15; ++t) {
    const auto inst = testing::random_instance(d, 25, 3);
    const double dp = r_opt(inst);
    EXPECT_NEAR(r_opt_enumerate(inst), dp, 1e-9 * dp) << "trial " << t;
  }
}

TEST(EfficiencyTest, OptimumRoutesAgreeWithRandomDemand) {
  MarketConfig cfg = testing::config(9, 1, {0.2, 0.3}, 10, 1);
  cfg.demand = DemandModel::random({0.1, 0.2, 0.3, 0.25, 0.15});
  const auto inst = validate(cfg, PenaltyModel::shift_cubic(2, 1));
  EXPECT_NEAR(r_opt_enumerate(inst), r_opt(inst), 1e-12);
  const auto mc = r_opt_monte_carlo(inst, 200000, 3);
  EXPECT_LE(std::abs(mc.mean - r_opt(inst)), 4.0 * mc.std_error);
}

TEST(EfficiencyTest, MonteCarloOptimum) {
  const auto inst = testing::shift_cubic_instance(21);
  const auto mc = r_opt_monte_carlo(inst, 100000, 1);
  EXPECT_LE(std::abs(mc.mean - r_opt(inst)), 4.0 * mc.std_error);
}

TEST(EfficiencyTest, EnumerationSizeLimit) {
  EXPECT_THROW(r_opt_enumerate(testing::quad_cubic_instance(501, 50)), SizeError);
}

TEST(EfficiencyTest, EtaInUnitInterval) {
  testing::Draws d(43);
  for (int t = 0; t < 20; ++t) {
    const auto e = efficiency(testing::random_instance(d));
    EXPECT_GT(e.eta, 0.0);
    EXPECT_LE(e.eta, 1.0 + 1e-12);
  }
}

TEST(RegimeTest, Classification) {
  // Thresholds (l-1) Q_{>=k} for l = 51, q = 0.2 x 3: 30, 20, 10.
  using Kind = AsymptoticRegime::Kind;
  EXPECT_EQ(classify_regime(testing::quad_cubic_instance(51, 35)).kind, Kind::kAllSell);
  const auto mid = classify_regime(testing::quad_cubic_instance(51, 25));
  EXPECT_EQ(mid.kind, Kind::kMiddle);
  EXPECT_EQ(mid.k, 1);
  EXPECT_EQ(classify_regime(testing::quad_cubic_instance(51, 15)).k, 2);
  EXPECT_EQ(classify_regime(testing::quad_cubic_instance(51, 5)).kind, Kind::kSaturated);
  EXPECT_EQ(classify_regime(testing::quad_cubic_instance(51, 30)).kind, Kind::kBoundary);
  EXPECT_EQ(classify_regime(testing::quad_cubic_instance(51, 20)).kind, Kind::kBoundary);
}

TEST(RegimeTest, RandomDemandHasNoRegime) {
  MarketConfig cfg = testing::config(9, 1, {0.2, 0.3}, 10, 1);
  cfg.demand = DemandModel::random({0.5, 0.5});
  const auto inst = validate(cfg, PenaltyModel::shift_cubic(2, 1));
  EXPECT_THROW(classify_regime(inst), ConfigError);
  EXPECT_FALSE(efficiency(inst).regime.has_value());
}

TEST(RegimeTest, LargeMarketLimits) {
  const auto high = testing::quad_cubic_instance(501, 400);
  const auto eh = efficiency(high);
  EXPECT_GE(eh.eta, 0.95);
  for (int i = 1; i <= 3; ++i) {
    const double cap = high.margin_at(i, high.v());
    EXPECT_NEAR(eh.per_state_profit[i - 1], cap, 0.05 * cap);
  }
  EXPECT_LE(efficiency(testing::quad_cubic_instance(501, 50)).eta, 0.05);
}

TEST(SweepRowsTest, RecordsEveryValue) {
  const auto inst = testing::quad_cubic_instance(51, 25);
  const auto rows = sweep(inst.config(), inst.model(), SweepParameter::kM, 1, 50);
  ASSERT_EQ(rows.size(), 50u);
  for (const auto& r : rows) EXPECT_TRUE(r.ok) << r.value << ": " << r.error;
  // Efficiency rises with demand once every state sells.
  EXPECT_GT(rows.back().result.eta, rows.front().result.eta);
}

TEST(SweepRowsTest, NSweepNeedsLinearRate) {
  const auto inst = testing::quad_cubic_instance(51, 25);
  EXPECT_THROW(sweep_instance(inst.config(), inst.model(), SweepParameter::kN, 3), ConfigError);
}

TEST(SweepRowsTest, LinearRateTrendInN) {
  const auto base = validate(testing::config(21, 10, {0.25, 0.25}, 10, 0),
                             PenaltyModel::linear_rate(2, 3.5, 0.5));
  const auto rows = sweep(base.config(), base.model(), SweepParameter::kN, 80, 100);
  ASSERT_TRUE(rows.front().ok && rows.back().ok);
  EXPECT_NEAR(rows.front().lowers[1], 9.487737, 1e-5);
  EXPECT_NEAR(rows.front().lowers.back(), 3.772195, 1e-5);
  EXPECT_NEAR(rows.back().lowers[1], 9.586699, 1e-5);
  EXPECT_NEAR(rows.back().lowers.back(), 3.774425, 1e-5);
}

}  // namespace
}  // namespace specne
