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
#include <memory>

#include "gtest/gtest.h"
#include "specne/specne.hpp"
#include "test_util.hpp"

namespace specne {
namespace {

ValidatedInstance constant_ratio_instance() {
  return validate(testing::config(6, 2, {0.3, 0.3}, 10, 1), PenaltyModel::constant_ratio(2, 1, 1));
}

ValidatedInstance asymmetric_instance() {
  return validate(testing::config(2, 1, {0.3, 0.3}, 10, 1), PenaltyModel::constant_ratio(2, 1, 1));
}

TEST(AlternateTest, BothProfilesCertify) {
  const auto inst = constant_ratio_instance();
  const auto alt = build_alternate_ne(inst);
  EXPECT_TRUE(certify_alternate(alt).pass());
  const auto eq = compute_equilibrium(inst);
  for (int j = 1; j <= 2; ++j) EXPECT_TRUE(best_response_sweep(eq, j).pass());
  double distance = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double x = alt.lbar() + (10.0 - alt.lbar()) * k / 1000.0;
    distance = std::max(distance, std::abs(cdf_eval(eq, 1, x) - alt.cdf(x)));
  }
  EXPECT_GT(distance, 0.01);
}

TEST(AlternateTest, ProfitsMatchStandardProfile) {
  // Both equilibria leave the same per-state profit.
  const auto inst = constant_ratio_instance();
  const auto alt = build_alternate_ne(inst);
  const auto eq = compute_equilibrium(inst);
  for (int i = 1; i <= 2; ++i) EXPECT_NEAR(alt.margin(i), eq.margin(i), 1e-12);
}

TEST(AlternateTest, SamplerInvertsCdf) {
  const auto alt = build_alternate_ne(constant_ratio_instance());
  for (double u : {0.1, 0.5, 0.9}) EXPECT_NEAR(alt.cdf(alt.sample(u)), u, 1e-9);
}

TEST(AlternateTest, SimulatedProfitMatches) {
  const auto alt = std::make_shared<const AlternateNE>(build_alternate_ne(constant_ratio_instance()));
  const auto sim = simulate_markets(alternate_profile(alt), alt->instance(), 100000, 2);
  for (const auto& est : sim.pooled) {
    EXPECT_LE(std::abs(est.mean - alt->margin(est.state)), 4.0 * est.std_error);
  }
}

TEST(AlternateTest, NeedsConstantRatio) {
  EXPECT_THROW(build_alternate_ne(testing::shift_cubic_instance(21)), ModelError);
}

TEST(AsymmetricTest, Certifies) {
  const auto pair = build_asymmetric_ne(asymmetric_instance());
  EXPECT_TRUE(certify_asymmetric(pair).pass());
  EXPECT_GT(pair.lhat(), pair.lhat_low());
  const double mid = 0.5 * (pair.lhat() + 10.0);
  EXPECT_GT(std::abs(pair.cdf(1, 1, mid) - pair.cdf(2, 1, mid)), 0.01);
  for (int p = 1; p <= 2; ++p) {
    for (int j = 1; j <= 2; ++j) {
      EXPECT_NEAR(pair.cdf(p, j, pair.support_lo(p, j)), 0.0, 1e-12);
      EXPECT_NEAR(pair.cdf(p, j, pair.support_hi(p, j)), 1.0, 1e-12);
    }
  }
}

TEST(AsymmetricTest, PatternChecks) {
  EXPECT_THROW(build_asymmetric_ne(constant_ratio_instance()), PatternError);
  EXPECT_THROW(build_asymmetric_ne(validate(testing::config(2, 1, {0.3, 0.2}, 10, 1),
                                            PenaltyModel::constant_ratio(2, 1, 1))),
               PatternError);
}

TEST(TildeTest, FrozenValuesAndCertificate) {
  const auto t = build_tilde_ne(testing::log_exp_instance());
  EXPECT_NEAR(t.ptilde(2), 27.618504782045598, 1e-9);
  EXPECT_NEAR(t.ltilde(2), 3.3200663798548686, 1e-9);
  EXPECT_NEAR(t.ptilde(1), 3.314823594809841, 1e-9);
  EXPECT_NEAR(t.ltilde(1), 3.314823594809841, 1e-9);
  EXPECT_TRUE(certify_tilde(t, 10000, 1e-9).pass());
}

TEST(TildeTest, SimulatedProfitMatches) {
  const auto t = std::make_shared<const TildeNE>(build_tilde_ne(testing::log_exp_instance()));
  const auto sim = simulate_markets(tilde_profile(t), t->instance(), 100000, 8);
  for (const auto& est : sim.pooled) {
    EXPECT_LE(std::abs(est.mean - t->margin(est.state)), 4.0 * est.std_error);
  }
}

TEST(TildeTest, NeedsLogExp) {
  EXPECT_THROW(build_tilde_ne(testing::shift_cubic_instance(21)), ModelError);
}

}  // namespace
}  // namespace specne
