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
#include <limits>

#include "gtest/gtest.h"
#include "specne/specne.hpp"
#include "test_util.hpp"

namespace specne {
namespace {

using testing::naive_kernel;

TEST(KernelTest, MatchesNaiveBinomialSum) {
  for (int l : {2, 3, 7, 21, 60}) {
    for (int m = 1; m < l; ++m) {
      CompetitionKernel w(l, DemandModel::fixed(m));
      for (double x : {0.0, 0.013, 0.2, 0.5, 0.61, 0.99, 1.0}) {
        const double want = static_cast<double>(naive_kernel(l, m, x));
        EXPECT_NEAR(w(x), want, 1e-13) << "l=" << l << " m=" << m << " x=" << x;
        EXPECT_NEAR(w.complement(x), 1.0 - want, 1e-13);
      }
    }
  }
}

TEST(KernelTest, FrozenValue) {
  CompetitionKernel w(21, DemandModel::fixed(10));
  EXPECT_NEAR(w(0.6), 0.8724787538527833, 1e-15);
}

TEST(KernelTest, MonotoneAndBounded) {
  CompetitionKernel w(31, DemandModel::fixed(7));
  double prev = w(0.0);
  for (int k = 1; k <= 1000; ++k) {
    const double cur = w(k / 1000.0);
    EXPECT_GE(cur, prev - 1e-15);
    EXPECT_LE(cur, 1.0);
    prev = cur;
  }
}

TEST(KernelTest, InversionRoundTrip) {
  CompetitionKernel w(21, DemandModel::fixed(10));
  for (double x : {0.05, 0.3, 0.5, 0.7, 0.95}) {
    // Residuals, not x itself: the kernel is nearly flat in its tails.
    EXPECT_NEAR(w(w.invert(w(x))), w(x), 1e-15);
    EXPECT_NEAR(w.complement(w.invert_complement(w.complement(x))), w.complement(x),
                1e-15 * w.complement(x) + 1e-300);
  }
  EXPECT_THROW(w.invert(1.5), RangeError);
}

TEST(KernelTest, FlatWhenDemandCoversEveryone) {
  CompetitionKernel w(5, DemandModel::fixed(5));
  EXPECT_TRUE(w.flat());
  EXPECT_DOUBLE_EQ(w(0.7), 0.0);
}

TEST(KernelTest, RandomDemandMixesFixedKernels) {
  const std::vector<double> pmf = {0.1, 0.2, 0.3, 0.4};
  CompetitionKernel mixed(9, DemandModel::random(pmf));
  for (double x : {0.1, 0.45, 0.8}) {
    double want = 0.0;
    for (int k = 0; k < 4; ++k) want += pmf[k] * static_cast<double>(naive_kernel(9, k, x));
    EXPECT_NEAR(mixed(x), want, 1e-14);
  }
}

TEST(DemandTest, PmfValidation) {
  EXPECT_THROW(DemandModel::random({0.5, 0.4}), ConfigError);
  EXPECT_THROW(DemandModel::random({}), ConfigError);
  EXPECT_THROW(DemandModel::fixed(0), ConfigError);
  const auto d = DemandModel::random({0.0, 0.25, 0.75});
  EXPECT_FALSE(d.is_fixed());
  EXPECT_DOUBLE_EQ(d.at_most(1), 0.25);
  EXPECT_DOUBLE_EQ(d.above(1), 0.75);
}

TEST(PenaltyTest, PriceInvertsPenalty) {
  const std::vector<PenaltyModel> models = {
      PenaltyModel::shift_cubic(3, 1.0), PenaltyModel::quad_cubic(3),
      PenaltyModel::linear_rate(4, 3.5, 0.5), PenaltyModel::constant_ratio(2, 1.5, 1.0),
      PenaltyModel::log_exp()};
  for (const auto& model : models) {
    for (int i = 1; i <= model.states(); ++i) {
      for (double y : {1.2, 2.0, 4.5}) {
        EXPECT_NEAR(model.penalty(i, model.price(i, y)), y, 1e-12)
            << family_name(model.family()) << " state " << i;
      }
    }
  }
}

TEST(PenaltyTest, ShiftCubicClosedForm) {
  const auto g = PenaltyModel::shift_cubic(3, 1.0);
  EXPECT_DOUBLE_EQ(g.penalty(2, 20.0), 12.0);
  EXPECT_DOUBLE_EQ(g.price(3, 10.0), 37.0);
  EXPECT_THROW(PenaltyModel::shift_cubic(3, 0.0), ConfigError);
}

TEST(PenaltyTest, StateOutOfRange) {
  const auto g = PenaltyModel::quad_cubic(3);
  EXPECT_THROW(g.penalty(4, 1.0), DomainError);
  EXPECT_THROW(g.penalty(0, 1.0), DomainError);
}

TEST(MarketTest, ValidationRejectsBadConfigs) {
  using testing::config;
  EXPECT_THROW(validate(config(1, 1, {0.5}, 10, 0), PenaltyModel::shift_cubic(1, 1)),
               ConfigError);
  EXPECT_THROW(validate(config(5, 1, {0.6, 0.5}, 10, 0), PenaltyModel::shift_cubic(2, 1)),
               ConfigError);
  EXPECT_THROW(validate(config(5, 1, {0.2, 0.2}, 10, 0), PenaltyModel::shift_cubic(3, 1)),
               ConfigError);
}

TEST(MarketTest, TailSums) {
  const auto inst = testing::log_exp_instance();
  EXPECT_NEAR(inst.tail(1), 0.6, 1e-15);
  EXPECT_NEAR(inst.tail(2), 0.4, 1e-15);
  EXPECT_NEAR(inst.above(2), 0.0, 0.0);
}

TEST(MarketTest, AllQuoteVWhenDemandIsLarge) {
  const auto inst = validate(testing::config(5, 5, {0.3, 0.3}, 10, 1),
                             PenaltyModel::shift_cubic(2, 1));
  EXPECT_TRUE(inst.all_quote_v());
}

TEST(AssumptionTest, Outcomes) {
  EXPECT_TRUE(check_ratio_ordering(testing::shift_cubic_instance(21)).holds());
  EXPECT_TRUE(check_ratio_ordering(testing::quad_cubic_instance(51, 25)).holds());
  const auto logexp = check_ratio_ordering(testing::log_exp_instance());
  EXPECT_EQ(logexp.status, AssumptionReport::Status::kViolated);
  const auto flat = check_ratio_ordering(
      validate(testing::config(6, 2, {0.3, 0.3}, 10, 1), PenaltyModel::constant_ratio(2, 1, 1)));
  EXPECT_EQ(flat.status, AssumptionReport::Status::kBoundary);
}

TEST(RngTest, StreamsAreReproducibleAndDistinct) {
  StreamRng a(7, 3, 1), b(7, 3, 1), c(7, 3, 2), d(7, 4, 1);
  const auto x = a.next();
  EXPECT_EQ(x, b.next());
  EXPECT_NE(x, c.next());
  EXPECT_NE(x, d.next());
  StreamRng u(1, 0, 0);
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double r = u.uniform();
    ASSERT_GE(r, 0.0);
    ASSERT_LT(r, 1.0);
    sum += r;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

}  // namespace
}  // namespace specne
