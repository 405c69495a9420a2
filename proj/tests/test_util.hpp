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


#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "specne/specne.hpp"

namespace specne::testing {

inline MarketConfig config(int l, int m, std::vector<double> q, double v, double c) {
  MarketConfig cfg;
  cfg.l = l;
  cfg.demand = DemandModel::fixed(m);
  cfg.q = std::move(q);
  cfg.v = v;
  cfg.c = c;
  return cfg;
}

/// v=100, c=1, m=10, three states at 0.2 each, g_i(x) = x - i^3.
inline ValidatedInstance shift_cubic_instance(int l) {
  return validate(config(l, 10, {0.2, 0.2, 0.2}, 100.0, 1.0), PenaltyModel::shift_cubic(3, 1.0));
}

inline ValidatedInstance log_exp_instance() {
  return validate(config(20, 10, {0.2, 0.4}, 5.0, 0.0), PenaltyModel::log_exp());
}

inline ValidatedInstance quad_cubic_instance(int l, int m) {
  return validate(config(l, m, {0.2, 0.2, 0.2}, 100.0, 1.0), PenaltyModel::quad_cubic(3));
}

inline ValidatedInstance toy_instance() {
  return validate(config(2, 1, {0.5}, 10.0, 0.0), PenaltyModel::shift_cubic(1, 1.0));
}

/// Small deterministic generator for randomized instances.
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : rng_(seed, 0, 0) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(rng_.uniform() * (hi - lo + 1));
  }

 private:
  StreamRng rng_;
};

/// Random shift-cubic instance with l <= max_l and n <= max_n whose
/// equilibrium is contested in every state. The kernel is kept away from 0
/// and 1 on [q_n, Q_{>=1}]; otherwise adjacent endpoints differ by less
/// than a double can resolve.
inline ValidatedInstance random_instance(Draws& d, int max_l = 60, int max_n = 4) {
  for (;;) {
    const int l = d.integer(2, max_l);
    const int n = d.integer(1, max_n);
    const int m = d.integer(1, l - 1);
    std::vector<double> q(n);
    double total = d.uniform(0.2, 0.95);
    for (int i = 0; i < n; ++i) q[i] = total / n * d.uniform(0.5, 1.5);
    double sum = 0.0;
    for (double x : q) sum += x;
    if (sum >= 0.99) continue;
    const double a = d.uniform(0.05, 2.0);
    const double c = d.uniform(0.0, 2.0);
    const double v = d.uniform(5.0, 150.0);
    auto inst = validate(config(l, m, q, v, c), PenaltyModel::shift_cubic(n, a));
    if (inst.all_quote_v()) continue;
    const double w1 = inst.kernel()(inst.tail(1));
    const double wn = inst.kernel()(inst.tail(n));
    if (wn > 1e-9 && w1 < 1.0 - 1e-6) return inst;
  }
}

/// Naive oracle for the competition kernel: direct binomial sum.
inline long double naive_kernel(int l, int m, long double x) {
  long double total = 0.0L;
  for (int k = m; k <= l - 1; ++k) {
    long double choose = 1.0L;
    for (int t = 0; t < k; ++t) choose = choose * (l - 1 - t) / (t + 1);
    total += choose * std::pow(x, k) * std::pow(1.0L - x, l - 1 - k);
  }
  return total;
}

}  // namespace specne::testing
