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

// The competition kernel w(x): the probability that a primary loses its sale
// when each of the other l-1 primaries independently undercuts it with
// probability x.
//
// With fixed demand m this is the binomial tail Pr(Bin(l-1, x) >= m). With
// random demand M it is E[Pr(Bin(l-1, x) >= M)], which regroups as
//
//   w(x) = sum_i Pr(Bin(l-1, x) = i) * Pr(M <= i).
//
// The complement 1 - w(x) is summed separately with Pr(M > i) so that neither
// side suffers cancellation near 0 or 1.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "specne/demand.hpp"
#include "specne/errors.hpp"

namespace specne {

class CompetitionKernel {
 public:
  CompetitionKernel(int primaries, const DemandModel& demand)
      : trials_(primaries - 1) {
    if (primaries < 2) throw ConfigError("kernel: need at least two primaries");
    log_choose_.resize(trials_ + 1);
    lose_.resize(trials_ + 1);
    win_.resize(trials_ + 1);
    log_choose_[0] = 0.0;
    for (int i = 1; i <= trials_; ++i) {
      log_choose_[i] = log_choose_[i - 1] + std::log(double(trials_ - i + 1) / i);
    }
    for (int i = 0; i <= trials_; ++i) {
      lose_[i] = demand.at_most(i);
      win_[i] = demand.above(i);
    }
  }

  int trials() const { return trials_; }

  /// w(x).
  double operator()(double x) const { return sum(x, lose_); }

  /// 1 - w(x), without cancellation.
  double complement(double x) const { return sum(x, win_); }

  double floor() const { return lose_.front(); }    // w(0)
  double ceiling() const { return lose_.back(); }   // w(1)

  /// True when w is constant on [0, 1] (no competition for the slots).
  bool flat() const {
    for (int i = 1; i <= trials_; ++i) {
      if (lose_[i] != lose_[0]) return false;
    }
    return true;
  }

  /// Pr(Bin(l-1, x) = i).
  double binomial_term(int i, double x) const {
    if (i < 0 || i > trials_) return 0.0;
    if (x <= 0.0) return i == 0 ? 1.0 : 0.0;
    if (x >= 1.0) return i == trials_ ? 1.0 : 0.0;
    return std::exp(log_choose_[i] + i * std::log(x) +
                    (trials_ - i) * std::log1p(-x));
  }

  /// The x in [0, 1] with w(x) = y, by bisection down to adjacent doubles.
  double invert(double y) const {
    check_range(y, floor(), ceiling(), "invert");
    return bisect([&](double x) { return (*this)(x) < y; });
  }

  /// The x in [0, 1] with 1 - w(x) = z. Preferable to invert(1 - z) when z
  /// is small.
  double invert_complement(double z) const {
    check_range(z, 1.0 - ceiling(), 1.0 - floor(), "invert_complement");
    return bisect([&](double x) { return complement(x) > z; });
  }

 private:
  double sum(double x, const std::vector<double>& weight) const {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw DomainError("kernel: argument " + std::to_string(x) + " outside [0, 1]");
    }
    if (x == 0.0) return weight.front();
    if (x == 1.0) return weight.back();
    const double lx = std::log(x);
    const double ly = std::log1p(-x);
    double total = 0.0;
    for (int i = 0; i <= trials_; ++i) {
      if (weight[i] == 0.0) continue;
      const double lt = log_choose_[i] + i * lx + (trials_ - i) * ly;
      if (lt < -745.0) continue;
      total += weight[i] * std::exp(lt);
    }
    return std::min(total, 1.0);
  }

  static void check_range(double y, double lo, double hi, const char* what) {
    // A few ulps of slack: callers pass values computed from the same sums.
    const double slack = 4e-16;
    if (!(y >= lo - slack && y <= hi + slack)) {
      throw RangeError(std::string("kernel ") + what + ": " + std::to_string(y) +
                       " outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
    }
  }

  // Smallest x with below(x) false, for a predicate that is true on a prefix.
  template <typename Below>
  static double bisect(Below below) {
    double lo = 0.0;
    double hi = 1.0;
    if (!below(lo)) return lo;
    if (below(hi)) return hi;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (below(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  int trials_;
  std::vector<double> log_choose_;
  std::vector<double> lose_;  // Pr(M <= i)
  std::vector<double> win_;   // Pr(M > i)
};

}  // namespace specne
