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

// Game instances: the market configuration, its validation against a
// penalty model, and a grid check of the profit-ratio ordering that the
// uniqueness results rely on.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "specne/demand.hpp"
#include "specne/errors.hpp"
#include "specne/kernel.hpp"
#include "specne/penalty.hpp"

namespace specne {

struct MarketConfig {
  int l = 2;                                 // primaries
  DemandModel demand = DemandModel::fixed(1);
  std::vector<double> q;                     // q_1..q_n
  double v = 0.0;                            // penalty cap
  double c = 0.0;                            // transaction cost

  int n() const { return static_cast<int>(q.size()); }
};

enum class InstanceKind {
  kContested,
  kAllQuoteV,  // demand never binds: every primary quotes v with certainty
};

/// A configuration paired with its penalty model after validation. Holds
/// the kernel and the tail sums Q_{>=i} = q_i + ... + q_n so downstream code
/// never re-derives them.
class ValidatedInstance {
 public:
  const MarketConfig& config() const { return config_; }
  const PenaltyModel& model() const { return model_; }
  const CompetitionKernel& kernel() const { return kernel_; }
  InstanceKind kind() const { return kind_; }
  bool all_quote_v() const { return kind_ == InstanceKind::kAllQuoteV; }

  int l() const { return config_.l; }
  int n() const { return config_.n(); }
  double v() const { return config_.v; }
  double c() const { return config_.c; }
  double q(int i) const { return config_.q[i - 1]; }
  const DemandModel& demand() const { return config_.demand; }

  /// Q_{>=i} for i = 1..n+1 (Q_{>=n+1} = 0).
  double tail(int i) const { return tail_[i - 1]; }
  /// Q_{>i}.
  double above(int i) const { return tail_[i]; }

  /// f_i(x) - c.
  double margin_at(int i, double x) const { return model_.price(i, x) - config_.c; }

  /// Lower end of the penalties worth quoting in state i: g_i(c), or the
  /// bottom of the penalty range when g_i(c) is undefined.
  double cost_penalty(int i) const { return model_.penalty_floor(i, config_.c); }

 private:
  friend ValidatedInstance validate(MarketConfig config, PenaltyModel model);

  ValidatedInstance(MarketConfig config, PenaltyModel model)
      : config_(std::move(config)),
        model_(std::move(model)),
        kernel_(config_.l, config_.demand) {}

  MarketConfig config_;
  PenaltyModel model_;
  CompetitionKernel kernel_;
  InstanceKind kind_ = InstanceKind::kContested;
  std::vector<double> tail_;
};

inline ValidatedInstance validate(MarketConfig config, PenaltyModel model) {
  if (config.l < 2) throw ConfigError("l must be >= 2");
  if (config.q.empty()) throw ConfigError("q is empty (n must be >= 1)");
  if (config.n() != model.states()) {
    throw ConfigError("penalty model has " + std::to_string(model.states()) +
                      " states but q has " + std::to_string(config.n()));
  }
  double total = 0.0;
  for (int i = 0; i < config.n(); ++i) {
    if (!(config.q[i] > 0.0)) {
      throw ConfigError("q_" + std::to_string(i + 1) + " must be > 0");
    }
    total += config.q[i];
  }
  if (!(total < 1.0)) throw ConfigError("sum of q must be < 1");
  if (!(config.c >= 0.0) || !std::isfinite(config.c)) {
    throw ConfigError("c must be finite and >= 0");
  }
  if (!std::isfinite(config.v)) throw ConfigError("v must be finite");
  for (int i = 1; i <= config.n(); ++i) {
    if (!model.penalty_domain(i).admits(config.v)) {
      throw ConfigError("v lies outside the penalty range of state " +
                        std::to_string(i));
    }
  }
  if (!(model.price(1, config.v) > config.c)) {
    throw ConfigError("f_1(v) must exceed c");
  }

  ValidatedInstance inst(std::move(config), std::move(model));
  const int n = inst.n();
  inst.tail_.assign(n + 1, 0.0);
  for (int i = n; i >= 1; --i) inst.tail_[i - 1] = inst.tail_[i] + inst.q(i);
  if (inst.kernel_.flat()) inst.kind_ = InstanceKind::kAllQuoteV;
  return inst;
}

/// Outcome of the profit-ratio grid check.
struct AssumptionReport {
  enum class Status {
    kHolds,     // every ratio strictly increasing
    kBoundary,  // every ratio constant
    kViolated,
  };
  Status status = Status::kHolds;
  int state_i = 0;  // first offending pair (i < j)
  int state_j = 0;
  double x_prev = 0.0;
  double x = 0.0;
  int grid_size = 0;

  bool holds() const { return status == Status::kHolds; }
};

inline const char* status_name(AssumptionReport::Status s) {
  switch (s) {
    case AssumptionReport::Status::kHolds: return "holds";
    case AssumptionReport::Status::kBoundary: return "boundary";
    case AssumptionReport::Status::kViolated: return "violated";
  }
  return "unknown";
}

/// Samples (f_i(x) - c) / (f_j(x) - c) for each pair i < j on a uniform grid
/// over (g_i(c), v] and checks that consecutive values increase by more
/// than `tolerance`.
inline AssumptionReport check_ratio_ordering(const ValidatedInstance& inst,
                                          int grid_size = 512,
                                          double tolerance = 1e-12) {
  if (grid_size < 3) throw ConfigError("assumption check: grid_size must be >= 3");
  AssumptionReport report;
  report.grid_size = grid_size;
  const double v = inst.v();
  bool all_flat = true;
  bool first_flat_set = false;
  AssumptionReport flat_witness;
  for (int i = 1; i <= inst.n(); ++i) {
    double lo = inst.cost_penalty(i);
    if (!std::isfinite(lo)) lo = v - 100.0 * std::max(1.0, std::abs(v));
    for (int j = i + 1; j <= inst.n(); ++j) {
      double prev_x = 0.0;
      double prev = 0.0;
      for (int k = 1; k <= grid_size; ++k) {
        const double x = k == grid_size ? v : lo + (v - lo) * k / grid_size;
        const double r = inst.margin_at(i, x) / inst.margin_at(j, x);
        if (k > 1) {
          const double diff = r - prev;
          if (std::abs(diff) > tolerance) all_flat = false;
          if (!(diff > tolerance)) {
            if (diff < -tolerance) {
              report.status = AssumptionReport::Status::kViolated;
              report.state_i = i;
              report.state_j = j;
              report.x_prev = prev_x;
              report.x = x;
              return report;
            }
            if (!first_flat_set) {
              first_flat_set = true;
              flat_witness = report;
              flat_witness.state_i = i;
              flat_witness.state_j = j;
              flat_witness.x_prev = prev_x;
              flat_witness.x = x;
            }
          }
        }
        prev = r;
        prev_x = x;
      }
    }
  }
  if (!first_flat_set) return report;
  flat_witness.status = all_flat ? AssumptionReport::Status::kBoundary
                                 : AssumptionReport::Status::kViolated;
  return flat_witness;
}

}  // namespace specne
