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

// Strategy profiles: for every primary and channel state, the law of the
// quoted penalty.

#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "specne/equilibrium.hpp"
#include "specne/errors.hpp"

namespace specne {

/// Quote exactly `x`.
struct PointMass {
  double x = 0.0;
};

/// Channel not offered (conventionally penalty v + 1; never sold).
struct NoOffer {};

/// A continuous law on [lo, hi] given by its CDF and quantile function.
struct PiecewiseCdf {
  std::function<double(double)> cdf;
  std::function<double(double)> sample;
  double lo = 0.0;
  double hi = 0.0;
};

using PenaltyLaw = std::variant<PointMass, NoOffer, PiecewiseCdf>;

/// Pr(X < x) under `law`.
inline double prob_below(const PenaltyLaw& law, double x) {
  if (const auto* pm = std::get_if<PointMass>(&law)) return pm->x < x ? 1.0 : 0.0;
  if (std::holds_alternative<NoOffer>(law)) return 0.0;
  const auto& pc = std::get<PiecewiseCdf>(law);
  if (x <= pc.lo) return 0.0;
  if (x > pc.hi) return 1.0;
  return pc.cdf(x);
}

/// Pr(X = x) under `law`; nonzero only for point masses.
inline double prob_tie(const PenaltyLaw& law, double x) {
  if (const auto* pm = std::get_if<PointMass>(&law)) return pm->x == x ? 1.0 : 0.0;
  return 0.0;
}

/// Pr(X <= x) under `law`.
inline double prob_at_most(const PenaltyLaw& law, double x) {
  return prob_below(law, x) + prob_tie(law, x);
}

/// Quoted penalty at quantile u, or +inf for NoOffer.
inline double draw_penalty(const PenaltyLaw& law, double u) {
  if (const auto* pm = std::get_if<PointMass>(&law)) return pm->x;
  if (std::holds_alternative<NoOffer>(law)) return std::numeric_limits<double>::infinity();
  return std::get<PiecewiseCdf>(law).sample(u);
}

/// laws[primary][state], state 0..n. A symmetric profile stores a single
/// primary and answers for all of them.
class StrategyProfile {
 public:
  StrategyProfile(int primaries, std::vector<std::vector<PenaltyLaw>> laws)
      : primaries_(primaries), laws_(std::move(laws)) {
    if (laws_.empty()) throw ConfigError("strategy profile has no laws");
    if (laws_.size() != 1 && static_cast<int>(laws_.size()) != primaries_) {
      throw ConfigError("strategy profile needs one law set or one per primary");
    }
    for (const auto& row : laws_) {
      if (row.size() != laws_.front().size()) {
        throw ConfigError("strategy profile rows differ in state count");
      }
    }
  }

  int primaries() const { return primaries_; }
  int states() const { return static_cast<int>(laws_.front().size()) - 1; }
  bool symmetric() const { return laws_.size() == 1; }

  const PenaltyLaw& law(int primary, int state) const {
    return laws_[symmetric() ? 0 : primary][state];
  }

  /// Replace one primary's law in one state, e.g. to plant a deviation.
  /// Expands a symmetric profile into per-primary rows first.
  void set_law(int primary, int state, PenaltyLaw law) {
    if (symmetric()) laws_.assign(primaries_, laws_.front());
    laws_[primary][state] = std::move(law);
  }

 private:
  int primaries_;
  std::vector<std::vector<PenaltyLaw>> laws_;
};

/// The equilibrium's CDFs packaged as a symmetric profile. State 0 never
/// offers; the degenerate instance quotes v in every state.
inline StrategyProfile strategy_profile(std::shared_ptr<const Equilibrium> eq) {
  const int n = eq->n();
  std::vector<PenaltyLaw> row;
  row.reserve(n + 1);
  row.emplace_back(NoOffer{});
  for (int i = 1; i <= n; ++i) {
    if (eq->all_quote_v()) {
      row.emplace_back(PointMass{eq->instance().v()});
      continue;
    }
    PiecewiseCdf law;
    law.cdf = [eq, i](double x) { return cdf_eval(*eq, i, x); };
    law.sample = [eq, i](double u) { return sample_penalty(*eq, i, u); };
    law.lo = eq->lower(i);
    law.hi = eq->lower(i - 1);
    row.emplace_back(std::move(law));
  }
  return StrategyProfile(eq->instance().l(), {std::move(row)});
}

inline StrategyProfile strategy_profile(const Equilibrium& eq) {
  return strategy_profile(std::make_shared<const Equilibrium>(eq));
}

}  // namespace specne
