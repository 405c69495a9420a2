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
#include <string>
#include <utility>
#include <vector>

#include "specne/errors.hpp"

namespace specne {

/// Number of secondaries M in a slot: either a fixed m or a finite pmf.
///
/// Both variants are stored as a pmf gamma_0..gamma_max so that every
/// consumer has a single code path; a fixed demand is the point mass at m.
class DemandModel {
 public:
  static DemandModel fixed(int m) {
    if (m < 1) throw ConfigError("demand: fixed m must be >= 1");
    DemandModel d;
    d.fixed_ = true;
    d.pmf_.assign(static_cast<std::size_t>(m) + 1, 0.0);
    d.pmf_[m] = 1.0;
    d.finish();
    return d;
  }

  static DemandModel random(std::vector<double> pmf) {
    if (pmf.empty()) throw ConfigError("demand: pmf is empty");
    double total = 0.0;
    for (double g : pmf) {
      if (!(g >= 0.0) || !std::isfinite(g)) {
        throw ConfigError("demand: pmf entries must be finite and >= 0");
      }
      total += g;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw ConfigError("demand: pmf must sum to 1 (got " + std::to_string(total) + ")");
    }
    DemandModel d;
    d.fixed_ = false;
    d.pmf_ = std::move(pmf);
    d.finish();
    return d;
  }

  bool is_fixed() const { return fixed_; }

  /// The fixed m; only meaningful when is_fixed().
  int m() const { return static_cast<int>(pmf_.size()) - 1; }

  int max_demand() const { return static_cast<int>(pmf_.size()) - 1; }
  const std::vector<double>& pmf() const { return pmf_; }
  double prob(int k) const {
    return (k >= 0 && k <= max_demand()) ? pmf_[k] : 0.0;
  }

  /// Pr(M <= k).
  double at_most(int k) const {
    if (k < 0) return 0.0;
    if (k >= max_demand()) return 1.0;
    return cdf_[k];
  }

  /// Pr(M > k), accumulated from the upper tail rather than 1 - cdf.
  double above(int k) const {
    if (k < 0) return 1.0;
    if (k >= max_demand()) return 0.0;
    return survival_[k];
  }

 private:
  DemandModel() = default;

  void finish() {
    const std::size_t size = pmf_.size();
    cdf_.assign(size, 0.0);
    survival_.assign(size, 0.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      acc += pmf_[k];
      cdf_[k] = acc;
    }
    acc = 0.0;
    for (std::size_t k = size; k-- > 0;) {
      survival_[k] = acc;
      acc += pmf_[k];
    }
  }

  bool fixed_ = true;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
  std::vector<double> survival_;
};

}  // namespace specne
