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

// Equilibrium revenue against the collusive optimum, the large-market
// regimes, and parameter sweeps.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specne/equilibrium.hpp"
#include "specne/errors.hpp"
#include "specne/market.hpp"
#include "specne/rng.hpp"

namespace specne {

namespace detail {

/// Pr(Bin(trials, p) = k) for k = 0..trials.
inline std::vector<double> binomial_pmf(int trials, double p) {
  std::vector<double> pmf(trials + 1, 0.0);
  if (p <= 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p >= 1.0) {
    pmf[trials] = 1.0;
    return pmf;
  }
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lf = std::lgamma(trials + 1.0);
  for (int k = 0; k <= trials; ++k) {
    pmf[k] = std::exp(lf - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0) +
                      k * lp + (trials - k) * lq);
  }
  return pmf;
}

}  // namespace detail

/// Expected equilibrium profit of one primary: sum_i q_i (p_i - c).
inline double r_ne(const Equilibrium& eq) {
  double total = 0.0;
  for (int i = 1; i <= eq.n(); ++i) total += eq.instance().q(i) * eq.margin(i);
  return total;
}

/// Collusive optimum: all l primaries together sell their min(Y, M)
/// highest-state available channels, each at penalty v.
///
/// Per state s, with B_s ~ Bin(l, Q_{>s}) channels in higher states and, given
/// B_s = b, N_s ~ Bin(l - b, q_s / (1 - Q_{>s})) channels in state s, the
/// number of state-s sales is min(N_s, (M - B_s)^+).
inline double r_opt(const ValidatedInstance& inst) {
  const int l = inst.l();
  const auto& pmf = inst.demand().pmf();
  double total = 0.0;
  for (int s = 1; s <= inst.n(); ++s) {
    const double gain = inst.margin_at(s, inst.v());
    const double higher = inst.above(s);
    const double share = inst.q(s) / (1.0 - higher);
    const std::vector<double> bdist = detail::binomial_pmf(l, higher);
    double sold = 0.0;
    for (int b = 0; b <= l; ++b) {
      if (bdist[b] == 0.0) continue;
      const std::vector<double> ndist = detail::binomial_pmf(l - b, share);
      double expect = 0.0;
      for (int d = b + 1; d < static_cast<int>(pmf.size()); ++d) {
        if (pmf[d] == 0.0) continue;
        const int room = d - b;
        double e = 0.0;
        for (int k = 1; k <= l - b; ++k) e += ndist[k] * std::min(k, room);
        expect += pmf[d] * e;
      }
      sold += bdist[b] * expect;
    }
    total += gain * sold;
  }
  return total;
}

/// The same optimum by explicit enumeration of state-count vectors over the
/// n + 1 categories. Throws SizeError above 10^6 vectors.
inline double r_opt_enumerate(const ValidatedInstance& inst) {
  const int l = inst.l();
  const int n = inst.n();
  double vectors = 1.0;
  for (int k = 1; k <= n; ++k) vectors = vectors * (l + k) / k;
  if (vectors > 1e6) throw SizeError("r_opt_enumerate: more than 10^6 count vectors");
  std::vector<double> prob(n + 1), gain(n + 1, 0.0);
  prob[0] = 1.0 - inst.tail(1);
  for (int s = 1; s <= n; ++s) {
    prob[s] = inst.q(s);
    gain[s] = inst.margin_at(s, inst.v());
  }
  const auto& pmf = inst.demand().pmf();
  std::vector<int> count(n + 1, 0);
  double total = 0.0;
  // Fill counts for states n, n-1, ..., 1; state 0 takes the remainder.
  std::function<void(int, int)> rec = [&](int s, int left) {
    if (s == 0) {
      count[0] = left;
      double lp = std::lgamma(l + 1.0);
      for (int k = 0; k <= n; ++k) {
        lp -= std::lgamma(count[k] + 1.0);
        if (count[k] > 0) lp += count[k] * std::log(prob[k]);
      }
      const double pr = std::exp(lp);
      for (int d = 0; d < static_cast<int>(pmf.size()); ++d) {
        if (pmf[d] == 0.0) continue;
        int room = d;
        double value = 0.0;
        for (int k = n; k >= 1 && room > 0; --k) {
          const int take = std::min(room, count[k]);
          value += take * gain[k];
          room -= take;
        }
        total += pr * pmf[d] * value;
      }
      return;
    }
    for (int c = 0; c <= left; ++c) {
      count[s] = c;
      rec(s - 1, left - c);
    }
  };
  rec(n, l);
  return total;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
};

/// The collusive optimum by simulation of channel states and demand.
inline MonteCarloEstimate r_opt_monte_carlo(const ValidatedInstance& inst,
                                            std::int64_t trials, std::uint64_t seed) {
  if (trials < 2) throw ConfigError("r_opt_monte_carlo: trials must be >= 2");
  const int l = inst.l();
  const int n = inst.n();
  std::vector<double> gain(n + 1, 0.0);
  for (int s = 1; s <= n; ++s) gain[s] = inst.margin_at(s, inst.v());
  const auto& demand = inst.demand();
  double sum = 0.0, sum_sq = 0.0;
  std::vector<int> count(n + 1);
  for (std::int64_t t = 0; t < trials; ++t) {
    StreamRng rng(seed, t, 0);
    std::fill(count.begin(), count.end(), 0);
    for (int p = 0; p < l; ++p) {
      const double u = rng.uniform();
      int s = 0;
      for (int i = n; i >= 1; --i) {
        if (u < inst.tail(i)) {
          s = i;
          break;
        }
      }
      ++count[s];
    }
    int room = demand.m();
    if (!demand.is_fixed()) {
      const double u = rng.uniform();
      room = demand.max_demand();
      for (int k = 0; k < demand.max_demand(); ++k) {
        if (u < demand.at_most(k)) {
          room = k;
          break;
        }
      }
    }
    double value = 0.0;
    for (int k = n; k >= 1 && room > 0; --k) {
      const int take = std::min(room, count[k]);
      value += take * gain[k];
      room -= take;
    }
    sum += value;
    sum_sq += value * value;
  }
  MonteCarloEstimate est;
  est.trials = trials;
  est.mean = sum / trials;
  const double var = std::max(0.0, (sum_sq - sum * sum / trials) / (trials - 1));
  est.std_error = std::sqrt(var / trials);
  return est;
}

// ---------------------------------------------------------------------------
// Large-market regimes.

struct AsymptoticRegime {
  enum class Kind {
    kAllSell,    // m > (l-1) Q_{>=1}
    kMiddle,     // (l-1) Q_{>=k+1} < m < (l-1) Q_{>=k}
    kSaturated,  // m < (l-1) q_n
    kBoundary,   // m equals a threshold
  };
  Kind kind = Kind::kBoundary;
  int k = 0;                    // for kMiddle
  std::vector<double> limits;   // limiting p_i - c; empty for kBoundary

  std::string label() const {
    switch (kind) {
      case Kind::kAllSell: return "all_sell";
      case Kind::kMiddle: return "middle(" + std::to_string(k) + ")";
      case Kind::kSaturated: return "saturated";
      case Kind::kBoundary: return "boundary";
    }
    return "unknown";
  }
};

/// Places m among the thresholds (l-1) Q_{>=k}, k = 1..n. Only fixed demand
/// is classified. Equality is judged to a relative 1e-9 so that thresholds
/// such as 50 * 0.6 land on the boundary despite rounding in the tail sums.
inline AsymptoticRegime classify_regime(const ValidatedInstance& inst) {
  if (!inst.demand().is_fixed()) {
    throw ConfigError("classify_regime: only fixed demand has regimes");
  }
  const int n = inst.n();
  const double m = inst.demand().m();
  auto threshold = [&](int k) { return (inst.l() - 1) * inst.tail(k); };
  auto equal = [](double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
  };
  AsymptoticRegime reg;
  for (int k = 1; k <= n; ++k) {
    if (equal(m, threshold(k))) return reg;
  }
  const double v = inst.v();
  if (m > threshold(1)) {
    reg.kind = AsymptoticRegime::Kind::kAllSell;
    for (int i = 1; i <= n; ++i) reg.limits.push_back(inst.margin_at(i, v));
    return reg;
  }
  if (m < threshold(n)) {
    reg.kind = AsymptoticRegime::Kind::kSaturated;
    reg.limits.assign(n, 0.0);
    return reg;
  }
  int k = 1;
  while (k < n && !(m > threshold(k + 1))) ++k;
  reg.kind = AsymptoticRegime::Kind::kMiddle;
  reg.k = k;
  const double ck = inst.cost_penalty(k);
  for (int i = 1; i <= n; ++i) {
    reg.limits.push_back(i <= k ? 0.0 : inst.margin_at(i, ck));
  }
  return reg;
}

struct EfficiencyResult {
  double r_ne = 0.0;
  double r_opt = 0.0;
  double eta = 0.0;
  std::vector<double> per_state_profit;  // p_i - c
  std::optional<AsymptoticRegime> regime;  // fixed demand only
};

inline EfficiencyResult efficiency(const Equilibrium& eq) {
  const auto& inst = eq.instance();
  EfficiencyResult res;
  res.r_ne = r_ne(eq);
  res.r_opt = r_opt(inst);
  if (!(res.r_opt > 0.0)) throw DegenerateError("efficiency: collusive optimum is zero");
  res.eta = inst.l() * res.r_ne / res.r_opt;
  res.per_state_profit = eq.margins();
  if (inst.demand().is_fixed()) res.regime = classify_regime(inst);
  return res;
}

inline EfficiencyResult efficiency(const ValidatedInstance& inst) {
  return efficiency(compute_equilibrium(inst));
}

// ---------------------------------------------------------------------------
// Sweeps.

enum class SweepParameter { kM, kL, kN };

struct SweepRow {
  int value = 0;
  bool ok = false;
  std::string error;
  EfficiencyResult result;
  std::vector<double> lowers;  // L_0..L_n
};

/// Rebuilds the instance for `value` of the swept parameter. The n sweep
/// keeps the linear-rate family's r_max and r_min and spreads a total
/// availability of 0.5 evenly, q_i = 0.5 / n.
inline ValidatedInstance sweep_instance(const MarketConfig& base, const PenaltyModel& model,
                                        SweepParameter param, int value) {
  MarketConfig cfg = base;
  switch (param) {
    case SweepParameter::kM:
      cfg.demand = DemandModel::fixed(value);
      return validate(std::move(cfg), model);
    case SweepParameter::kL:
      cfg.l = value;
      return validate(std::move(cfg), model);
    case SweepParameter::kN: {
      if (model.family() != PenaltyFamily::kLinearRate) {
        throw ConfigError("n sweep needs the linear_rate penalty family");
      }
      if (value < 1) throw ConfigError("n sweep: n must be >= 1");
      cfg.q.assign(value, 0.5 / value);
      return validate(std::move(cfg),
                      PenaltyModel::linear_rate(value, model.r_max(), model.r_min()));
    }
  }
  throw ConfigError("unknown sweep parameter");
}

/// One row per value in [from, to]. Per-point failures are recorded in the
/// row rather than aborting the sweep.
inline std::vector<SweepRow> sweep(const MarketConfig& base, const PenaltyModel& model,
                                   SweepParameter param, int from, int to) {
  if (from > to) throw ConfigError("sweep: empty range");
  if (param == SweepParameter::kN && model.family() != PenaltyFamily::kLinearRate) {
    throw ConfigError("n sweep needs the linear_rate penalty family");
  }
  std::vector<SweepRow> rows;
  for (int value = from; value <= to; ++value) {
    SweepRow row;
    row.value = value;
    try {
      const Equilibrium eq = compute_equilibrium(sweep_instance(base, model, param, value));
      row.result = efficiency(eq);
      row.lowers = eq.lowers();
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace specne
