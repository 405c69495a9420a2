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

// Repeated play with Nash reversion. In the cooperative phase a state-i
// primary quotes v - eps_i; after any observed deviation everyone reverts to
// the one-shot equilibrium forever. The schedule must satisfy
//
//   0 = eps_1 < eps_2 < ... < eps_n,
//   eps_i <= v - L_{i-1},
//   eps_i <= v - g_i((f_i(v) - c)(1 - w_i) + c).

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "specne/efficiency.hpp"
#include "specne/equilibrium.hpp"
#include "specne/errors.hpp"
#include "specne/profile.hpp"
#include "specne/verification.hpp"

namespace specne {

struct EpsilonSchedule {
  std::vector<double> eps;  // eps_1..eps_n

  double at(int i) const { return eps[i - 1]; }
};

/// Largest admissible eps_i from the two upper bounds.
inline double epsilon_bound(const Equilibrium& eq, int i) {
  const auto& inst = eq.instance();
  const double v = inst.v();
  const double undercut =
      inst.model().penalty(i, inst.margin_at(i, v) * eq.tail_mass_complement(i) + inst.c());
  return std::min(v - eq.lower(i - 1), v - undercut);
}

/// Throws ScheduleError naming the first violated condition.
inline void validate_schedule(const Equilibrium& eq, const EpsilonSchedule& s) {
  const int n = eq.n();
  if (static_cast<int>(s.eps.size()) != n) {
    throw ScheduleError("epsilon schedule needs " + std::to_string(n) + " entries");
  }
  if (s.eps[0] != 0.0) throw ScheduleError("eps_1 must be 0");
  for (int i = 2; i <= n; ++i) {
    if (!(s.at(i) > s.at(i - 1))) {
      throw ScheduleError("eps must be strictly increasing (eps_" + std::to_string(i) + ")");
    }
    if (!eq.all_quote_v() && s.at(i) > epsilon_bound(eq, i)) {
      throw ScheduleError("eps_" + std::to_string(i) + " exceeds its upper bound " +
                          std::to_string(epsilon_bound(eq, i)));
    }
  }
}

/// eps_i = safety * B * (i - 1) / (n - 1) with B the smallest bound over
/// i >= 2, which keeps every entry under its own bound and strictly
/// increasing.
inline EpsilonSchedule auto_epsilon(const Equilibrium& eq, double safety) {
  const int n = eq.n();
  EpsilonSchedule s;
  s.eps.assign(n, 0.0);
  if (n == 1) return s;
  if (!(safety > 0.0 && safety < 1.0)) {
    throw ScheduleError("auto_epsilon: safety must lie in (0, 1)");
  }
  double bound = std::numeric_limits<double>::infinity();
  for (int i = 2; i <= n; ++i) bound = std::min(bound, epsilon_bound(eq, i));
  if (!(bound > 0.0)) {
    throw ScheduleError("auto_epsilon: the bounds leave no room for a strictly "
                        "increasing schedule");
  }
  for (int i = 2; i <= n; ++i) s.eps[i - 1] = safety * bound * (i - 1) / (n - 1);
  validate_schedule(eq, s);
  return s;
}

/// Pr(a state-i primary wins through a tie) under cooperation: with B
/// opponents in higher states (strictly lower quotes) and T in state i, it
/// wins with probability (M - B)/(T + 1) when B < M <= B + T. Summed exactly
/// over (B, T) in ascending order with Neumaier compensation.
inline double beta(const ValidatedInstance& inst, int i) {
  const int others = inst.l() - 1;
  const double a = inst.above(i);
  const double t = inst.q(i);
  const auto& pmf = inst.demand().pmf();
  double sum = 0.0, comp = 0.0;
  auto add = [&](double x) {
    const double y = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - y) + x;
    } else {
      comp += (x - y) + sum;
    }
    sum = y;
  };
  for (int b = 0; b <= others; ++b) {
    for (int tc = 0; b + tc <= others; ++tc) {
      double weight = 0.0;
      for (int d = b + 1; d <= b + tc && d < static_cast<int>(pmf.size()); ++d) {
        weight += pmf[d] * double(d - b) / (tc + 1);
      }
      if (weight == 0.0) continue;
      add(detail::trinomial(others, b, tc, a, t) * weight);
    }
  }
  return sum + comp;
}

struct RepeatedGameResult {
  std::vector<double> beta;                   // beta_1..beta_n
  std::vector<double> coop_margin;            // A_i = f_i(v - eps_i) - c
  std::vector<double> per_state_coop_profit;  // A_i (1 - w_i + beta_i)
  double r_sne = 0.0;                         // sum_j q_j A_j (1 - w_j + beta_j)
  double r_ne_bound = 0.0;                    // sum_j q_j A_j (1 - w_j)
  double delta_min = 0.0;
  int binding_state = 0;
};

/// beta, the cooperative revenue and the discount threshold
///
///   delta_min = max_i A_i (w_i - beta_i) /
///               [A_i (w_i - beta_i) + sum_j q_j A_j beta_j].
///
/// The cooperative revenue subtracts the transaction cost from every sale.
inline RepeatedGameResult repeated_game(const Equilibrium& eq, const EpsilonSchedule& s) {
  validate_schedule(eq, s);
  const auto& inst = eq.instance();
  const int n = inst.n();
  RepeatedGameResult res;
  for (int i = 1; i <= n; ++i) {
    res.beta.push_back(beta(inst, i));
    res.coop_margin.push_back(inst.margin_at(i, inst.v() - s.at(i)));
  }
  double tie_pool = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double a = res.coop_margin[j - 1];
    const double keep = eq.tail_mass_complement(j);
    res.per_state_coop_profit.push_back(a * (keep + res.beta[j - 1]));
    res.r_sne += inst.q(j) * a * (keep + res.beta[j - 1]);
    res.r_ne_bound += inst.q(j) * a * keep;
    tie_pool += inst.q(j) * a * res.beta[j - 1];
  }
  for (int i = 1; i <= n; ++i) {
    const double num = res.coop_margin[i - 1] * (eq.tail_mass(i) - res.beta[i - 1]);
    const double d = num > 0.0 ? num / (num + tie_pool) : 0.0;
    if (i == 1 || d > res.delta_min) {
      res.delta_min = d;
      res.binding_state = i;
    }
  }
  return res;
}

struct SpneStateCheck {
  int state = 0;
  double cooperate = 0.0;    // (1-d) A_i (1 - w_i + beta_i) + d R_SNE
  double deviate_down = 0.0; // (1-d) A_i + d R_bound
  double deviate_up = 0.0;   // (1-d)(f_i(v) - c)(1 - w_i) + d R_bound
  double margin = 0.0;       // cooperate - max(deviations)
  double margin_exact = 0.0; // same with the exact R_NE continuation
};

struct SpneReport {
  double delta = 0.0;
  double delta_min = 0.0;
  double r_ne = 0.0;
  std::vector<SpneStateCheck> states;
  std::vector<SweepReport> reversion;  // one-shot equilibrium after reversion
  bool pass = false;
};

/// One-shot deviation check of the reversion profile at discount `delta`.
///
/// A downward deviation wins at most every sale, worth at most A_i; an upward
/// one wins at most with probability 1 - w_i at price at most f_i(v). The
/// continuation after a deviation is the one-shot equilibrium, whose value is
/// bounded by R_bound = sum_j q_j A_j (1 - w_j). Passing is judged with that
/// bound, which puts the pass/fail boundary exactly at delta_min; margins
/// with the exact R_NE are reported alongside. The reversion phase is
/// certified by best-response sweeps.
inline SpneReport spne_check(const Equilibrium& eq, const EpsilonSchedule& s, double delta,
                             int grid = 1000, double tol = 1e-9) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("spne_check: delta must lie in (0, 1)");
  const RepeatedGameResult rg = repeated_game(eq, s);
  const auto& inst = eq.instance();
  SpneReport rep;
  rep.delta = delta;
  rep.delta_min = rg.delta_min;
  rep.r_ne = r_ne(eq);
  bool ok = true;
  for (int i = 1; i <= inst.n(); ++i) {
    SpneStateCheck st;
    st.state = i;
    const double a = rg.coop_margin[i - 1];
    const double keep = eq.tail_mass_complement(i);
    st.cooperate = (1.0 - delta) * a * (keep + rg.beta[i - 1]) + delta * rg.r_sne;
    const double down = (1.0 - delta) * a;
    const double up = (1.0 - delta) * inst.margin_at(i, inst.v()) * keep;
    st.deviate_down = down + delta * rg.r_ne_bound;
    st.deviate_up = up + delta * rg.r_ne_bound;
    st.margin = st.cooperate - std::max(st.deviate_down, st.deviate_up);
    st.margin_exact = st.cooperate - std::max(down, up) - delta * rep.r_ne;
    ok = ok && st.margin >= 0.0;
    rep.states.push_back(st);
  }
  bool reversion_ok = true;
  if (!eq.all_quote_v()) {
    for (int j = 1; j <= inst.n(); ++j) {
      rep.reversion.push_back(best_response_sweep(eq, j, std::max(grid, 100), tol));
      reversion_ok = reversion_ok && rep.reversion.back().pass();
    }
  }
  rep.pass = ok && reversion_ok;
  return rep;
}

/// The cooperative profile: every state quotes v - eps_i with certainty.
inline StrategyProfile cooperative_profile(const ValidatedInstance& inst,
                                           const EpsilonSchedule& s) {
  std::vector<PenaltyLaw> row;
  row.emplace_back(NoOffer{});
  for (int i = 1; i <= inst.n(); ++i) row.emplace_back(PointMass{inst.v() - s.at(i)});
  return StrategyProfile(inst.l(), {std::move(row)});
}

}  // namespace specne
