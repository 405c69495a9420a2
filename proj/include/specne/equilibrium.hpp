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

// The symmetric equilibrium: per-state profit levels, support endpoints and
// the per-state penalty distributions.
//
// Starting from L_0 = v the recursion is
//
//   p_i - c = (f_i(L_{i-1}) - c) (1 - w_i),
//   L_i     = g_i((p_i - c) / (1 - w_{i+1}) + c),
//
// with w_i = w(q_i + ... + q_n) and w_{n+1} = w(0). State i randomizes over
// [L_i, L_{i-1}] so that its expected profit is flat at p_i - c there.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "specne/errors.hpp"
#include "specne/market.hpp"

namespace specne {

class Equilibrium {
 public:
  const ValidatedInstance& instance() const { return instance_; }
  int n() const { return instance_.n(); }

  /// True for the degenerate instance where every state quotes v.
  bool all_quote_v() const { return instance_.all_quote_v(); }

  /// p_i - c, i = 1..n.
  double margin(int i) const { return margin_[i - 1]; }
  double profit(int i) const { return margin_[i - 1] + instance_.c(); }
  /// L_i, i = 0..n.
  double lower(int i) const { return lower_[i]; }
  /// w_i, i = 1..n+1.
  double tail_mass(int i) const { return tail_mass_[i - 1]; }
  /// 1 - w_i, summed directly.
  double tail_mass_complement(int i) const { return tail_keep_[i - 1]; }

  const std::vector<double>& margins() const { return margin_; }
  const std::vector<double>& lowers() const { return lower_; }
  const std::vector<double>& tail_masses() const { return tail_mass_; }
  std::vector<double> profits() const {
    std::vector<double> p = margin_;
    for (double& x : p) x += instance_.c();
    return p;
  }

  const AssumptionReport& assumption() const { return assumption_; }
  bool assumption_warning() const {
    return !all_quote_v() && assumption_.status != AssumptionReport::Status::kHolds;
  }

  /// False when the recursion produced touching or inverted supports.
  bool ordered() const {
    for (int i = 1; i <= n(); ++i) {
      if (!(lower_[i] < lower_[i - 1])) return false;
    }
    return true;
  }

 private:
  friend Equilibrium compute_equilibrium(const ValidatedInstance& inst,
                                         int assumption_grid);

  explicit Equilibrium(ValidatedInstance inst) : instance_(std::move(inst)) {}

  ValidatedInstance instance_;
  std::vector<double> margin_;
  std::vector<double> lower_;
  std::vector<double> tail_mass_;
  std::vector<double> tail_keep_;
  AssumptionReport assumption_;
};

/// Runs the recursion from L_0 = v downward. Instances where demand never
/// binds get the point-mass-at-v solution with margins (f_i(v) - c)(1 - w(0)).
/// When the profit-ratio check fails the numbers are still returned, with
/// assumption_warning() set; they need not form an equilibrium then.
inline Equilibrium compute_equilibrium(const ValidatedInstance& inst,
                                       int assumption_grid = 512) {
  Equilibrium eq(inst);
  const int n = inst.n();
  const auto& w = inst.kernel();
  eq.tail_mass_.resize(n + 1);
  eq.tail_keep_.resize(n + 1);
  for (int i = 1; i <= n + 1; ++i) {
    eq.tail_mass_[i - 1] = w(inst.tail(i));
    eq.tail_keep_[i - 1] = w.complement(inst.tail(i));
  }
  eq.margin_.resize(n);
  eq.lower_.assign(n + 1, inst.v());

  if (inst.all_quote_v()) {
    const double keep = eq.tail_keep_[n];
    for (int i = 1; i <= n; ++i) eq.margin_[i - 1] = inst.margin_at(i, inst.v()) * keep;
    return eq;
  }

  eq.assumption_ = check_ratio_ordering(inst, assumption_grid);
  try {
    for (int i = 1; i <= n; ++i) {
      const double m = inst.margin_at(i, eq.lower_[i - 1]) * eq.tail_keep_[i - 1];
      eq.margin_[i - 1] = m;
      const double next = eq.tail_keep_[i];
      eq.lower_[i] = inst.model().penalty(i, m / next + inst.c());
    }
  } catch (const DomainError& e) {
    throw NumericError(std::string("equilibrium recursion left the penalty domain: ") +
                       e.what());
  }
  for (int i = 1; i <= n; ++i) {
    if (!(eq.margin_[i - 1] > 0.0) || !std::isfinite(eq.lower_[i])) {
      throw NumericError("equilibrium recursion produced a non-positive margin or "
                         "non-finite endpoint at state " + std::to_string(i));
    }
  }
  return eq;
}

/// The s with 1 - w(s) = flat / total, for 0 < flat <= total. Whichever of
/// w and 1 - w is smaller is inverted so tiny kernel values keep their
/// relative accuracy.
inline double solve_keep(const CompetitionKernel& w, double flat, double total) {
  const double keep = flat / total;
  const double lose = (total - flat) / total;
  return lose < keep ? w.invert(lose) : w.invert_complement(keep);
}

/// psi_i(x): probability that a state-i primary quotes at most x.
///
/// Zero at and below L_i, one at and above L_{i-1}. Inside the support it
/// solves 1 - w(Q_{>i} + q_i psi) = (p_i - c) / (f_i(x) - c).
inline double cdf_eval(const Equilibrium& eq, int i, double x) {
  const auto& inst = eq.instance();
  if (i < 1 || i > inst.n()) throw DomainError("cdf_eval: state out of range");
  if (eq.all_quote_v()) return x >= inst.v() ? 1.0 : 0.0;
  if (x <= eq.lower(i)) return 0.0;
  if (x >= eq.lower(i - 1)) return 1.0;
  const double s = solve_keep(inst.kernel(), eq.margin(i), inst.margin_at(i, x));
  return std::clamp((s - inst.above(i)) / inst.q(i), 0.0, 1.0);
}

/// Inverse of psi_i: the penalty quoted at quantile u in [0, 1].
inline double sample_penalty(const Equilibrium& eq, int i, double u) {
  const auto& inst = eq.instance();
  if (i < 1 || i > inst.n()) throw DomainError("sample_penalty: state out of range");
  if (eq.all_quote_v()) return inst.v();
  if (u <= 0.0) return eq.lower(i);
  if (u >= 1.0) return eq.lower(i - 1);
  const double s = inst.above(i) + inst.q(i) * u;
  const double keep = inst.kernel().complement(s);
  const double x = inst.model().penalty(i, eq.margin(i) / keep + inst.c());
  return std::clamp(x, eq.lower(i), eq.lower(i - 1));
}

/// Expected profit phi_j(x) of a state-j primary quoting x while every other
/// primary follows the equilibrium, in closed form: on [L_k, L_{k-1}] the
/// kernel term cancels against state k's flat profit, giving
/// (p_k - c)(f_j(x) - c)/(f_k(x) - c).
inline double analytic_payoff(const Equilibrium& eq, int j, double x) {
  const auto& inst = eq.instance();
  if (j < 1 || j > inst.n()) throw DomainError("analytic_payoff: state out of range");
  if (x > inst.v()) return 0.0;
  const double own = inst.margin_at(j, x);
  if (eq.all_quote_v()) return own * inst.kernel().complement(0.0);
  const int n = inst.n();
  if (x < eq.lower(n)) return own * inst.kernel().complement(0.0);
  for (int k = n; k >= 1; --k) {
    if (x <= eq.lower(k - 1)) {
      if (k == j) return eq.margin(j);
      return eq.margin(k) * own / inst.margin_at(k, x);
    }
  }
  return eq.margin(1) * own / inst.margin_at(1, x);
}

/// The same payoff evaluated from its definition,
/// (f_j(x) - c)(1 - w(sum_k q_k psi_k(x))), through the CDFs and the kernel.
inline double payoff_by_definition(const Equilibrium& eq, int j, double x) {
  const auto& inst = eq.instance();
  if (x > inst.v()) return 0.0;
  const double own = inst.margin_at(j, x);
  if (eq.all_quote_v()) return own * inst.kernel().complement(0.0);
  double below = 0.0;
  for (int k = 1; k <= inst.n(); ++k) below += inst.q(k) * cdf_eval(eq, k, x);
  return own * inst.kernel().complement(std::min(below, 1.0));
}

}  // namespace specne
