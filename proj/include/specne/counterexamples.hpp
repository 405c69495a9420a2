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

// Equilibria outside the profit-ratio ordering: a state-independent profile
// when every profit ratio is constant, an asymmetric two-primary profile,
// and a profile with reversed supports for the log/exp penalty pair.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "specne/equilibrium.hpp"
#include "specne/errors.hpp"
#include "specne/profile.hpp"
#include "specne/verification.hpp"

namespace specne {

struct Certificate {
  std::vector<SweepReport> sweeps;  // one per (primary, state) checked

  bool pass() const {
    return std::all_of(sweeps.begin(), sweeps.end(),
                       [](const SweepReport& s) { return s.pass(); });
  }
};

/// Throws ModelError unless (f_i(x) - c)/(f_j(x) - c) is constant in x for
/// every pair, to relative `tol` on `grid` points of (max_i g_i(c), v].
inline void check_constant_ratio(const ValidatedInstance& inst, int grid = 512,
                                 double tol = 1e-10) {
  const double v = inst.v();
  double lo = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= inst.n(); ++i) lo = std::max(lo, inst.cost_penalty(i));
  if (!std::isfinite(lo)) throw ModelError("constant-ratio check: g_i(c) undefined");
  for (int i = 1; i <= inst.n(); ++i) {
    for (int j = i + 1; j <= inst.n(); ++j) {
      const double ref = inst.margin_at(i, v) / inst.margin_at(j, v);
      for (int k = 1; k <= grid; ++k) {
        const double x = lo + (v - lo) * k / grid;
        const double r = inst.margin_at(i, x) / inst.margin_at(j, x);
        if (!(std::abs(r - ref) <= tol * std::abs(ref))) {
          throw ModelError("profit ratio of states " + std::to_string(i) + "," +
                           std::to_string(j) + " is not constant (x = " +
                           std::to_string(x) + ")");
        }
      }
    }
  }
}

namespace detail {

inline double sweep_floor(const ValidatedInstance& inst, int j, double fallback_low) {
  const double lo = inst.cost_penalty(j);
  if (std::isfinite(lo)) return lo;
  return fallback_low - (inst.v() - fallback_low);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Constant ratios: one law for every state.

/// Every state plays the same law psi_bar on [L_bar, v]:
///
///   pbar_i - c = (f_i(v) - c)(1 - w_1),  L_bar = g_1(pbar_1),
///   psi_bar(x) = w^{-1}(1 - (pbar_1 - c)/(f_1(x) - c)) / Q.
class AlternateNE {
 public:
  explicit AlternateNE(const ValidatedInstance& inst) : inst_(inst) {
    if (inst.all_quote_v()) throw ModelError("alternate profile needs a contested instance");
    check_constant_ratio(inst);
    const double keep = inst.kernel().complement(inst.tail(1));
    for (int i = 1; i <= inst.n(); ++i) margin_.push_back(inst.margin_at(i, inst.v()) * keep);
    lbar_ = inst.model().penalty(1, margin_[0] + inst.c());
  }

  const ValidatedInstance& instance() const { return inst_; }
  double pbar(int i) const { return margin_[i - 1] + inst_.c(); }
  double margin(int i) const { return margin_[i - 1]; }
  double lbar() const { return lbar_; }

  double cdf(double x) const {
    if (x <= lbar_) return 0.0;
    if (x >= inst_.v()) return 1.0;
    const double s = solve_keep(inst_.kernel(), margin_[0], inst_.margin_at(1, x));
    return std::clamp(s / inst_.tail(1), 0.0, 1.0);
  }

  double sample(double u) const {
    if (u <= 0.0) return lbar_;
    if (u >= 1.0) return inst_.v();
    const double keep = inst_.kernel().complement(inst_.tail(1) * u);
    const double x = inst_.model().penalty(1, margin_[0] / keep + inst_.c());
    return std::clamp(x, lbar_, inst_.v());
  }

 private:
  ValidatedInstance inst_;
  std::vector<double> margin_;
  double lbar_ = 0.0;
};

inline StrategyProfile alternate_profile(std::shared_ptr<const AlternateNE> alt) {
  std::vector<PenaltyLaw> row;
  row.emplace_back(NoOffer{});
  for (int i = 1; i <= alt->instance().n(); ++i) {
    PiecewiseCdf law;
    law.cdf = [alt](double x) { return alt->cdf(x); };
    law.sample = [alt](double u) { return alt->sample(u); };
    law.lo = alt->lbar();
    law.hi = alt->instance().v();
    row.emplace_back(std::move(law));
  }
  return StrategyProfile(alt->instance().l(), {std::move(row)});
}

inline AlternateNE build_alternate_ne(const ValidatedInstance& inst) {
  return AlternateNE(inst);
}

/// Payoff sweeps of every state against the alternate profile, evaluated
/// from the payoff definition.
inline Certificate certify_alternate(const AlternateNE& alt, int grid = 10000,
                                     double tol = 1e-9) {
  auto shared = std::make_shared<const AlternateNE>(alt);
  const StrategyProfile profile = alternate_profile(shared);
  const auto& inst = alt.instance();
  Certificate cert;
  for (int i = 1; i <= inst.n(); ++i) {
    const double lo = detail::sweep_floor(inst, i, alt.lbar());
    cert.sweeps.push_back(sweep_payoff(
        [&](double x) { return symmetric_payoff(profile, inst, i, x); }, i, alt.margin(i),
        lo, inst.v(), alt.lbar(), inst.v(), {alt.lbar()}, grid, tol));
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Two primaries, two states, one secondary: an asymmetric equilibrium.

/// Primary 1 quotes high in state 1 and low in state 2; primary 2 the
/// reverse. law(p, j) for p in {1, 2} and j in {1, 2}.
class AsymmetricNEPair {
 public:
  explicit AsymmetricNEPair(const ValidatedInstance& inst) : inst_(inst) {
    const auto& d = inst.demand();
    if (inst.n() != 2 || inst.l() != 2 || !d.is_fixed() || d.m() != 1) {
      throw PatternError("asymmetric profile needs n = 2, l = 2 and fixed m = 1");
    }
    if (inst.q(1) != inst.q(2)) throw PatternError("asymmetric profile needs q_1 = q_2");
    check_constant_ratio(inst);
    const double q1 = inst.q(1), q2 = inst.q(2), c = inst.c(), v = inst.v();
    const auto& g = inst.model();
    lhat_ = g.penalty(2, inst.margin_at(2, v) * (1.0 - q1 - q2) / (1.0 - q2) + c);
    lhat_low_ = g.penalty(1, inst.margin_at(1, lhat_) * (1.0 - q2) + c);
    if (!(lhat_low_ > inst.cost_penalty(1)) || !(lhat_low_ < lhat_)) {
      throw ModelError("asymmetric profile: lower endpoint is not above g_1(c)");
    }
    k11_ = inst.margin_at(2, v) * (1.0 - q1 - q2);
    k12_ = inst.margin_at(1, lhat_) * (1.0 - q2);
    k21_ = inst.margin_at(2, lhat_) * (1.0 - q1);
    k22_ = inst.margin_at(1, v) * (1.0 - q1 - q2);
  }

  const ValidatedInstance& instance() const { return inst_; }
  double lhat() const { return lhat_; }
  double lhat_low() const { return lhat_low_; }

  /// Flat profit of primary p in state j on its support.
  double reference(int p, int j) const {
    if (p == 1) return j == 1 ? k22_ : k21_;
    return j == 1 ? k12_ : k11_;
  }
  double support_lo(int p, int j) const { return high(p, j) ? lhat_ : lhat_low_; }
  double support_hi(int p, int j) const { return high(p, j) ? inst_.v() : lhat_; }

  double cdf(int p, int j, double x) const {
    if (x <= support_lo(p, j)) return 0.0;
    if (x >= support_hi(p, j)) return 1.0;
    const double q1 = inst_.q(1), q2 = inst_.q(2);
    double r;
    if (p == 1 && j == 1) {
      r = (1.0 - q2 - k11_ / inst_.margin_at(2, x)) / q1;
    } else if (p == 1 && j == 2) {
      r = (1.0 - k12_ / inst_.margin_at(1, x)) / q2;
    } else if (p == 2 && j == 1) {
      r = (1.0 - k21_ / inst_.margin_at(2, x)) / q1;
    } else {
      r = (1.0 - q1 - k22_ / inst_.margin_at(1, x)) / q2;
    }
    return std::clamp(r, 0.0, 1.0);
  }

  double sample(int p, int j, double u) const {
    if (u <= 0.0) return support_lo(p, j);
    if (u >= 1.0) return support_hi(p, j);
    const double q1 = inst_.q(1), q2 = inst_.q(2), c = inst_.c();
    const auto& g = inst_.model();
    double x;
    if (p == 1 && j == 1) {
      x = g.penalty(2, c + k11_ / (1.0 - q2 - q1 * u));
    } else if (p == 1 && j == 2) {
      x = g.penalty(1, c + k12_ / (1.0 - q2 * u));
    } else if (p == 2 && j == 1) {
      x = g.penalty(2, c + k21_ / (1.0 - q1 * u));
    } else {
      x = g.penalty(1, c + k22_ / (1.0 - q1 - q2 * u));
    }
    return std::clamp(x, support_lo(p, j), support_hi(p, j));
  }

 private:
  bool high(int p, int j) const { return (p == 1) == (j == 1); }

  ValidatedInstance inst_;
  double lhat_ = 0.0;
  double lhat_low_ = 0.0;
  double k11_ = 0.0, k12_ = 0.0, k21_ = 0.0, k22_ = 0.0;
};

inline StrategyProfile asymmetric_profile(std::shared_ptr<const AsymmetricNEPair> pair) {
  std::vector<std::vector<PenaltyLaw>> rows;
  for (int p = 1; p <= 2; ++p) {
    std::vector<PenaltyLaw> row;
    row.emplace_back(NoOffer{});
    for (int j = 1; j <= 2; ++j) {
      PiecewiseCdf law;
      law.cdf = [pair, p, j](double x) { return pair->cdf(p, j, x); };
      law.sample = [pair, p, j](double u) { return pair->sample(p, j, u); };
      law.lo = pair->support_lo(p, j);
      law.hi = pair->support_hi(p, j);
      row.emplace_back(std::move(law));
    }
    rows.push_back(std::move(row));
  }
  return StrategyProfile(2, std::move(rows));
}

inline AsymmetricNEPair build_asymmetric_ne(const ValidatedInstance& inst) {
  return AsymmetricNEPair(inst);
}

/// Sweeps for both primaries and both states; the opponent's laws enter
/// through the exact per-opponent payoff.
inline Certificate certify_asymmetric(const AsymmetricNEPair& pair, int grid = 10000,
                                      double tol = 1e-9) {
  auto shared = std::make_shared<const AsymmetricNEPair>(pair);
  const StrategyProfile profile = asymmetric_profile(shared);
  const auto& inst = pair.instance();
  Certificate cert;
  for (int p = 1; p <= 2; ++p) {
    for (int j = 1; j <= 2; ++j) {
      const double lo = detail::sweep_floor(inst, j, pair.lhat_low());
      cert.sweeps.push_back(sweep_payoff(
          [&](double x) { return payoff_against(profile, inst, p - 1, j, x); }, j,
          pair.reference(p, j), lo, inst.v(), pair.support_lo(p, j),
          pair.support_hi(p, j), {pair.lhat_low(), pair.lhat()}, grid, tol));
    }
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Log/exp penalties: reversed supports.

/// For g_1(x) = x, g_2(x) = log x and c = 0, state 1 plays [Lt_1, Lt_2] and
/// state 2 plays [Lt_2, v]:
///
///   pt_2 - c = (f_2(v) - c)(1 - w(q_1 + q_2)),
///   Lt_2 = g_2((pt_2 - c)/(1 - w(q_1)) + c),
///   Lt_1 = g_1((f_1(Lt_2) - c)(1 - w(q_1)) + c),
///   pt_1 - c = (f_1(Lt_2) - c)(pt_2 - c)/(f_2(Lt_2) - c).
class TildeNE {
 public:
  explicit TildeNE(const ValidatedInstance& inst) : inst_(inst) {
    if (inst.model().family() != PenaltyFamily::kLogExp || inst.c() != 0.0) {
      throw ModelError("reversed-support profile needs the log_exp family with c = 0");
    }
    if (inst.all_quote_v()) throw ModelError("reversed-support profile needs contest");
    const auto& w = inst.kernel();
    const auto& g = inst.model();
    const double c = inst.c(), v = inst.v(), q1 = inst.q(1);
    m2_ = inst.margin_at(2, v) * w.complement(inst.tail(1));
    l2_ = g.penalty(2, m2_ / w.complement(q1) + c);
    l1_ = g.penalty(1, inst.margin_at(1, l2_) * w.complement(q1) + c);
    m1_ = inst.margin_at(1, l2_) * m2_ / inst.margin_at(2, l2_);
    if (!(l1_ > 1.0)) {
      throw OrderError("reversed-support profile needs Lt_1 > 1 (got " +
                       std::to_string(l1_) + ")");
    }
    if (!(l1_ < l2_ && l2_ < v)) throw OrderError("reversed supports are not ordered");
  }

  const ValidatedInstance& instance() const { return inst_; }
  double ptilde(int i) const { return margin(i) + inst_.c(); }
  double margin(int i) const { return i == 1 ? m1_ : m2_; }
  /// Lt_1, Lt_2, Lt_3 = v.
  double ltilde(int i) const { return i == 1 ? l1_ : i == 2 ? l2_ : inst_.v(); }

  double cdf(int i, double x) const {
    const double lo = ltilde(i), hi = ltilde(i + 1);
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double s = solve_keep(inst_.kernel(), margin(i), inst_.margin_at(i, x));
    const double base = i == 1 ? 0.0 : inst_.q(1);
    return std::clamp((s - base) / inst_.q(i), 0.0, 1.0);
  }

  double sample(int i, double u) const {
    const double lo = ltilde(i), hi = ltilde(i + 1);
    if (u <= 0.0) return lo;
    if (u >= 1.0) return hi;
    const double base = i == 1 ? 0.0 : inst_.q(1);
    const double keep = inst_.kernel().complement(base + inst_.q(i) * u);
    const double x = inst_.model().penalty(i, margin(i) / keep + inst_.c());
    return std::clamp(x, lo, hi);
  }

 private:
  ValidatedInstance inst_;
  double m1_ = 0.0, m2_ = 0.0, l1_ = 0.0, l2_ = 0.0;
};

inline StrategyProfile tilde_profile(std::shared_ptr<const TildeNE> t) {
  std::vector<PenaltyLaw> row;
  row.emplace_back(NoOffer{});
  for (int i = 1; i <= 2; ++i) {
    PiecewiseCdf law;
    law.cdf = [t, i](double x) { return t->cdf(i, x); };
    law.sample = [t, i](double u) { return t->sample(i, u); };
    law.lo = t->ltilde(i);
    law.hi = t->ltilde(i + 1);
    row.emplace_back(std::move(law));
  }
  return StrategyProfile(t->instance().l(), {std::move(row)});
}

inline TildeNE build_tilde_ne(const ValidatedInstance& inst) { return TildeNE(inst); }

inline Certificate certify_tilde(const TildeNE& t, int grid = 10000, double tol = 1e-9) {
  auto shared = std::make_shared<const TildeNE>(t);
  const StrategyProfile profile = tilde_profile(shared);
  const auto& inst = t.instance();
  Certificate cert;
  for (int i = 1; i <= 2; ++i) {
    const double lo = detail::sweep_floor(inst, i, t.ltilde(1));
    cert.sweeps.push_back(sweep_payoff(
        [&](double x) { return symmetric_payoff(profile, inst, i, x); }, i, t.margin(i), lo,
        inst.v(), t.ltilde(i), t.ltilde(i + 1), {t.ltilde(1), t.ltilde(2)}, grid, tol));
  }
  return cert;
}

}  // namespace specne
