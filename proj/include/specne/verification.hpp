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

// Checking that a strategy profile is an equilibrium: payoff sweeps, a
// market simulator with symmetric tie-breaking, deviation tests and an exact
// discretized best-response oracle for tiny games.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "specne/equilibrium.hpp"
#include "specne/errors.hpp"
#include "specne/profile.hpp"
#include "specne/rng.hpp"

namespace specne {

namespace detail {

/// Pr(win) for a quote with `below` competitors strictly under it and
/// `tied` competitors at the same penalty, averaged over demand. Tied
/// quotes split the remaining slots uniformly.
inline double tie_win(const DemandModel& demand, int below, int tied) {
  double total = 0.0;
  const auto& pmf = demand.pmf();
  for (int k = below + 1; k < static_cast<int>(pmf.size()); ++k) {
    if (pmf[k] == 0.0) continue;
    total += pmf[k] * std::min(1.0, double(k - below) / (tied + 1));
  }
  return total;
}

inline double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// Multinomial(trials; a, t, 1 - a - t) mass at (b, t_count, rest).
inline double trinomial(int trials, int b, int tc, double a, double t) {
  const double r = std::max(0.0, 1.0 - a - t);
  const int rest = trials - b - tc;
  auto term = [](int k, double p) -> double {
    if (k == 0) return 0.0;
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    return k * std::log(p);
  };
  const double lt = log_choose(trials, b) + log_choose(trials - b, tc) + term(b, a) +
                    term(tc, t) + term(rest, r);
  return std::isfinite(lt) ? std::exp(lt) : 0.0;
}

inline double lowest_sweep_penalty(const Equilibrium& eq, int j) {
  const double lo = eq.instance().cost_penalty(j);
  if (std::isfinite(lo)) return lo;
  const double ln = eq.lower(eq.n());
  return ln - (eq.instance().v() - ln);
}

}  // namespace detail

/// Expected profit of a state-j primary quoting x against l-1 opponents that
/// all follow the symmetric `profile`, ties included.
inline double symmetric_payoff(const StrategyProfile& profile,
                               const ValidatedInstance& inst, int j, double x) {
  if (x > inst.v()) return 0.0;
  const int n = inst.n();
  double below = (1.0 - inst.tail(1)) * prob_below(profile.law(1, 0), x);
  double tie = (1.0 - inst.tail(1)) * prob_tie(profile.law(1, 0), x);
  for (int s = 1; s <= n; ++s) {
    below += inst.q(s) * prob_below(profile.law(1, s), x);
    tie += inst.q(s) * prob_tie(profile.law(1, s), x);
  }
  below = std::clamp(below, 0.0, 1.0);
  const double own = inst.margin_at(j, x);
  if (tie == 0.0) return own * inst.kernel().complement(below);
  const int others = inst.l() - 1;
  double win = 0.0;
  for (int b = 0; b <= others; ++b) {
    for (int t = 0; b + t <= others; ++t) {
      const double pr = detail::trinomial(others, b, t, below, tie);
      if (pr == 0.0) continue;
      win += pr * detail::tie_win(inst.demand(), b, t);
    }
  }
  return own * win;
}

/// Expected profit of `primary` in state j quoting x against the other
/// primaries' own laws in `profile` (which may be asymmetric).
inline double payoff_against(const StrategyProfile& profile, const ValidatedInstance& inst,
                             int primary, int j, double x) {
  if (x > inst.v()) return 0.0;
  const int l = inst.l();
  const int n = inst.n();
  // dist[b][t]: probability that b opponents are below x and t tie with it.
  std::vector<std::vector<double>> dist(l, std::vector<double>(l, 0.0));
  dist[0][0] = 1.0;
  int seen = 0;
  for (int r = 0; r < l; ++r) {
    if (r == primary) continue;
    double below = (1.0 - inst.tail(1)) * prob_below(profile.law(r, 0), x);
    double tie = (1.0 - inst.tail(1)) * prob_tie(profile.law(r, 0), x);
    for (int s = 1; s <= n; ++s) {
      below += inst.q(s) * prob_below(profile.law(r, s), x);
      tie += inst.q(s) * prob_tie(profile.law(r, s), x);
    }
    const double above = std::max(0.0, 1.0 - below - tie);
    std::vector<std::vector<double>> next(l, std::vector<double>(l, 0.0));
    for (int b = 0; b <= seen; ++b) {
      for (int t = 0; b + t <= seen; ++t) {
        const double p = dist[b][t];
        if (p == 0.0) continue;
        next[b + 1][t] += p * below;
        next[b][t + 1] += p * tie;
        next[b][t] += p * above;
      }
    }
    dist.swap(next);
    ++seen;
  }
  double win = 0.0;
  for (int b = 0; b <= seen; ++b) {
    for (int t = 0; b + t <= seen; ++t) {
      if (dist[b][t] != 0.0) win += dist[b][t] * detail::tie_win(inst.demand(), b, t);
    }
  }
  return inst.margin_at(j, x) * win;
}

// ---------------------------------------------------------------------------
// Payoff sweeps.

struct SweepReport {
  int state = 0;
  double reference = 0.0;   // p_j - c
  double max_payoff = 0.0;
  double gap = 0.0;         // max_payoff - reference
  double flat_error = 0.0;  // max |payoff - reference| on the support
  std::vector<double> argmax;  // first few maximizers
  int argmax_count = 0;
  double argmax_lo = 0.0;
  double argmax_hi = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double support_lo = 0.0;
  double support_hi = 0.0;
  int points = 0;
  double tol = 0.0;

  bool dominated() const { return gap <= tol; }
  bool flat() const { return flat_error <= tol; }
  bool pass() const { return dominated() && flat(); }
};

/// Evaluates `payoff` on `grid` evenly spaced points of [lo, hi] plus
/// `extra` nodes, and compares against `reference`.
inline SweepReport sweep_payoff(const std::function<double(double)>& payoff, int state,
                                double reference, double lo, double hi,
                                double support_lo, double support_hi,
                                std::vector<double> extra, int grid, double tol) {
  if (grid < 2) throw ConfigError("sweep: grid must be >= 2");
  std::vector<double> nodes;
  nodes.reserve(grid + extra.size());
  for (int k = 0; k < grid; ++k) {
    nodes.push_back(k == grid - 1 ? hi : lo + (hi - lo) * k / (grid - 1));
  }
  for (double x : extra) {
    if (x >= lo && x <= hi) nodes.push_back(x);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  SweepReport rep;
  rep.state = state;
  rep.reference = reference;
  rep.lo = lo;
  rep.hi = hi;
  rep.support_lo = support_lo;
  rep.support_hi = support_hi;
  rep.points = static_cast<int>(nodes.size());
  rep.tol = tol;
  std::vector<double> values(nodes.size());
  rep.max_payoff = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    values[k] = payoff(nodes[k]);
    rep.max_payoff = std::max(rep.max_payoff, values[k]);
    if (nodes[k] >= support_lo && nodes[k] <= support_hi) {
      rep.flat_error = std::max(rep.flat_error, std::abs(values[k] - reference));
    }
  }
  rep.gap = rep.max_payoff - reference;
  constexpr std::size_t kArgmaxShown = 16;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (values[k] < rep.max_payoff - tol) continue;
    if (rep.argmax_count == 0) rep.argmax_lo = nodes[k];
    rep.argmax_hi = nodes[k];
    ++rep.argmax_count;
    if (rep.argmax.size() < kArgmaxShown) rep.argmax.push_back(nodes[k]);
  }
  return rep;
}

/// Sweep of the closed-form payoff of state j over (g_j(c), v], with extra
/// nodes at every L_i and just above g_j(c).
inline SweepReport best_response_sweep(const Equilibrium& eq, int j, int grid = 10000,
                                       double tol = 1e-9) {
  if (grid < 100) throw ConfigError("best_response_sweep: grid must be >= 100");
  const auto& inst = eq.instance();
  const double lo = detail::lowest_sweep_penalty(eq, j);
  std::vector<double> extra(eq.lowers().begin(), eq.lowers().end());
  extra.push_back(std::nextafter(lo, std::numeric_limits<double>::infinity()));
  const double s_lo = eq.all_quote_v() ? inst.v() : eq.lower(j);
  const double s_hi = eq.all_quote_v() ? inst.v() : eq.lower(j - 1);
  return sweep_payoff([&](double x) { return analytic_payoff(eq, j, x); }, j,
                      eq.margin(j), lo, inst.v(), s_lo, s_hi, std::move(extra), grid,
                      tol);
}

// ---------------------------------------------------------------------------
// Market simulation.

struct MarketOutcome {
  int demand = 0;
  std::vector<int> states;          // 0..n per primary
  std::vector<double> penalties;    // +inf when not offered
  std::vector<int> sold;            // winning primaries
  std::vector<double> revenue;      // f_state(x) - c if sold, else 0
};

/// Winners among quotes <= v: the min(Y, demand) lowest, ties ordered by
/// `tie_keys` (uniform random keys give a uniform tie permutation).
inline std::vector<int> allocate(const std::vector<double>& penalties, int demand,
                                 double v, const std::vector<std::uint64_t>& tie_keys) {
  std::vector<int> offers;
  for (int p = 0; p < static_cast<int>(penalties.size()); ++p) {
    if (penalties[p] <= v) offers.push_back(p);
  }
  std::sort(offers.begin(), offers.end(), [&](int a, int b) {
    if (penalties[a] != penalties[b]) return penalties[a] < penalties[b];
    return tie_keys[a] < tie_keys[b];
  });
  if (static_cast<int>(offers.size()) > demand) offers.resize(std::max(demand, 0));
  return offers;
}

inline int draw_state(const ValidatedInstance& inst, double u) {
  for (int i = inst.n(); i >= 1; --i) {
    if (u < inst.tail(i)) return i;
  }
  return 0;
}

inline int draw_demand(const DemandModel& demand, double u) {
  if (demand.is_fixed()) return demand.m();
  for (int k = 0; k < demand.max_demand(); ++k) {
    if (u < demand.at_most(k)) return k;
  }
  return demand.max_demand();
}

/// One slot of the market. Primary p draws from stream (seed, trial, p);
/// demand uses stream l and tie keys stream l + 1. `forced_state`, when set,
/// overrides primary 0's state.
inline MarketOutcome play_market(const StrategyProfile& profile,
                                 const ValidatedInstance& inst, std::uint64_t seed,
                                 std::uint64_t trial,
                                 std::optional<int> forced_state = std::nullopt) {
  const int l = inst.l();
  MarketOutcome out;
  out.states.resize(l);
  out.penalties.resize(l);
  out.revenue.assign(l, 0.0);
  for (int p = 0; p < l; ++p) {
    StreamRng rng(seed, trial, p);
    int s = draw_state(inst, rng.uniform());
    if (p == 0 && forced_state) s = *forced_state;
    out.states[p] = s;
    out.penalties[p] = draw_penalty(profile.law(p, s), rng.uniform());
  }
  StreamRng demand_rng(seed, trial, l);
  out.demand = draw_demand(inst.demand(), demand_rng.uniform());
  StreamRng tie_rng(seed, trial, l + 1);
  std::vector<std::uint64_t> keys(l);
  for (auto& k : keys) k = tie_rng.next();
  out.sold = allocate(out.penalties, out.demand, inst.v(), keys);
  for (int p : out.sold) {
    out.revenue[p] = inst.margin_at(out.states[p], out.penalties[p]);
  }
  return out;
}

/// Ratio estimate sum(S_t) / sum(N_t) with a delta-method standard error,
/// built from associative per-trial moment sums.
struct RatioAccumulator {
  double s = 0.0, n = 0.0, ss = 0.0, nn = 0.0, sn = 0.0;
  std::int64_t trials = 0;

  void add(double st, double nt) {
    s += st;
    n += nt;
    ss += st * st;
    nn += nt * nt;
    sn += st * nt;
    ++trials;
  }
  void merge(const RatioAccumulator& o) {
    s += o.s;
    n += o.n;
    ss += o.ss;
    nn += o.nn;
    sn += o.sn;
    trials += o.trials;
  }
  double mean() const { return n > 0.0 ? s / n : 0.0; }
  double std_error() const {
    if (n <= 0.0 || trials < 2) return 0.0;
    const double r = mean();
    const double resid = std::max(0.0, ss - 2.0 * r * sn + r * r * nn);
    const double nbar = n / trials;
    return std::sqrt(resid / (double(trials) * (trials - 1))) / nbar;
  }
};

struct StateEstimate {
  int state = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double observations = 0.0;
};

struct SimulationReport {
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<StateEstimate> pooled;  // all primaries, by state 1..n
  std::vector<StateEstimate> focus;   // primary 0 only, by state 1..n
  double mean_total_revenue = 0.0;    // per slot, all primaries
  double total_revenue_stderr = 0.0;
};

struct SimulationOptions {
  std::optional<int> forced_state;  // pin primary 0's state
  int workers = 1;
  std::int64_t block = 4096;        // trials per aggregation block
};

/// Monte Carlo over `trials` independent slots. Blocks of trials are summed
/// sequentially and blocks are merged in order, so the report is identical
/// for any worker count.
inline SimulationReport simulate_markets(const StrategyProfile& profile,
                                         const ValidatedInstance& inst,
                                         std::int64_t trials, std::uint64_t seed,
                                         const SimulationOptions& opts = {}) {
  if (trials < 1) throw ConfigError("simulate_markets: trials must be >= 1");
  const int n = inst.n();
  struct Block {
    std::vector<RatioAccumulator> pooled, focus;
    RatioAccumulator total;
  };
  const std::int64_t block = std::max<std::int64_t>(1, opts.block);
  const std::int64_t blocks = (trials + block - 1) / block;
  std::vector<Block> parts(blocks);
  auto run_block = [&](std::int64_t b) {
    Block& out = parts[b];
    out.pooled.assign(n + 1, {});
    out.focus.assign(n + 1, {});
    std::vector<double> s(n + 1), cnt(n + 1);
    const std::int64_t end = std::min(trials, (b + 1) * block);
    for (std::int64_t t = b * block; t < end; ++t) {
      MarketOutcome o = play_market(profile, inst, seed, t, opts.forced_state);
      std::fill(s.begin(), s.end(), 0.0);
      std::fill(cnt.begin(), cnt.end(), 0.0);
      double total = 0.0;
      for (int p = 0; p < inst.l(); ++p) {
        s[o.states[p]] += o.revenue[p];
        cnt[o.states[p]] += 1.0;
        total += o.revenue[p];
      }
      for (int i = 1; i <= n; ++i) {
        out.pooled[i].add(s[i], cnt[i]);
        out.focus[i].add(o.states[0] == i ? o.revenue[0] : 0.0,
                         o.states[0] == i ? 1.0 : 0.0);
      }
      out.total.add(total, 1.0);
    }
  };
  const int workers = std::max(1, opts.workers);
  if (workers == 1 || blocks == 1) {
    for (std::int64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::int64_t b = w; b < blocks; b += workers) run_block(b);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<RatioAccumulator> pooled(n + 1), focus(n + 1);
  RatioAccumulator total;
  for (const Block& part : parts) {
    for (int i = 1; i <= n; ++i) {
      pooled[i].merge(part.pooled[i]);
      focus[i].merge(part.focus[i]);
    }
    total.merge(part.total);
  }
  SimulationReport rep;
  rep.trials = trials;
  rep.seed = seed;
  for (int i = 1; i <= n; ++i) {
    rep.pooled.push_back({i, pooled[i].mean(), pooled[i].std_error(), pooled[i].n});
    rep.focus.push_back({i, focus[i].mean(), focus[i].std_error(), focus[i].n});
  }
  rep.mean_total_revenue = total.mean();
  rep.total_revenue_stderr = total.std_error();
  return rep;
}

// ---------------------------------------------------------------------------
// Unilateral deviations.

struct DeviationReport {
  int state = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
  double reference = 0.0;  // p_j - c
  double gap = 0.0;        // mean - reference
  std::optional<double> analytic;  // exact payoff for point-mass deviations
  double tol = 1e-9;

  double analytic_gain() const { return analytic ? *analytic - reference : gap; }
  /// No profitable deviation: exact gain within tol when available, else the
  /// lower 3-sigma bound of the simulated gain is not positive.
  bool pass() const {
    if (analytic) return *analytic - reference <= tol;
    return gap - 3.0 * std_error <= 0.0;
  }
};

/// Primary 0 is pinned to state j and plays `deviation` there while every
/// other primary follows the equilibrium.
inline DeviationReport deviation_test(const Equilibrium& eq, int j, PenaltyLaw deviation,
                                      std::int64_t trials, std::uint64_t seed,
                                      double tol = 1e-9, int workers = 1) {
  const auto& inst = eq.instance();
  if (j < 1 || j > inst.n()) throw DomainError("deviation_test: state out of range");
  StrategyProfile profile = strategy_profile(eq);
  DeviationReport rep;
  rep.state = j;
  rep.reference = eq.margin(j);
  rep.tol = tol;
  if (const auto* pm = std::get_if<PointMass>(&deviation)) {
    rep.analytic = pm->x > inst.v() ? 0.0 : analytic_payoff(eq, j, pm->x);
  } else if (std::holds_alternative<NoOffer>(deviation)) {
    rep.analytic = 0.0;
  }
  profile.set_law(0, j, std::move(deviation));
  SimulationOptions opts;
  opts.forced_state = j;
  opts.workers = workers;
  const SimulationReport sim = simulate_markets(profile, inst, trials, seed, opts);
  const StateEstimate& est = sim.focus[j - 1];
  rep.mean = est.mean;
  rep.std_error = est.std_error;
  rep.trials = trials;
  rep.gap = rep.mean - rep.reference;
  return rep;
}

// ---------------------------------------------------------------------------
// Exhaustive discretized oracle.

struct OracleState {
  int state = 0;
  double reference = 0.0;
  double max_uniform = 0.0;   // best grid payoff, uniform ties
  double argmax = 0.0;
  double max_lower = 0.0;     // best grid payoff when every tie is lost
  double max_slack = 0.0;
  double worst_excess = 0.0;  // max over grid of uniform - reference - slack
  bool detected = false;      // some grid quote beats the reference outright
  bool certified = false;
};

struct OracleReport {
  int grid = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<OracleState> states;

  bool certified() const {
    return std::all_of(states.begin(), states.end(),
                       [](const OracleState& s) { return s.certified; });
  }
  bool deviation_detected() const {
    return std::any_of(states.begin(), states.end(),
                       [](const OracleState& s) { return s.detected; });
  }
};

/// Every quote is rounded up to a uniform grid on [lo, v]. For each grid
/// quote of the deviator, every opponent falls in one of three classes
/// (strictly below, same grid point, above); all 3^(l-1) class vectors are
/// enumerated explicitly. Bracketing the true payoff between "lose every tie"
/// and "win every tie" gives the per-point slack.
inline OracleReport brute_force_oracle(const Equilibrium& eq, int grid,
                                       double tol = 1e-9) {
  const auto& inst = eq.instance();
  if (inst.l() > 4 || inst.n() > 3 || grid > 500) {
    throw SizeError("brute_force_oracle: limits are l <= 4, n <= 3, grid <= 500");
  }
  if (grid < 2) throw ConfigError("brute_force_oracle: grid must be >= 2");
  const int n = inst.n();
  const int others = inst.l() - 1;
  const StrategyProfile profile = strategy_profile(eq);

  double lo = inst.v();
  for (int j = 1; j <= n; ++j) lo = std::min(lo, detail::lowest_sweep_penalty(eq, j));
  const double hi = inst.v();
  std::vector<double> xs(grid);
  for (int k = 0; k < grid; ++k) xs[k] = k == grid - 1 ? hi : lo + (hi - lo) * k / (grid - 1);

  // Opponent CDF F(x) = Pr(quote <= x).
  auto opp_cdf = [&](double x) {
    double f = 0.0;
    for (int s = 1; s <= n; ++s) f += inst.q(s) * prob_at_most(profile.law(1, s), x);
    return std::min(f, 1.0);
  };
  std::vector<double> cdf(grid);
  for (int k = 0; k < grid; ++k) cdf[k] = opp_cdf(xs[k]);

  int vectors = 1;
  for (int r = 0; r < others; ++r) vectors *= 3;
  const auto& pmf = inst.demand().pmf();

  OracleReport rep;
  rep.grid = grid;
  rep.lo = lo;
  rep.hi = hi;
  for (int j = 1; j <= n; ++j) {
    OracleState st;
    st.state = j;
    st.reference = eq.margin(j);
    st.max_uniform = -std::numeric_limits<double>::infinity();
    st.max_lower = -std::numeric_limits<double>::infinity();
    st.worst_excess = -std::numeric_limits<double>::infinity();
    const DomainBound dom = inst.model().penalty_domain(j);
    for (int k = 0; k < grid; ++k) {
      if (!dom.admits(xs[k])) continue;
      const double p_below = k == 0 ? 0.0 : cdf[k - 1];
      const double p_tie = cdf[k] - p_below;
      const double p_above = 1.0 - cdf[k];
      const double cls[3] = {p_below, p_tie, p_above};
      double lower = 0.0, upper = 0.0, uniform = 0.0;
      for (int code = 0; code < vectors; ++code) {
        double pr = 1.0;
        int b = 0, t = 0;
        for (int r = 0, rest = code; r < others; ++r, rest /= 3) {
          const int c = rest % 3;
          pr *= cls[c];
          b += c == 0;
          t += c == 1;
        }
        if (pr == 0.0) continue;
        for (int d = 0; d < static_cast<int>(pmf.size()); ++d) {
          if (pmf[d] == 0.0) continue;
          const double w = pr * pmf[d];
          if (b + t < d) lower += w;
          if (b < d) {
            upper += w;
            uniform += w * std::min(1.0, double(d - b) / (t + 1));
          }
        }
      }
      const double own = inst.margin_at(j, xs[k]);
      const double u = own * uniform;
      const double lw = own * (own >= 0.0 ? lower : upper);
      const double slack = std::abs(own) * (upper - lower);
      if (u > st.max_uniform) {
        st.max_uniform = u;
        st.argmax = xs[k];
      }
      st.max_lower = std::max(st.max_lower, lw);
      st.max_slack = std::max(st.max_slack, slack);
      st.worst_excess = std::max(st.worst_excess, u - st.reference - slack);
    }
    st.detected = st.max_lower - st.reference > tol;
    st.certified = st.worst_excess <= tol && !st.detected;
    rep.states.push_back(st);
  }
  return rep;
}

}  // namespace specne
