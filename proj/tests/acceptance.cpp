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


// Acceptance gate: one PASS/FAIL line per criterion. Exits non-zero when any
// criterion fails. Tolerances are fixed here and nowhere else.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "specne/specne.hpp"
#include "test_util.hpp"

namespace {

using namespace specne;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

int cli_exit(const std::string& args) {
  const std::string cmd = std::string(SPECNE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_path(const std::string& name) {
  return std::string(SPECNE_CONFIG_DIR) + "/" + name;
}

bool sweeps_pass(const Equilibrium& eq, int grid, double tol, double* worst_gap,
                 double* worst_flat) {
  bool ok = true;
  for (int j = 1; j <= eq.n(); ++j) {
    const auto rep = best_response_sweep(eq, j, grid, tol);
    *worst_gap = std::max(*worst_gap, rep.gap);
    *worst_flat = std::max(*worst_flat, rep.flat_error);
    ok = ok && rep.pass();
  }
  return ok;
}

// 1. Reference endpoints of the shift-cubic instance with l = 21.
Outcome regression_shift_cubic() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto eq = compute_equilibrium(testing::shift_cubic_instance(21));
  const double elapsed = seconds_since(t0);
  const double want[] = {100.0, 22.864, 17.345, 17.2766};
  double worst = 0.0;
  for (int i = 0; i <= 3; ++i) worst = std::max(worst, std::abs(eq.lower(i) - want[i]));
  Outcome o;
  o.pass = worst <= 5e-3 && elapsed < 1.0;
  o.detail = "L=[" + fmt(eq.lower(0)) + "," + fmt(eq.lower(1)) + "," + fmt(eq.lower(2)) + "," +
             fmt(eq.lower(3)) + "] max|err|=" + fmt(worst) + " (tol 5e-3) t=" +
             fmt(elapsed) + "s";
  return o;
}

// 2. LogExp values, positive deviation gain at 0.936, certificate exit 2.
Outcome regression_log_exp() {
  const auto eq = compute_equilibrium(testing::log_exp_instance());
  const double err = std::max({std::abs(eq.profit(1) - 0.9305), std::abs(eq.lower(1) - 1.1432),
                               std::abs(eq.lower(2) - 0.9372)});
  const double gain = analytic_payoff(eq, 1, 0.936) - eq.margin(1);
  const int code = cli_exit("verify analytic --config " + config_path("logexp.json"));
  Outcome o;
  o.pass = err <= 1e-3 && gain > 0.0 && code == 2;
  o.detail = "max|err|=" + fmt(err) + " (tol 1e-3) gain@0.936=" + fmt(gain) +
             " verify exit=" + std::to_string(code);
  return o;
}

// 3. Reversed-support profile values and certificate.
Outcome regression_tilde() {
  const auto t = build_tilde_ne(testing::log_exp_instance());
  const double err = std::max({std::abs(t.ptilde(2) - 27.6185), std::abs(t.ltilde(2) - 3.3201),
                               std::abs(t.ptilde(1) - 3.3148), std::abs(t.ltilde(1) - 3.3148)});
  const bool cert = certify_tilde(t, 10000, 1e-9).pass();
  Outcome o;
  o.pass = err <= 1e-3 && cert;
  o.detail = "max|err|=" + fmt(err) + " (tol 1e-3) certificate=" + (cert ? "pass" : "fail");
  return o;
}

// 4. Best-response certificate on the shift-cubic instance and 20 random ones.
Outcome certificate_sweeps() {
  const auto t0 = std::chrono::steady_clock::now();
  double gap = -1e300, flat = 0.0;
  bool ok = sweeps_pass(compute_equilibrium(testing::shift_cubic_instance(21)), 10000, 1e-9,
                        &gap, &flat);
  testing::Draws d(2026);
  int checked = 0;
  for (int t = 0; t < 20; ++t) {
    const auto inst = testing::random_instance(d, 60, 4);
    ok = ok && check_ratio_ordering(inst).holds();
    ok = ok && sweeps_pass(compute_equilibrium(inst), 10000, 1e-9, &gap, &flat);
    ++checked;
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = ok && elapsed < 10.0;
  o.detail = std::to_string(checked + 1) + " instances max gap=" + fmt(gap) +
             " max flat err=" + fmt(flat) + " (tol 1e-9) t=" + fmt(elapsed) + "s";
  return o;
}

// 5. Simulated per-state revenue against p_i - c.
Outcome monte_carlo() {
  const auto eq = compute_equilibrium(testing::shift_cubic_instance(21));
  const auto profile = strategy_profile(eq);
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = simulate_markets(profile, eq.instance(), 200000, 12345);
  const double elapsed = seconds_since(t0);
  SimulationOptions opts;
  opts.workers = 4;
  const auto b = simulate_markets(profile, eq.instance(), 200000, 12345, opts);
  bool ok = elapsed < 30.0;
  double worst = 0.0;
  for (int i = 0; i < eq.n(); ++i) {
    const auto& est = a.pooled[i];
    const double z = std::abs(est.mean - eq.margin(est.state)) / est.std_error;
    worst = std::max(worst, z);
    ok = ok && z <= 3.0;
    ok = ok && est.mean == b.pooled[i].mean && est.std_error == b.pooled[i].std_error;
  }
  Outcome o;
  o.pass = ok;
  o.detail = "max |z|=" + fmt(worst) + " (limit 3) reproducible=" +
             (a.mean_total_revenue == b.mean_total_revenue ? "yes" : "no") + " t=" +
             fmt(elapsed) + "s";
  return o;
}

// 6. Exhaustive discretized oracle on a three-primary instance.
Outcome brute_force() {
  const auto eq = compute_equilibrium(validate(testing::config(3, 1, {0.3, 0.4}, 10, 1),
                                               PenaltyModel::shift_cubic(2, 0.5)));
  const auto rep = brute_force_oracle(eq, 200);
  bool ok = rep.certified();
  double worst = -1e300;
  for (const auto& s : rep.states) {
    const double excess = s.max_uniform - s.reference - s.max_slack;
    worst = std::max(worst, excess);
    ok = ok && excess <= 1e-9;
  }
  Outcome o;
  o.pass = ok;
  o.detail = "max(best - (p-c) - slack)=" + fmt(worst) + " (tol 1e-9) grid=200";
  return o;
}

// 7. Large-market efficiency limits.
Outcome regimes() {
  const auto high_inst = testing::quad_cubic_instance(501, 400);
  const auto high = efficiency(high_inst);
  const auto low = efficiency(testing::quad_cubic_instance(501, 50));
  bool ok = high.eta >= 0.95 && low.eta <= 0.05;
  double worst = 0.0;
  for (int i = 1; i <= 3; ++i) {
    const double cap = high_inst.margin_at(i, high_inst.v());
    const double rel = std::abs(high.per_state_profit[i - 1] - cap) / cap;
    worst = std::max(worst, rel);
    ok = ok && rel <= 0.05;
  }
  Outcome o;
  o.pass = ok;
  o.detail = "eta(m=400)=" + fmt(high.eta) + " eta(m=50)=" + fmt(low.eta) +
             " max rel dev from f_i(v)-c=" + fmt(worst);
  return o;
}

// 8. Point-mass random demand reproduces fixed demand.
Outcome random_demand() {
  testing::Draws d(88);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto fixed = testing::random_instance(d);
    MarketConfig cfg = fixed.config();
    std::vector<double> pmf(cfg.demand.m() + 1, 0.0);
    pmf.back() = 1.0;
    cfg.demand = DemandModel::random(pmf);
    const auto a = compute_equilibrium(fixed);
    const auto b = compute_equilibrium(validate(cfg, fixed.model()));
    for (int i = 0; i <= a.n(); ++i) worst = std::max(worst, std::abs(a.lower(i) - b.lower(i)));
    for (int i = 1; i <= a.n(); ++i) worst = std::max(worst, std::abs(a.profit(i) - b.profit(i)));
  }
  Outcome o;
  o.pass = worst <= 1e-12;
  o.detail = "max|diff|=" + fmt(worst) + " over 10 instances (tol 1e-12)";
  return o;
}

// 9. Repeated game thresholds.
Outcome repeated() {
  const auto toy = compute_equilibrium(testing::toy_instance());
  const auto toy_res = repeated_game(toy, auto_epsilon(toy, 0.5));
  const double toy_err = std::max(std::abs(toy_res.beta[0] - 0.25),
                                  std::abs(toy_res.delta_min - 2.0 / 3.0));
  const auto eq = compute_equilibrium(testing::shift_cubic_instance(21));
  const auto s = auto_epsilon(eq, 0.5);
  const double dmin = repeated_game(eq, s).delta_min;
  const bool mid_pass = spne_check(eq, s, 0.5 * (1.0 + dmin)).pass;
  // Bisect the pass/fail boundary of the check itself.
  double lo = 1e-9, hi = 0.5 * (1.0 + dmin);
  const bool lo_fails = !spne_check(eq, s, lo).pass;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (spne_check(eq, s, mid, 100).pass ? hi : lo) = mid;
  }
  const double boundary = 0.5 * (lo + hi);
  Outcome o;
  o.pass = toy_err <= 1e-12 && dmin > 0.0 && dmin < 1.0 && mid_pass && lo_fails &&
           std::abs(boundary - dmin) <= 1e-6;
  o.detail = "toy max|err|=" + fmt(toy_err) + " delta_min=" + fmt(dmin) + " boundary=" +
             fmt(boundary) + " |diff|=" + fmt(std::abs(boundary - dmin));
  return o;
}

// 10. Multiple and asymmetric equilibria without strict ratio ordering.
Outcome multiplicity() {
  const auto inst = validate(testing::config(6, 2, {0.3, 0.3}, 10, 1),
                             PenaltyModel::constant_ratio(2, 1, 1));
  const auto alt = build_alternate_ne(inst);
  const bool alt_ok = certify_alternate(alt, 10000, 1e-9).pass();
  const auto eq = compute_equilibrium(inst);
  double gap = -1e300, flat = 0.0;
  const bool std_ok = sweeps_pass(eq, 10000, 1e-9, &gap, &flat);
  double distance = 0.0;
  const double lo = std::min(eq.lower(eq.n()), alt.lbar());
  for (int k = 0; k <= 2000; ++k) {
    const double x = lo + (inst.v() - lo) * k / 2000.0;
    for (int i = 1; i <= eq.n(); ++i) {
      distance = std::max(distance, std::abs(cdf_eval(eq, i, x) - alt.cdf(x)));
    }
  }
  const auto pair = build_asymmetric_ne(validate(testing::config(2, 1, {0.3, 0.3}, 10, 1),
                                                 PenaltyModel::constant_ratio(2, 1, 1)));
  const bool asym_ok = certify_asymmetric(pair, 10000, 1e-9).pass();
  Outcome o;
  o.pass = alt_ok && std_ok && distance > 0.01 && asym_ok;
  o.detail = std::string("alternate=") + (alt_ok ? "pass" : "fail") +
             " standard=" + (std_ok ? "pass" : "fail") + " sup dist=" + fmt(distance) +
             " asymmetric=" + (asym_ok ? "pass" : "fail");
  return o;
}

// 11. Endpoint trend as the number of states grows.
Outcome state_count_trend() {
  const auto base = validate(testing::config(21, 10, {0.25, 0.25}, 10, 0),
                             PenaltyModel::linear_rate(2, 3.5, 0.5));
  const auto rows = sweep(base.config(), base.model(), SweepParameter::kN, 1, 100);
  bool ok = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    ok = ok && rows[k].ok;
    if (ok && k > 0) ok = rows[k].lowers[1] > rows[k - 1].lowers[1];
  }
  Outcome o;
  if (!ok) {
    o.detail = "sweep failed or L_1 not increasing";
    return o;
  }
  const double v = base.v();
  const double l1 = rows.back().lowers[1];
  const double ln100 = rows.back().lowers.back();
  const double ln80 = rows[79].lowers.back();
  o.pass = v - l1 < 0.5 && std::abs(ln100 - ln80) < 0.05 && ln100 < v - 1.0;
  o.detail = "v-L_1(100)=" + fmt(v - l1) + " |L_n(100)-L_n(80)|=" + fmt(std::abs(ln100 - ln80)) +
             " L_n(100)=" + fmt(ln100);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"shift-cubic regression", regression_shift_cubic},
      {"log-exp regression", regression_log_exp},
      {"reversed-support regression", regression_tilde},
      {"best-response certificate", certificate_sweeps},
      {"monte carlo agreement", monte_carlo},
      {"brute-force oracle", brute_force},
      {"large-market regimes", regimes},
      {"random-demand degeneracy", random_demand},
      {"repeated game", repeated},
      {"multiplicity witness", multiplicity},
      {"state-count trend", state_count_trend},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
