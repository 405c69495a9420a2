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

// Command-line driver.
//
// Exit codes: 0 ok, 1 configuration or usage error, 2 certificate failure,
// 3 numeric failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "specne/io.hpp"
#include "specne/specne.hpp"

namespace {

using specne::Json;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kCertificate = 2;
constexpr int kNumeric = 3;

struct Options {
  std::string config;
  std::string out;
  std::optional<int> grid;
  std::int64_t trials = 200000;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::string sweep;
  std::optional<double> delta;
  std::string epsilon = "auto:0.5";
  std::string epsilon_file;
  std::string table = "efficiency";
  int workers = 1;
  std::string mode;  // subcommand positional
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Loaded configuration plus the digest of its raw bytes.
struct Loaded {
  specne::ParsedConfig parsed;
  std::string digest;
};

Loaded load(const Options& opt) {
  if (opt.config.empty()) throw specne::ConfigError("--config is required");
  const std::string text = specne::read_file(opt.config);
  Loaded l{specne::parse_config(specne::parse_json_text(text, opt.config)),
           specne::hex64(specne::fnv1a64(text))};
  return l;
}

specne::ValidatedInstance instance_of(const Loaded& l) {
  return specne::validate(l.parsed.config, l.parsed.model);
}

class Run {
 public:
  Run(std::string command, const Options& opt) : opt_(opt) {
    manifest_.command = std::move(command);
    manifest_.seed = opt.seed;
    manifest_.started_at = utc_now();
  }

  void set_digest(const std::string& d) { manifest_.config_digest = d; }
  void note(const std::string& msg) { notes_.push_back(msg); }

  /// Writes the payload to --out (atomically) or stdout, then the manifest.
  void emit(const std::string& payload) {
    if (opt_.out.empty()) {
      std::cout << payload;
      if (payload.empty() || payload.back() != '\n') std::cout << '\n';
    } else {
      specne::atomic_write(opt_.out, payload);
      manifest_.outputs.push_back(opt_.out);
    }
    manifest_.finished_at = utc_now();
    Json m = manifest_.to_json();
    if (!notes_.empty()) m["notes"] = notes_;
    if (opt_.out.empty()) {
      std::cerr << "manifest: " << m.dump() << '\n';
    } else {
      specne::atomic_write(opt_.out + ".manifest.json", m.dump(2) + "\n");
    }
  }

  void emit(const Json& j) { emit(j.dump(2) + "\n"); }

 private:
  const Options& opt_;
  specne::RunManifest manifest_;
  std::vector<std::string> notes_;
};

void warn_assumption(const specne::Equilibrium& eq) {
  if (eq.assumption_warning()) {
    std::cerr << "warning: profit-ratio ordering "
              << specne::status_name(eq.assumption().status) << " for states "
              << eq.assumption().state_i << "," << eq.assumption().state_j
              << "; the computed profile need not be an equilibrium\n";
  }
}

// ---------------------------------------------------------------------------

int cmd_ne(const Options& opt) {
  Run run("ne", opt);
  const Loaded l = load(opt);
  run.set_digest(l.digest);
  const auto eq = specne::compute_equilibrium(instance_of(l));
  warn_assumption(eq);
  run.emit(specne::to_json(eq));
  return kOk;
}

int cmd_cdf(const Options& opt) {
  Run run("cdf", opt);
  const Loaded l = load(opt);
  run.set_digest(l.digest);
  const auto eq = specne::compute_equilibrium(instance_of(l));
  warn_assumption(eq);
  const int grid = opt.grid.value_or(201);
  if (grid < 2) throw specne::ConfigError("--grid must be >= 2");
  const double lo = eq.lower(eq.n());
  const double hi = eq.instance().v();
  std::ostringstream csv;
  csv << "state,x,cdf\n";
  for (int i = 1; i <= eq.n(); ++i) {
    for (int k = 0; k < grid; ++k) {
      const double x = k == grid - 1 ? hi : lo + (hi - lo) * k / (grid - 1);
      csv << i << ',' << specne::csv_number(x) << ','
          << specne::csv_number(specne::cdf_eval(eq, i, x)) << '\n';
    }
  }
  run.emit(csv.str());
  return kOk;
}

int cmd_verify(const Options& opt) {
  Run run("verify " + opt.mode, opt);
  const Loaded l = load(opt);
  run.set_digest(l.digest);
  const auto eq = std::make_shared<const specne::Equilibrium>(
      specne::compute_equilibrium(instance_of(l)));
  warn_assumption(*eq);
  Json out;
  out["mode"] = opt.mode;
  bool pass = true;
  if (opt.mode == "analytic") {
    const int grid = opt.grid.value_or(10000);
    const double tol = opt.tol.value_or(1e-9);
    out["grid"] = grid;
    out["tol"] = tol;
    out["states"] = Json::array();
    for (int j = 1; j <= eq->n(); ++j) {
      const auto rep = specne::best_response_sweep(*eq, j, grid, tol);
      out["states"].push_back(specne::to_json(rep));
      pass = pass && rep.pass();
    }
  } else if (opt.mode == "mc") {
    const auto profile = specne::strategy_profile(eq);
    specne::SimulationOptions so;
    so.workers = opt.workers;
    const auto sim =
        specne::simulate_markets(profile, eq->instance(), opt.trials, opt.seed, so);
    out["trials"] = opt.trials;
    out["seed"] = opt.seed;
    out["states"] = Json::array();
    for (const auto& est : sim.pooled) {
      const double ref = eq->margin(est.state);
      const double gap = est.mean - ref;
      const bool ok = std::abs(gap) <= 3.0 * est.std_error;
      out["states"].push_back({{"state", est.state},
                               {"mean", est.mean},
                               {"stderr", est.std_error},
                               {"trials", opt.trials},
                               {"observations", est.observations},
                               {"reference", ref},
                               {"gap", gap},
                               {"pass", ok}});
      pass = pass && ok;
    }
    out["mean_total_revenue"] = sim.mean_total_revenue;
    out["total_revenue_stderr"] = sim.total_revenue_stderr;
  } else {
    const int grid = opt.grid.value_or(200);
    const auto rep = specne::brute_force_oracle(*eq, grid, opt.tol.value_or(1e-9));
    out["oracle"] = specne::to_json(rep);
    pass = rep.certified();
  }
  out["pass"] = pass;
  run.emit(out);
  return pass ? kOk : kCertificate;
}

bool parse_range(const std::string& text, std::string& name, int& from, int& to) {
  const auto eq = text.find('=');
  const auto colon = text.find(':', eq == std::string::npos ? 0 : eq);
  if (eq == std::string::npos || colon == std::string::npos) return false;
  name = text.substr(0, eq);
  try {
    std::size_t used = 0;
    const std::string a = text.substr(eq + 1, colon - eq - 1);
    const std::string b = text.substr(colon + 1);
    from = std::stoi(a, &used);
    if (used != a.size()) return false;
    to = std::stoi(b, &used);
    if (used != b.size()) return false;
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

int cmd_efficiency(const Options& opt) {
  Run run("efficiency", opt);
  const Loaded l = load(opt);
  run.set_digest(l.digest);
  if (opt.sweep.empty()) {
    run.emit(specne::to_json(specne::efficiency(instance_of(l))));
    return kOk;
  }
  std::string name;
  int from = 0, to = 0;
  if (!parse_range(opt.sweep, name, from, to)) {
    throw specne::ConfigError("--sweep expects name=from:to, e.g. m=1:50");
  }
  specne::SweepParameter param;
  if (name == "m") {
    param = specne::SweepParameter::kM;
  } else if (name == "l") {
    param = specne::SweepParameter::kL;
  } else if (name == "n") {
    param = specne::SweepParameter::kN;
  } else {
    throw specne::ConfigError("--sweep parameter must be m, l or n");
  }
  const auto rows = specne::sweep(l.parsed.config, l.parsed.model, param, from, to);
  const double nan = std::nan("");
  std::ostringstream csv;
  using specne::csv_number;
  if (param == specne::SweepParameter::kN) {
    csv << "n,L_1,L_n\n";
    for (const auto& r : rows) {
      csv << r.value << ',' << csv_number(r.ok ? r.lowers[1] : nan) << ','
          << csv_number(r.ok ? r.lowers.back() : nan) << '\n';
    }
  } else if (opt.table == "states") {
    csv << name << ",i,p_minus_c\n";
    for (const auto& r : rows) {
      const int n = l.parsed.config.n();
      for (int i = 1; i <= n; ++i) {
        csv << r.value << ',' << i << ','
            << csv_number(r.ok ? r.result.per_state_profit[i - 1] : nan) << '\n';
      }
    }
  } else {
    csv << name << ",r_ne,r_opt,eta,regime\n";
    for (const auto& r : rows) {
      csv << r.value << ',' << csv_number(r.ok ? r.result.r_ne : nan) << ','
          << csv_number(r.ok ? r.result.r_opt : nan) << ','
          << csv_number(r.ok ? r.result.eta : nan) << ','
          << (r.ok && r.result.regime ? r.result.regime->label() : std::string("nan"))
          << '\n';
    }
  }
  for (const auto& r : rows) {
    if (!r.ok) {
      const std::string msg = name + "=" + std::to_string(r.value) + ": " + r.error;
      std::cerr << "sweep point failed: " << msg << '\n';
      run.note(msg);
    }
  }
  run.emit(csv.str());
  return kOk;
}

specne::EpsilonSchedule schedule_for(const specne::Equilibrium& eq, const Options& opt) {
  if (!opt.epsilon_file.empty()) {
    const Json j = specne::parse_json_text(specne::read_file(opt.epsilon_file),
                                           opt.epsilon_file);
    specne::EpsilonSchedule s;
    try {
      s.eps = (j.is_object() ? j.at("eps") : j).get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw specne::ConfigError("epsilon file must hold an array or {\"eps\": [...]}");
    }
    specne::validate_schedule(eq, s);
    return s;
  }
  const std::string& e = opt.epsilon;
  if (e.rfind("auto:", 0) == 0) {
    double safety = 0.0;
    try {
      safety = std::stod(e.substr(5));
    } catch (const std::exception&) {
      throw specne::ConfigError("--epsilon auto:<safety> needs a number");
    }
    return specne::auto_epsilon(eq, safety);
  }
  specne::EpsilonSchedule s;
  std::stringstream ss(e);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      s.eps.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw specne::ConfigError("--epsilon expects auto:<safety> or a comma list");
    }
  }
  specne::validate_schedule(eq, s);
  return s;
}

int cmd_repeated(const Options& opt) {
  Run run("repeated " + opt.mode, opt);
  const Loaded l = load(opt);
  run.set_digest(l.digest);
  const auto eq = specne::compute_equilibrium(instance_of(l));
  warn_assumption(eq);
  const auto schedule = schedule_for(eq, opt);
  if (opt.mode == "delta-min") {
    run.emit(specne::to_json(specne::repeated_game(eq, schedule), schedule));
    return kOk;
  }
  if (!opt.delta) throw specne::ConfigError("repeated check needs --delta");
  const auto rep = specne::spne_check(eq, schedule, *opt.delta, opt.grid.value_or(1000),
                                      opt.tol.value_or(1e-9));
  Json out = specne::to_json(rep);
  out["epsilon"] = schedule.eps;
  run.emit(out);
  return rep.pass ? kOk : kCertificate;
}

int cmd_counterexample(const Options& opt) {
  Run run("counterexample " + opt.mode, opt);
  const Loaded l = load(opt);
  run.set_digest(l.digest);
  const auto inst = instance_of(l);
  const int grid = opt.grid.value_or(10000);
  const double tol = opt.tol.value_or(1e-9);
  Json out;
  bool pass = true;
  if (opt.mode == "constant-ratio") {
    const auto alt = specne::build_alternate_ne(inst);
    const auto alt_cert = specne::certify_alternate(alt, grid, tol);
    const auto eq = specne::compute_equilibrium(inst);
    specne::Certificate std_cert;
    for (int j = 1; j <= eq.n(); ++j) {
      std_cert.sweeps.push_back(specne::best_response_sweep(eq, j, grid, tol));
    }
    double distance = 0.0;
    const double lo = std::min(eq.lower(eq.n()), alt.lbar());
    const double hi = inst.v();
    for (int k = 0; k <= 2000; ++k) {
      const double x = lo + (hi - lo) * k / 2000;
      for (int i = 1; i <= eq.n(); ++i) {
        distance = std::max(distance, std::abs(specne::cdf_eval(eq, i, x) - alt.cdf(x)));
      }
    }
    std::vector<double> pbar;
    for (int i = 1; i <= inst.n(); ++i) pbar.push_back(alt.pbar(i));
    out["pbar"] = pbar;
    out["Lbar"] = alt.lbar();
    out["alternate_certificate"] = specne::to_json(alt_cert);
    out["standard"] = specne::to_json(eq);
    out["standard_certificate"] = specne::to_json(std_cert);
    out["sup_distance"] = distance;
    pass = alt_cert.pass() && std_cert.pass() && distance > 0.01;
  } else if (opt.mode == "asymmetric") {
    const auto pair = specne::build_asymmetric_ne(inst);
    const auto cert = specne::certify_asymmetric(pair, grid, tol);
    const double mid = 0.5 * (pair.lhat() + inst.v());
    out["Lhat"] = pair.lhat();
    out["Lhat_low"] = pair.lhat_low();
    out["references"] = {{"primary_1", {pair.reference(1, 1), pair.reference(1, 2)}},
                         {"primary_2", {pair.reference(2, 1), pair.reference(2, 2)}}};
    out["asymmetry_at_midpoint"] = std::abs(pair.cdf(1, 1, mid) - pair.cdf(2, 1, mid));
    out["certificate"] = specne::to_json(cert);
    pass = cert.pass();
  } else {
    const auto t = specne::build_tilde_ne(inst);
    const auto cert = specne::certify_tilde(t, grid, tol);
    out["ptilde"] = {t.ptilde(1), t.ptilde(2)};
    out["Ltilde"] = {t.ltilde(1), t.ltilde(2), t.ltilde(3)};
    out["certificate"] = specne::to_json(cert);
    const auto eq = specne::compute_equilibrium(inst);
    Json std_json = specne::to_json(eq);
    const auto sweep1 = specne::best_response_sweep(eq, 1, grid, tol);
    std_json["state_1_sweep"] = specne::to_json(sweep1);
    out["standard"] = std_json;
    pass = cert.pass();
  }
  out["pass"] = pass;
  run.emit(out);
  return pass ? kOk : kCertificate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric equilibrium pricing for spectrum oligopolies"};
  app.set_version_flag("--version", specne::kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--config", opt.config, "Game instance JSON");
  app.add_option("--out", opt.out, "Output file (stdout if omitted)");
  app.add_option("--grid", opt.grid, "Grid size");
  app.add_option("--trials", opt.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed, "Random seed");
  app.add_option("--tol", opt.tol, "Certificate tolerance");
  app.add_option("--sweep", opt.sweep, "Sweep, e.g. m=1:50");
  app.add_option("--delta", opt.delta, "Discount factor");
  app.add_option("--epsilon", opt.epsilon, "auto:<safety> or a comma list");
  app.add_option("--epsilon-file", opt.epsilon_file, "Epsilon schedule JSON");
  app.add_option("--table", opt.table, "Sweep table: efficiency or states")
      ->check(CLI::IsMember({"efficiency", "states"}));
  app.add_option("--workers", opt.workers, "Simulation threads")->check(CLI::PositiveNumber);

  auto* ne = app.add_subcommand("ne", "Compute the equilibrium");
  auto* cdf = app.add_subcommand("cdf", "Dump the equilibrium CDFs as CSV");
  auto* verify = app.add_subcommand("verify", "Certify the equilibrium");
  verify->add_option("mode", opt.mode, "analytic, mc or brute")
      ->required()
      ->check(CLI::IsMember({"analytic", "mc", "brute"}));
  auto* eff = app.add_subcommand("efficiency", "Efficiency and sweeps");
  auto* rep = app.add_subcommand("repeated", "Repeated game with Nash reversion");
  rep->add_option("action", opt.mode, "delta-min or check")
      ->required()
      ->check(CLI::IsMember({"delta-min", "check"}));
  auto* cx = app.add_subcommand("counterexample", "Equilibria outside the ratio ordering");
  cx->add_option("kind", opt.mode, "constant-ratio, asymmetric or logexp")
      ->required()
      ->check(CLI::IsMember({"constant-ratio", "asymmetric", "logexp"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (ne->parsed()) return cmd_ne(opt);
    if (cdf->parsed()) return cmd_cdf(opt);
    if (verify->parsed()) return cmd_verify(opt);
    if (eff->parsed()) return cmd_efficiency(opt);
    if (rep->parsed()) return cmd_repeated(opt);
    if (cx->parsed()) return cmd_counterexample(opt);
  } catch (const specne::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const specne::SizeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const specne::PatternError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const specne::ModelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const specne::OrderError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const specne::ScheduleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const specne::Error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}
