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

// JSON configuration input, JSON/CSV result output and run manifests.
//
// Config layout:
//
//   {"l": 21, "demand": {"fixed": 10} | {"pmf": [g0, g1, ...]},
//    "n": 3, "q": [0.2, 0.2, 0.2], "v": 100, "c": 1,
//    "penalty": {"family": "shift_cubic", "params": {"a": 1}}}

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>
#include "specne/counterexamples.hpp"
#include "specne/efficiency.hpp"
#include "specne/equilibrium.hpp"
#include "specne/errors.hpp"
#include "specne/market.hpp"
#include "specne/repeated.hpp"
#include "specne/verification.hpp"

namespace specne {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Config input.

namespace detail {

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("config: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config: field '") + key + "' has the wrong type");
  }
}

template <typename T>
T optional_field(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config: field '") + key + "' has the wrong type");
  }
}

}  // namespace detail

inline PenaltyModel parse_penalty(const Json& j, int n, double c) {
  if (!j.is_object()) throw ConfigError("config: 'penalty' must be an object");
  const auto family = detail::required<std::string>(j, "family");
  const Json params = j.contains("params") ? j.at("params") : Json::object();
  if (!params.is_object()) throw ConfigError("config: 'penalty.params' must be an object");
  if (family == "shift_cubic") {
    return PenaltyModel::shift_cubic(n, detail::optional_field<double>(params, "a", 1.0));
  }
  if (family == "quad_cubic") return PenaltyModel::quad_cubic(n);
  if (family == "linear_rate") {
    return PenaltyModel::linear_rate(n, detail::required<double>(params, "r_max"),
                                     detail::required<double>(params, "r_min"));
  }
  if (family == "constant_ratio") {
    return PenaltyModel::constant_ratio(n, detail::optional_field<double>(params, "p", 1.0),
                                        detail::optional_field<double>(params, "shift", c));
  }
  if (family == "log_exp") {
    if (n != 2) throw ConfigError("config: log_exp needs n = 2");
    return PenaltyModel::log_exp();
  }
  if (family == "shifted_additive") {
    const auto h1 = detail::optional_field<std::string>(params, "h1", "linear");
    BaseCurve curve;
    if (h1 == "linear") {
      curve = BaseCurve::kLinear;
    } else if (h1 == "power") {
      curve = BaseCurve::kPower;
    } else if (h1 == "exp") {
      curve = BaseCurve::kExp;
    } else {
      throw ConfigError("config: unknown h1 curve '" + h1 + "'");
    }
    auto h2 = detail::required<std::vector<double>>(params, "h2");
    if (static_cast<int>(h2.size()) != n) throw ConfigError("config: h2 must have n entries");
    return PenaltyModel::shifted_additive(curve, detail::optional_field<double>(params, "r", 1.0),
                                          std::move(h2));
  }
  throw ConfigError("config: unknown penalty family '" + family + "'");
}

inline DemandModel parse_demand(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: 'demand' must be an object");
  if (j.contains("fixed")) return DemandModel::fixed(detail::required<int>(j, "fixed"));
  if (j.contains("pmf")) return DemandModel::random(detail::required<std::vector<double>>(j, "pmf"));
  throw ConfigError("config: demand needs 'fixed' or 'pmf'");
}

struct ParsedConfig {
  MarketConfig config;
  PenaltyModel model;
};

inline ParsedConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  MarketConfig cfg;
  cfg.l = detail::required<int>(j, "l");
  if (!j.contains("demand")) throw ConfigError("config: missing field 'demand'");
  cfg.demand = parse_demand(j.at("demand"));
  cfg.q = detail::required<std::vector<double>>(j, "q");
  cfg.v = detail::required<double>(j, "v");
  cfg.c = detail::required<double>(j, "c");
  const int n = detail::optional_field<int>(j, "n", cfg.n());
  if (n != cfg.n()) throw ConfigError("config: n does not match the length of q");
  if (!j.contains("penalty")) throw ConfigError("config: missing field 'penalty'");
  PenaltyModel model = parse_penalty(j.at("penalty"), n, cfg.c);
  return {std::move(cfg), std::move(model)};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(what + ": malformed JSON: " + e.what());
  }
}

inline ParsedConfig load_config(const std::string& path) {
  return parse_config(parse_json_text(read_file(path), path));
}

// ---------------------------------------------------------------------------
// Result output.

inline Json to_json(const AssumptionReport& r) {
  Json j;
  j["status"] = status_name(r.status);
  if (r.status != AssumptionReport::Status::kHolds) {
    j["pair"] = {r.state_i, r.state_j};
    j["x"] = {r.x_prev, r.x};
  }
  j["grid"] = r.grid_size;
  return j;
}

inline Json to_json(const Equilibrium& eq) {
  Json j;
  if (eq.all_quote_v()) j["degenerate"] = "all_quote_v";
  j["p"] = eq.profits();
  j["L"] = eq.lowers();
  j["w"] = eq.tail_masses();
  j["p_minus_c"] = eq.margins();
  if (!eq.all_quote_v()) {
    j["assumption"] = to_json(eq.assumption());
    j["ordered"] = eq.ordered();
  }
  return j;
}

inline Json to_json(const SweepReport& r) {
  Json j;
  j["state"] = r.state;
  j["reference"] = r.reference;
  j["max_payoff"] = r.max_payoff;
  j["gap"] = r.gap;
  j["flat_error"] = r.flat_error;
  j["argmax"] = r.argmax;
  j["argmax_count"] = r.argmax_count;
  j["argmax_range"] = {r.argmax_lo, r.argmax_hi};
  j["support"] = {r.support_lo, r.support_hi};
  j["range"] = {r.lo, r.hi};
  j["points"] = r.points;
  j["tol"] = r.tol;
  j["pass"] = r.pass();
  return j;
}

inline Json to_json(const Certificate& c) {
  Json j;
  j["sweeps"] = Json::array();
  for (const auto& s : c.sweeps) j["sweeps"].push_back(to_json(s));
  j["pass"] = c.pass();
  return j;
}

inline Json to_json(const DeviationReport& r) {
  Json j;
  j["state"] = r.state;
  j["mean"] = r.mean;
  j["stderr"] = r.std_error;
  j["trials"] = r.trials;
  j["reference"] = r.reference;
  j["gap"] = r.gap;
  if (r.analytic) j["analytic"] = *r.analytic;
  j["pass"] = r.pass();
  return j;
}

inline Json to_json(const OracleReport& r) {
  Json j;
  j["grid"] = r.grid;
  j["range"] = {r.lo, r.hi};
  j["states"] = Json::array();
  for (const auto& s : r.states) {
    j["states"].push_back({{"state", s.state},
                           {"reference", s.reference},
                           {"max_uniform", s.max_uniform},
                           {"argmax", s.argmax},
                           {"max_lower", s.max_lower},
                           {"max_slack", s.max_slack},
                           {"worst_excess", s.worst_excess},
                           {"deviation_detected", s.detected},
                           {"pass", s.certified}});
  }
  j["pass"] = r.certified();
  return j;
}

inline Json to_json(const AsymptoticRegime& r) {
  Json j;
  j["kind"] = r.label();
  if (r.kind == AsymptoticRegime::Kind::kMiddle) j["k"] = r.k;
  if (!r.limits.empty()) j["limits"] = r.limits;
  return j;
}

inline Json to_json(const EfficiencyResult& r) {
  Json j;
  j["r_ne"] = r.r_ne;
  j["r_opt"] = r.r_opt;
  j["eta"] = r.eta;
  j["per_state_profit"] = r.per_state_profit;
  if (r.regime) j["regime"] = to_json(*r.regime);
  return j;
}

inline Json to_json(const RepeatedGameResult& r, const EpsilonSchedule& s) {
  Json j;
  j["epsilon"] = s.eps;
  j["beta"] = r.beta;
  j["delta_min"] = r.delta_min;
  j["binding_state"] = r.binding_state;
  j["r_sne"] = r.r_sne;
  j["per_state_coop_profit"] = r.per_state_coop_profit;
  j["metadata"] = {{"r_sne_net_of_cost", true}};
  return j;
}

inline Json to_json(const SpneReport& r) {
  Json j;
  j["delta"] = r.delta;
  j["delta_min"] = r.delta_min;
  j["r_ne"] = r.r_ne;
  j["states"] = Json::array();
  for (const auto& s : r.states) {
    j["states"].push_back({{"state", s.state},
                           {"cooperate", s.cooperate},
                           {"deviate_down", s.deviate_down},
                           {"deviate_up", s.deviate_up},
                           {"margin", s.margin},
                           {"margin_exact_reversion", s.margin_exact}});
  }
  j["reversion"] = Json::array();
  for (const auto& s : r.reversion) j["reversion"].push_back(to_json(s));
  j["pass"] = r.pass;
  return j;
}

/// Shortest decimal that round-trips, or "nan".
inline std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream ss;
  ss << std::setprecision(17) << x;
  return ss.str();
}

// ---------------------------------------------------------------------------
// Files and manifests.

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << x;
  return ss.str();
}

/// Writes to a sibling temporary and renames it into place.
inline void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp + "'");
    out << content;
    if (!out) throw ConfigError("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ConfigError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;

  Json to_json() const {
    return {{"command", command},       {"config_digest", config_digest},
            {"seed", seed},             {"version", version},
            {"started_at", started_at}, {"finished_at", finished_at},
            {"outputs", outputs}};
  }
};

}  // namespace specne
