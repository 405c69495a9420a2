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

// Penalty families g_i(price) and their inverses f_i(penalty).
//
// A channel in state i quoted at price x carries penalty g_i(x) for every
// secondary. Each g_i is strictly increasing and continuous on its price
// domain, and a higher state yields a lower penalty at the same price.

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "specne/errors.hpp"

namespace specne {

enum class PenaltyFamily {
  kShiftedAdditive,  // g_i(x) = h1(x) - h2(i), h2 tabulated
  kShiftCubic,       // g_i(x) = x - a i^3
  kQuadCubic,        // g_i(x) = x^2 - i^3, x >= 0
  kLinearRate,       // g_i(x) = x - (r_max - r_min) i / n
  kConstantRatio,    // g_i(x) = (x - s)^p / i, x >= s
  kLogExp,           // g_1(x) = x, g_2(x) = log x
};

/// Base curve h1 of the shifted-additive family.
enum class BaseCurve {
  kLinear,  // h1(x) = x
  kPower,   // h1(x) = x^r on x >= 0, r >= 1
  kExp,     // h1(x) = e^x
};

inline std::string_view family_name(PenaltyFamily family) {
  switch (family) {
    case PenaltyFamily::kShiftedAdditive: return "shifted_additive";
    case PenaltyFamily::kShiftCubic: return "shift_cubic";
    case PenaltyFamily::kQuadCubic: return "quad_cubic";
    case PenaltyFamily::kLinearRate: return "linear_rate";
    case PenaltyFamily::kConstantRatio: return "constant_ratio";
    case PenaltyFamily::kLogExp: return "log_exp";
  }
  return "unknown";
}

inline std::string_view base_curve_name(BaseCurve curve) {
  switch (curve) {
    case BaseCurve::kLinear: return "linear";
    case BaseCurve::kPower: return "power";
    case BaseCurve::kExp: return "exp";
  }
  return "unknown";
}

/// Lower end of a half-line domain; `open` excludes the endpoint itself.
struct DomainBound {
  double value = -std::numeric_limits<double>::infinity();
  bool open = false;

  bool admits(double x) const {
    if (std::isnan(x)) return false;
    return open ? x > value : x >= value;
  }
};

/// An immutable, parametric family {g_i, f_i}, i = 1..n.
///
/// States are 1-based throughout the library, matching the channel-state
/// numbering (state 0 is "not for sale" and has no penalty function).
class PenaltyModel {
 public:
  static PenaltyModel shift_cubic(int states, double a) {
    if (!(a > 0.0)) throw ConfigError("shift_cubic: parameter a must be > 0");
    PenaltyModel m(PenaltyFamily::kShiftCubic, states);
    m.a_ = a;
    m.fill_offsets([a](int i) { return a * i * i * i; });
    return m;
  }

  static PenaltyModel quad_cubic(int states) {
    PenaltyModel m(PenaltyFamily::kQuadCubic, states);
    m.fill_offsets([](int i) { return static_cast<double>(i) * i * i; });
    return m;
  }

  static PenaltyModel linear_rate(int states, double r_max, double r_min) {
    if (!(r_max > r_min)) {
      throw ConfigError("linear_rate: r_max must exceed r_min");
    }
    PenaltyModel m(PenaltyFamily::kLinearRate, states);
    m.r_max_ = r_max;
    m.r_min_ = r_min;
    m.fill_offsets([&](int i) { return (r_max - r_min) * i / states; });
    return m;
  }

  /// (x - shift)^exponent / i. Every pair of states has a constant profit
  /// ratio when `shift` equals the transaction cost.
  static PenaltyModel constant_ratio(int states, double exponent, double shift) {
    if (!(exponent > 0.0)) {
      throw ConfigError("constant_ratio: exponent p must be > 0");
    }
    PenaltyModel m(PenaltyFamily::kConstantRatio, states);
    m.exponent_ = exponent;
    m.shift_ = shift;
    return m;
  }

  static PenaltyModel log_exp() { return PenaltyModel(PenaltyFamily::kLogExp, 2); }

  /// h1(x) - h2[i-1]; `h2` must be strictly increasing.
  static PenaltyModel shifted_additive(BaseCurve h1, double exponent,
                                       std::vector<double> h2) {
    if (h2.empty()) throw ConfigError("shifted_additive: h2 table is empty");
    for (std::size_t i = 1; i < h2.size(); ++i) {
      if (!(h2[i] > h2[i - 1])) {
        throw ConfigError("shifted_additive: h2 must be strictly increasing");
      }
    }
    if (h1 == BaseCurve::kPower && !(exponent >= 1.0)) {
      throw ConfigError("shifted_additive: power exponent r must be >= 1");
    }
    PenaltyModel m(PenaltyFamily::kShiftedAdditive, static_cast<int>(h2.size()));
    m.curve_ = h1;
    m.exponent_ = exponent;
    m.offsets_ = std::move(h2);
    return m;
  }

  PenaltyFamily family() const { return family_; }
  int states() const { return states_; }

  double a() const { return a_; }
  double r_max() const { return r_max_; }
  double r_min() const { return r_min_; }
  double exponent() const { return exponent_; }
  double shift() const { return shift_; }
  BaseCurve base_curve() const { return curve_; }
  const std::vector<double>& offsets() const { return offsets_; }

  /// Prices at which g_state is defined.
  DomainBound price_domain(int state) const {
    check_state(state);
    switch (family_) {
      case PenaltyFamily::kQuadCubic: return {0.0, false};
      case PenaltyFamily::kConstantRatio: return {shift_, false};
      case PenaltyFamily::kLogExp:
        return state == 2 ? DomainBound{0.0, true} : DomainBound{};
      case PenaltyFamily::kShiftedAdditive:
        return curve_ == BaseCurve::kPower ? DomainBound{0.0, false} : DomainBound{};
      default: return {};
    }
  }

  /// Penalties at which f_state is defined (the range of g_state).
  DomainBound penalty_domain(int state) const {
    check_state(state);
    switch (family_) {
      case PenaltyFamily::kQuadCubic: return {-offset(state), false};
      case PenaltyFamily::kConstantRatio: return {0.0, false};
      case PenaltyFamily::kShiftedAdditive:
        if (curve_ == BaseCurve::kPower) return {-offset(state), false};
        if (curve_ == BaseCurve::kExp) return {-offset(state), true};
        return {};
      default: return {};
    }
  }

  /// g_state(price).
  double penalty(int state, double price) const {
    if (!price_domain(state).admits(price)) {
      throw DomainError("penalty: price " + std::to_string(price) +
                        " outside the domain of state " + std::to_string(state));
    }
    switch (family_) {
      case PenaltyFamily::kShiftCubic:
      case PenaltyFamily::kLinearRate:
        return price - offset(state);
      case PenaltyFamily::kQuadCubic:
        return price * price - offset(state);
      case PenaltyFamily::kConstantRatio:
        return std::pow(price - shift_, exponent_) / state;
      case PenaltyFamily::kLogExp:
        return state == 1 ? price : std::log(price);
      case PenaltyFamily::kShiftedAdditive:
        return base(price) - offset(state);
    }
    return 0.0;
  }

  /// f_state(penalty), the price that induces `penalty` in `state`.
  double price(int state, double penalty) const {
    if (!penalty_domain(state).admits(penalty)) {
      throw DomainError("price: penalty " + std::to_string(penalty) +
                        " outside the range of state " + std::to_string(state));
    }
    switch (family_) {
      case PenaltyFamily::kShiftCubic:
      case PenaltyFamily::kLinearRate:
        return penalty + offset(state);
      case PenaltyFamily::kQuadCubic:
        return std::sqrt(penalty + offset(state));
      case PenaltyFamily::kConstantRatio:
        return shift_ + std::pow(state * penalty, 1.0 / exponent_);
      case PenaltyFamily::kLogExp:
        return state == 1 ? penalty : std::exp(penalty);
      case PenaltyFamily::kShiftedAdditive:
        return base_inverse(penalty + offset(state));
    }
    return 0.0;
  }

  /// g_state(c), or the lower end of the penalty range when c lies at or
  /// below the price domain (e.g. log at 0 gives -inf).
  double penalty_floor(int state, double cost) const {
    DomainBound dom = price_domain(state);
    if (dom.admits(cost)) return penalty(state, cost);
    return penalty_domain(state).value;
  }

 private:
  PenaltyModel(PenaltyFamily family, int states) : family_(family), states_(states) {
    if (states < 1) throw ConfigError("penalty model needs at least one state");
  }

  template <typename F>
  void fill_offsets(F&& h2) {
    offsets_.resize(states_);
    for (int i = 1; i <= states_; ++i) offsets_[i - 1] = h2(i);
  }

  double offset(int state) const { return offsets_[state - 1]; }

  void check_state(int state) const {
    if (state < 1 || state > states_) {
      throw DomainError("state " + std::to_string(state) + " out of range 1.." +
                        std::to_string(states_));
    }
  }

  double base(double x) const {
    switch (curve_) {
      case BaseCurve::kLinear: return x;
      case BaseCurve::kPower: return std::pow(x, exponent_);
      case BaseCurve::kExp: return std::exp(x);
    }
    return x;
  }

  double base_inverse(double y) const {
    switch (curve_) {
      case BaseCurve::kLinear: return y;
      case BaseCurve::kPower: return std::pow(y, 1.0 / exponent_);
      case BaseCurve::kExp: return std::log(y);
    }
    return y;
  }

  PenaltyFamily family_;
  int states_;
  std::vector<double> offsets_;
  double a_ = 0.0;
  double r_max_ = 0.0;
  double r_min_ = 0.0;
  double exponent_ = 1.0;
  double shift_ = 0.0;
  BaseCurve curve_ = BaseCurve::kLinear;
};

}  // namespace specne
