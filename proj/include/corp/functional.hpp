// Copyright 2026 The corp Authors
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

// Identifiable functionals: identification functions, canonical and
// elementary losses, and exact evaluation on weighted empirical measures.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corp/errors.hpp"
#include "corp/exact_sum.hpp"

namespace corp {

enum class FunctionalKind {
  Mean,
  Quantile,
  Expectile,
  Moment,
  ThresholdNonExceedance,
  Huber,
};

/// Endpoint of an interval-valued functional. Ignored by singleton kinds.
enum class Side { Lower, Upper };

/// A statistical functional T together with its parameters.
///
/// Instances are built through the named factories, which enforce the
/// parameter domains (alpha in (0,1), order >= 1, a > 0, b > 0).
class Functional {
 public:
  static Functional mean() { return Functional(FunctionalKind::Mean); }

  static Functional quantile(double alpha, Side side = Side::Lower) {
    Functional f(FunctionalKind::Quantile);
    f.alpha_ = check_level(alpha);
    f.side_ = side;
    return f;
  }

  static Functional expectile(double alpha) {
    Functional f(FunctionalKind::Expectile);
    f.alpha_ = check_level(alpha);
    return f;
  }

  static Functional moment(int order) {
    if (order < 1) throw DomainError("moment order must be a positive integer");
    Functional f(FunctionalKind::Moment);
    f.order_ = order;
    return f;
  }

  static Functional threshold(double t) {
    if (!std::isfinite(t)) throw DomainError("threshold must be finite");
    Functional f(FunctionalKind::ThresholdNonExceedance);
    f.threshold_ = t;
    return f;
  }

  static Functional huber(double alpha, double a, double b,
                          Side side = Side::Lower) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
      throw DomainError("huber clipping parameters must be positive");
    }
    Functional f(FunctionalKind::Huber);
    f.alpha_ = check_level(alpha);
    f.a_ = a;
    f.b_ = b;
    f.side_ = side;
    return f;
  }

  [[nodiscard]] FunctionalKind kind() const { return kind_; }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] double threshold() const { return threshold_; }
  [[nodiscard]] double clip_lower() const { return a_; }
  [[nodiscard]] double clip_upper() const { return b_; }
  [[nodiscard]] Side side() const { return side_; }

  [[nodiscard]] bool is_interval_type() const {
    return kind_ == FunctionalKind::Quantile || kind_ == FunctionalKind::Huber;
  }

  /// True when V(x, y) = v(x - y); these admit translation recalibration.
  [[nodiscard]] bool has_prediction_error_form() const {
    switch (kind_) {
      case FunctionalKind::Mean:
      case FunctionalKind::Quantile:
      case FunctionalKind::Expectile:
      case FunctionalKind::Huber:
        return true;
      case FunctionalKind::Moment:
        return order_ == 1;
      case FunctionalKind::ThresholdNonExceedance:
        return false;
    }
    return false;
  }

  [[nodiscard]] Functional with_side(Side side) const {
    Functional f = *this;
    if (is_interval_type()) f.side_ = side;
    return f;
  }

  /// T(delta_y), the functional of a point mass.
  [[nodiscard]] double point_value(double y) const {
    switch (kind_) {
      case FunctionalKind::Moment:
        return power(y);
      case FunctionalKind::ThresholdNonExceedance:
        return y <= threshold_ ? 1.0 : 0.0;
      default:
        return y;
    }
  }

  /// Outcome transform that reduces Moment and threshold kinds to the mean.
  [[nodiscard]] double power(double y) const {
    return order_ == 1 ? y : std::pow(y, static_cast<double>(order_));
  }

  /// True for kinds evaluated as a weighted mean of transformed outcomes.
  [[nodiscard]] bool reduces_to_mean() const {
    return kind_ == FunctionalKind::Mean || kind_ == FunctionalKind::Moment ||
           kind_ == FunctionalKind::ThresholdNonExceedance;
  }

  friend bool operator==(const Functional&, const Functional&) = default;

 private:
  explicit Functional(FunctionalKind kind) : kind_(kind) {}

  static double check_level(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw DomainError("probability level must lie strictly inside (0,1)");
    }
    return alpha;
  }

  FunctionalKind kind_;
  double alpha_ = 0.5;
  int order_ = 1;
  double threshold_ = 0.0;
  double a_ = 1.0;
  double b_ = 1.0;
  Side side_ = Side::Lower;
};

/// kappa_{a,b}(t) = max(min(t, b), -a).
inline double clip(double t, double a, double b) {
  return std::max(std::min(t, b), -a);
}

/// Identification function V(x, y).
inline double identification(const Functional& f, double x, double y) {
  switch (f.kind()) {
    case FunctionalKind::Mean:
      return x - y;
    case FunctionalKind::Quantile:
      return (y < x ? 1.0 : 0.0) - f.alpha();
    case FunctionalKind::Expectile:
      return std::fabs((y < x ? 1.0 : 0.0) - f.alpha()) * (x - y);
    case FunctionalKind::Moment:
      return x - f.power(y);
    case FunctionalKind::ThresholdNonExceedance:
      return x - (y <= f.threshold() ? 1.0 : 0.0);
    case FunctionalKind::Huber:
      return std::fabs((y < x ? 1.0 : 0.0) - f.alpha()) *
             clip(x - y, f.clip_lower(), f.clip_upper());
  }
  return 0.0;
}

/// Canonical (Lebesgue-mixture) loss S(x, y) for the functional.
inline double canonical_loss(const Functional& f, double x, double y) {
  switch (f.kind()) {
    case FunctionalKind::Mean:
    case FunctionalKind::Moment: {
      const double d = x - f.power(y);
      return d * d;
    }
    case FunctionalKind::Expectile: {
      const double d = x - y;
      return 2.0 * std::fabs((x >= y ? 1.0 : 0.0) - f.alpha()) * d * d;
    }
    case FunctionalKind::Quantile:
      return 2.0 * ((x >= y ? 1.0 : 0.0) - f.alpha()) * (x - y);
    case FunctionalKind::ThresholdNonExceedance: {
      if (!(x >= 0.0 && x <= 1.0)) throw DomainError("probability out of range");
      const double d = x - (y <= f.threshold() ? 1.0 : 0.0);
      return d * d;
    }
    case FunctionalKind::Huber: {
      const double d = x - y;
      const double a = f.clip_lower();
      const double b = f.clip_upper();
      double core;
      if (d < -a) {
        core = 2.0 * a * std::fabs(d) - a * a;
      } else if (d > b) {
        core = 2.0 * b * std::fabs(d) - b * b;
      } else {
        core = d * d;
      }
      return 2.0 * std::fabs((x >= y ? 1.0 : 0.0) - f.alpha()) * core;
    }
  }
  return 0.0;
}

/// Elementary score S_eta(x, y) = (1{eta <= x} - 1{eta <= T(delta_y)}) V(eta, y).
///
/// For Moment and threshold kinds the indicator compares against the
/// transformed outcome T(delta_y); for the remaining kinds T(delta_y) = y.
inline double elementary_score(const Functional& f, double eta, double x,
                               double y) {
  const double z = f.point_value(y);
  const double step = (eta <= x ? 1.0 : 0.0) - (eta <= z ? 1.0 : 0.0);
  if (step == 0.0) return 0.0;
  return step * identification(f, eta, y);
}

/// Weighted multiset of outcomes in ascending order.
class SortedSample {
 public:
  SortedSample() = default;

  /// Unit-weight sample; values are sorted on construction.
  explicit SortedSample(std::vector<double> values) : values_(std::move(values)) {
    std::sort(values_.begin(), values_.end());
    weights_.assign(values_.size(), 1.0);
    check();
  }

  /// Weighted sample; (value, weight) pairs are sorted by value.
  SortedSample(std::vector<double> values, std::vector<double> weights) {
    if (values.size() != weights.size()) {
      throw DomainError("sample values and weights differ in length");
    }
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    values_.reserve(idx.size());
    weights_.reserve(idx.size());
    for (std::size_t i : idx) {
      values_.push_back(values[i]);
      weights_.push_back(weights[i]);
    }
    check();
  }

  /// Adopts already-sorted unit-weight values without re-sorting.
  static SortedSample from_sorted(std::vector<double> values) {
    SortedSample s;
    s.values_ = std::move(values);
    s.weights_.assign(s.values_.size(), 1.0);
    if (!std::is_sorted(s.values_.begin(), s.values_.end())) {
      throw DomainError("sample values are not sorted");
    }
    s.check();
    return s;
  }

  static SortedSample merge(const SortedSample& lhs, const SortedSample& rhs) {
    SortedSample out;
    out.values_.resize(lhs.size() + rhs.size());
    out.weights_.resize(lhs.size() + rhs.size());
    std::size_t i = 0, j = 0, k = 0;
    while (i < lhs.size() || j < rhs.size()) {
      if (j == rhs.size() || (i < lhs.size() && lhs.values_[i] <= rhs.values_[j])) {
        out.values_[k] = lhs.values_[i];
        out.weights_[k++] = lhs.weights_[i++];
      } else {
        out.values_[k] = rhs.values_[j];
        out.weights_[k++] = rhs.weights_[j++];
      }
    }
    return out;
  }

  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::span<const double> weights() const { return weights_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool empty() const { return values_.empty(); }

  [[nodiscard]] double total_weight() const {
    ExactSum s;
    for (double w : weights_) s.add(w);
    return s.value();
  }

 private:
  void check() const {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) throw DomainError("non-finite data");
      if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
        throw DomainError("sample weights must be positive");
      }
    }
  }

  std::vector<double> values_;
  std::vector<double> weights_;
};

namespace detail {

inline double weighted_transformed_mean(const Functional& f, const SortedSample& s) {
  ExactSum num;
  ExactSum den;
  const auto v = s.values();
  const auto w = s.weights();
  for (std::size_t i = 0; i < v.size(); ++i) {
    num.add_product(w[i], f.point_value(v[i]));
    den.add(w[i]);
  }
  return num.value() / den.value();
}

inline double weighted_quantile(double alpha, Side side, const SortedSample& s) {
  const auto v = s.values();
  const auto w = s.weights();
  const double level = alpha * s.total_weight();
  double cum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    cum += w[i];
    // Only the last copy of a tied value carries the full step of F.
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
    const bool hit = side == Side::Lower ? cum >= level : cum > level;
    if (hit) return v[i];
  }
  return v.back();
}

// Unique root of sum_i w_i |1{y_i < x} - alpha| (x - y_i), by a sorted scan.
inline double weighted_expectile(double alpha, const SortedSample& s) {
  const auto v = s.values();
  const auto w = s.weights();
  const std::size_t n = v.size();
  double total_w = 0.0;
  double total_s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total_w += w[i];
    total_s += w[i] * v[i];
  }
  // G(x) with L = points strictly below x: (1-a)(W_L x - S_L) + a(W_R x - S_R).
  auto eval = [&](double x, double wl, double sl) {
    return (1.0 - alpha) * (wl * x - sl) + alpha * ((total_w - wl) * x - (total_s - sl));
  };
  double wl = 0.0;
  double sl = 0.0;
  std::size_t i = 0;
  double prev = v[0];
  if (eval(prev, 0.0, 0.0) >= 0.0) return prev;
  while (true) {
    // Absorb every copy of the current distinct value into L.
    while (i < n && v[i] == prev) {
      wl += w[i];
      sl += w[i] * v[i];
      ++i;
    }
    if (i == n) return prev;
    const double next = v[i];
    const double g_next = eval(next, wl, sl);
    if (g_next >= 0.0) {
      if (g_next == 0.0) return next;
      const double root = ((1.0 - alpha) * sl + alpha * (total_s - sl)) /
                          ((1.0 - alpha) * wl + alpha * (total_w - wl));
      return std::clamp(root, prev, next);
    }
    prev = next;
  }
}

inline double huber_identification_sum(const Functional& f, const SortedSample& s,
                                       double x) {
  const auto v = s.values();
  const auto w = s.weights();
  double g = 0.0;
  double mag = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double t = w[i] * identification(f, x, v[i]);
    g += t;
    mag += std::fabs(t);
  }
  // Saturated terms can cancel exactly; keep rounding residue off the plateau.
  if (std::fabs(g) <= 64.0 * std::numeric_limits<double>::epsilon() * mag) return 0.0;
  return g;
}

// Boundary root of the continuous piecewise-linear Huber identification sum.
// Lower: smallest root (sup{x : G(x) < 0}); upper: largest root (inf{x : G(x) > 0}).
inline double weighted_huber(const Functional& f, const SortedSample& s) {
  const auto v = s.values();
  std::vector<double> knots;
  knots.reserve(3 * v.size());
  for (double y : v) {
    knots.push_back(y - f.clip_lower());
    knots.push_back(y);
    knots.push_back(y + f.clip_upper());
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  const bool lower = f.side() == Side::Lower;
  auto crosses = [&](double g) { return lower ? g >= 0.0 : g > 0.0; };
  // First knot index where G crosses; G(last knot) > 0 always.
  std::size_t lo = 0;
  std::size_t hi = knots.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (crosses(huber_identification_sum(f, s, knots[mid]))) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const double g_hi = huber_identification_sum(f, s, knots[lo]);
  if (lo == 0) return knots[0];
  const double g_lo = huber_identification_sum(f, s, knots[lo - 1]);
  if (lower && g_hi == 0.0) return knots[lo];
  if (!lower && g_lo == 0.0) return knots[lo - 1];
  const double t = -g_lo / (g_hi - g_lo);
  return std::clamp(knots[lo - 1] + t * (knots[lo] - knots[lo - 1]), knots[lo - 1],
                    knots[lo]);
}

}  // namespace detail

/// T^-(s) or T^+(s), per f.side(), of the empirical measure s.
inline double eval_functional(const Functional& f, const SortedSample& s) {
  if (s.empty()) throw DomainError("empty empirical measure");
  const auto v = s.values();
  if (v.front() == v.back()) return f.point_value(v.front());
  switch (f.kind()) {
    case FunctionalKind::Mean:
    case FunctionalKind::Moment:
    case FunctionalKind::ThresholdNonExceedance:
      return detail::weighted_transformed_mean(f, s);
    case FunctionalKind::Quantile:
      return detail::weighted_quantile(f.alpha(), f.side(), s);
    case FunctionalKind::Expectile:
      return detail::weighted_expectile(f.alpha(), s);
    case FunctionalKind::Huber:
      return detail::weighted_huber(f, s);
  }
  return 0.0;
}

// ---- compact string grammar --------------------------------------------

namespace detail {

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline double parse_number(std::string_view token, std::string_view context) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (token.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError("invalid number '" + std::string(token) + "' in functional '" +
                     std::string(context) + "'");
  }
  return value;
}

inline Side parse_side(std::string_view token, std::string_view context) {
  if (token == "lower") return Side::Lower;
  if (token == "upper") return Side::Upper;
  throw ParseError("expected 'lower' or 'upper' in functional '" + std::string(context) +
                   "'");
}

}  // namespace detail

/// Parses "mean", "quantile:0.75[:upper]", "expectile:0.5", "moment:2",
/// "threshold:2.0" and "huber:alpha:a:b[:upper]".
inline Functional parse_functional(std::string_view text) {
  const auto parts = detail::split(text, ':');
  const std::string_view name = parts[0];
  auto expect_args = [&](std::size_t lo, std::size_t hi) {
    const std::size_t got = parts.size() - 1;
    if (got < lo || got > hi) {
      throw ParseError("wrong number of parameters in functional '" + std::string(text) +
                       "'");
    }
  };
  try {
    if (name == "mean") {
      expect_args(0, 0);
      return Functional::mean();
    }
    if (name == "median") {
      expect_args(0, 1);
      const Side side = parts.size() == 2 ? detail::parse_side(parts[1], text) : Side::Lower;
      return Functional::quantile(0.5, side);
    }
    if (name == "quantile") {
      expect_args(1, 2);
      const Side side = parts.size() == 3 ? detail::parse_side(parts[2], text) : Side::Lower;
      return Functional::quantile(detail::parse_number(parts[1], text), side);
    }
    if (name == "expectile") {
      expect_args(1, 1);
      return Functional::expectile(detail::parse_number(parts[1], text));
    }
    if (name == "moment") {
      expect_args(1, 1);
      const double order = detail::parse_number(parts[1], text);
      if (order != std::floor(order) || order < 1.0 || order > 1.0e6) {
        throw ParseError("moment order must be a positive integer in '" +
                         std::string(text) + "'");
      }
      return Functional::moment(static_cast<int>(order));
    }
    if (name == "threshold") {
      expect_args(1, 1);
      return Functional::threshold(detail::parse_number(parts[1], text));
    }
    if (name == "huber") {
      expect_args(3, 4);
      const Side side = parts.size() == 5 ? detail::parse_side(parts[4], text) : Side::Lower;
      return Functional::huber(detail::parse_number(parts[1], text),
                               detail::parse_number(parts[2], text),
                               detail::parse_number(parts[3], text), side);
    }
  } catch (const DomainError& e) {
    throw ParseError(std::string(e.what()) + " in functional '" + std::string(text) + "'");
  }
  throw ParseError("unknown functional '" + std::string(text) + "'");
}

namespace detail {
inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}
}  // namespace detail

/// Inverse of parse_functional (round-trips every parseable string).
inline std::string to_string(const Functional& f) {
  using detail::format_number;
  const std::string side = f.side() == Side::Upper ? ":upper" : "";
  switch (f.kind()) {
    case FunctionalKind::Mean:
      return "mean";
    case FunctionalKind::Quantile:
      return "quantile:" + format_number(f.alpha()) + side;
    case FunctionalKind::Expectile:
      return "expectile:" + format_number(f.alpha());
    case FunctionalKind::Moment:
      return "moment:" + std::to_string(f.order());
    case FunctionalKind::ThresholdNonExceedance:
      return "threshold:" + format_number(f.threshold());
    case FunctionalKind::Huber:
      return "huber:" + format_number(f.alpha()) + ":" + format_number(f.clip_lower()) +
             ":" + format_number(f.clip_upper()) + side;
  }
  return "";
}

/// Short label of the canonical score, as used in diagram annotations.
inline std::string score_label(const Functional& f) {
  switch (f.kind()) {
    case FunctionalKind::Mean:
      return "MSE";
    case FunctionalKind::Quantile:
      return "QS";
    case FunctionalKind::Expectile:
      return "ES";
    case FunctionalKind::Moment:
      return "MSE";
    case FunctionalKind::ThresholdNonExceedance:
      return "BS";
    case FunctionalKind::Huber:
      return "HS";
  }
  return "S";
}

}  // namespace corp
