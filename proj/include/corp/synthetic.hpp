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

// Synthetic forecast scenarios, the nine-point regression toy data and the
// two line fitters used with it.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corp/distributions.hpp"
#include "corp/errors.hpp"
#include "corp/exact_sum.hpp"
#include "corp/random.hpp"

namespace corp {

enum class ScenarioKind { Perfect, Unconditional, Unfocused, Lopsided, PiecewiseUniform };

/// Latent mu ~ N(0,1) (N(0,c^2) for piecewise_uniform), outcome drawn from
/// the scenario's true conditional law.
struct Scenario {
  ScenarioKind kind = ScenarioKind::Perfect;
  double eta0 = 1.5;
  double delta0 = 0.7;
  double c = 0.5;

  static Scenario perfect() { return {ScenarioKind::Perfect}; }
  static Scenario unconditional() { return {ScenarioKind::Unconditional}; }
  static Scenario unfocused(double eta0) {
    if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw DomainError("eta0 must be positive");
    return {ScenarioKind::Unfocused, eta0};
  }
  static Scenario lopsided(double delta0) {
    if (!(delta0 > 0.0 && delta0 < 1.0)) throw DomainError("delta0 must lie in (0,1)");
    return {ScenarioKind::Lopsided, 1.5, delta0};
  }
  static Scenario piecewise_uniform(double c = 0.5) {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("c must be positive");
    return {ScenarioKind::PiecewiseUniform, 1.5, 0.7, c};
  }
};

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Perfect: return "perfect";
    case ScenarioKind::Unconditional: return "unconditional";
    case ScenarioKind::Unfocused: return "unfocused";
    case ScenarioKind::Lopsided: return "lopsided";
    case ScenarioKind::PiecewiseUniform: return "piecewise_uniform";
  }
  return "?";
}

struct ForecastCase {
  Distribution forecast;
  double y = 0.0;
};

namespace detail {
// Stream tag separating scenario draws from resampling draws.
inline constexpr std::uint64_t kScenarioStream = 0x5CE7A410ULL;

inline constexpr std::array<std::array<double, 3>, 3> kUniformForecastWeights{{
    {0.5, 0.25, 0.25}, {0.25, 0.5, 0.25}, {0.25, 0.25, 0.5}}};
inline constexpr std::array<std::array<double, 3>, 3> kUniformOutcomeWeights{{
    {0.5, 0.1, 0.4}, {0.1, 0.8, 0.1}, {0.4, 0.1, 0.5}}};
}  // namespace detail

/// n forecast-outcome cases; case i depends only on (seed, i).
inline std::vector<ForecastCase> gen_scenario(const Scenario& s, std::size_t n,
                                              std::uint64_t seed) {
  if (n == 0) throw DomainError("n must be positive");
  std::vector<ForecastCase> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(seed, detail::kScenarioStream, i);
    auto normal = [&] { return std_normal_quantile(uniform_open(rng)); };
    auto sign = [&] { return uniform_open(rng) < 0.5 ? -1.0 : 1.0; };
    switch (s.kind) {
      case ScenarioKind::Perfect: {
        const double mu = normal();
        out.push_back({Distribution::normal(mu, 1.0), mu + normal()});
        break;
      }
      case ScenarioKind::Unconditional: {
        const double mu = normal();
        out.push_back({Distribution::normal(0.0, std::sqrt(2.0)), mu + normal()});
        break;
      }
      case ScenarioKind::Unfocused: {
        const double mu = normal();
        const double eta = sign() * s.eta0;
        out.push_back({Distribution::normal_mixture({0.5, 0.5}, {mu, mu + eta}, {1.0, 1.0}),
                       mu + normal()});
        break;
      }
      case ScenarioKind::Lopsided: {
        const double mu = normal();
        const double delta = sign() * s.delta0;
        out.push_back({Distribution::lopsided(mu, delta), mu + normal()});
        break;
      }
      case ScenarioKind::PiecewiseUniform: {
        const double mu = s.c * normal();
        const auto idx = uniform_index(rng, 3);
        const std::vector<double> breaks{mu, mu + 1.0, mu + 2.0, mu + 3.0};
        const auto& p = detail::kUniformForecastWeights[idx];
        const auto& q = detail::kUniformOutcomeWeights[idx];
        const Distribution truth = Distribution::uniform_mixture({q[0], q[1], q[2]}, breaks);
        const double y = sample(truth, rng);
        out.push_back({Distribution::uniform_mixture({p[0], p[1], p[2]}, breaks), y});
        break;
      }
    }
  }
  return out;
}

struct XYData {
  std::vector<double> x;
  std::vector<double> y;
};

/// Nine-point regression toy data set.
inline XYData kvalseth_data() {
  return {{1, 2, 4, 6, 8, 10, 11, 12, 14}, {4, 5, 6, 9, 10, 11, 13, 8, 15}};
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;

  [[nodiscard]] double operator()(double x) const { return intercept + slope * x; }
  [[nodiscard]] std::vector<double> predict(std::span<const double> x) const {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (*this)(x[i]);
    return out;
  }
};

namespace detail {
inline void check_regression_input(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("x and y differ in length");
  if (x.size() < 2) throw DomainError("at least two points required");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw DomainError("non-finite data");
  }
  for (double v : x) {
    if (v != x[0]) return;
  }
  throw DomainError("degenerate x: all values equal");
}
}  // namespace detail

/// Least-squares line via the normal equations.
inline LineFit fit_ols(std::span<const double> x, std::span<const double> y) {
  detail::check_regression_input(x, y);
  const double mx = exact_mean(x);
  const double my = exact_mean(y);
  ExactSum sxy;
  ExactSum sxx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy.add_product(x[i] - mx, y[i] - my);
    sxx.add_product(x[i] - mx, x[i] - mx);
  }
  const double slope = sxy.value() / sxx.value();
  return {slope, my - slope * mx};
}

/// Least-absolute-deviation line. Some minimizer passes through two data
/// points, so all such lines are scored; among (near-)tied minimizers the
/// largest slope is returned.
inline LineFit fit_lad(std::span<const double> x, std::span<const double> y) {
  detail::check_regression_input(x, y);
  const std::size_t n = x.size();
  struct Candidate {
    LineFit line;
    double loss;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (x[i] == x[j]) continue;
      const double slope = (y[j] - y[i]) / (x[j] - x[i]);
      const LineFit line{slope, y[i] - slope * x[i]};
      ExactSum loss;
      for (std::size_t k = 0; k < n; ++k) loss.add(std::fabs(y[k] - line(x[k])));
      cands.push_back({line, loss.value()});
    }
  }
  double best = HUGE_VAL;
  for (const Candidate& c : cands) best = std::min(best, c.loss);
  const double tol = 1e-9 * std::max(1.0, best);
  const Candidate* pick = nullptr;
  for (const Candidate& c : cands) {
    if (c.loss <= best + tol && (pick == nullptr || c.line.slope > pick->line.slope)) pick = &c;
  }
  return pick->line;
}

}  // namespace corp
