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

// CORP T-reliability diagrams, PIT reliability diagrams and marginal
// reliability diagrams.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "corp/distributions.hpp"
#include "corp/errors.hpp"
#include "corp/functional.hpp"
#include "corp/pav.hpp"
#include "corp/scores.hpp"

namespace corp {

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Pointwise envelope; linear interpolation between `at` locations.
struct CurveBand {
  std::vector<double> at;
  std::vector<double> lower;
  std::vector<double> upper;
  double level = 0.0;
};

struct ReliabilityDiagram {
  /// (forecast value, recalibrated value), one per distinct forecast value.
  std::vector<CurvePoint> points;
  std::optional<CurveBand> band;
  Functional functional;
  ScoreDecomposition decomposition;
};

/// Piecewise-linear evaluation of a curve with nondecreasing x. Constant
/// beyond the end points; at repeated x the last point wins.
inline double interpolate(std::span<const CurvePoint> curve, double x) {
  if (curve.empty()) throw DomainError("empty curve");
  const auto it = std::upper_bound(curve.begin(), curve.end(), x,
                                   [](double v, const CurvePoint& p) { return v < p.x; });
  if (it == curve.begin()) return curve.front().y;
  if (it == curve.end()) return curve.back().y;
  const CurvePoint& l = *(it - 1);
  const CurvePoint& r = *it;
  if (l.x == x) return l.y;
  return l.y + (r.y - l.y) * ((x - l.x) / (r.x - l.x));
}

/// Band envelope evaluated at x by linear interpolation.
inline std::pair<double, double> band_at(const CurveBand& band, double x) {
  std::vector<CurvePoint> lo(band.at.size());
  std::vector<CurvePoint> hi(band.at.size());
  for (std::size_t k = 0; k < band.at.size(); ++k) {
    lo[k] = {band.at[k], band.lower[k]};
    hi[k] = {band.at[k], band.upper[k]};
  }
  return {interpolate(lo, x), interpolate(hi, x)};
}

/// Diagram points from an existing fit.
inline std::vector<CurvePoint> reliability_points(const IsotonicFit& fit) {
  std::vector<CurvePoint> pts;
  pts.reserve(fit.tie_groups.size());
  for (const IndexRange& g : fit.tie_groups) {
    pts.push_back({fit.sorted_x[g.begin], fit.fitted[g.begin]});
  }
  return pts;
}

inline ReliabilityDiagram reliability_diagram(std::span<const double> x,
                                              std::span<const double> y, const Functional& f) {
  const IsotonicFit fit = fit_isotonic(x, y, f);
  return ReliabilityDiagram{reliability_points(fit), std::nullopt, f, decompose(x, y, fit)};
}

namespace detail {
inline void check_pits(std::span<const double> pits) {
  if (pits.empty()) throw DomainError("empty input");
  for (double u : pits) {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("PIT value outside [0,1]");
  }
}
}  // namespace detail

/// Empirical CDF of the PIT values at 0, each distinct value, and 1.
inline std::vector<CurvePoint> pit_reliability(std::span<const double> pits) {
  detail::check_pits(pits);
  std::vector<double> u(pits.begin(), pits.end());
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  std::vector<CurvePoint> curve;
  if (u.front() > 0.0) curve.push_back({0.0, 0.0});
  for (std::size_t k = 0; k < u.size();) {
    std::size_t e = k + 1;
    while (e < u.size() && u[e] == u[k]) ++e;
    curve.push_back({u[k], static_cast<double>(e) / n});
    k = e;
  }
  if (curve.back().x < 1.0) curve.push_back({1.0, 1.0});
  return curve;
}

/// Kolmogorov-Smirnov distance between the empirical CDF of u and U(0,1).
inline double ks_uniform(std::span<const double> pits) {
  detail::check_pits(pits);
  std::vector<double> u(pits.begin(), pits.end());
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max({d, static_cast<double>(i + 1) / n - u[i], u[i] - static_cast<double>(i) / n});
  }
  return d;
}

/// Approximate 5% critical value of the one-sample KS statistic.
inline double ks_critical_value_05(std::size_t n) {
  const double r = std::sqrt(static_cast<double>(n));
  return 1.358 / (r + 0.12 + 0.11 / r);
}

/// Average forecast CDF (1/n) sum F_i(y).
inline double average_cdf(std::span<const Distribution> forecasts, double y) {
  double s = 0.0;
  for (const Distribution& d : forecasts) s += cdf(d, y);
  return std::clamp(s / static_cast<double>(forecasts.size()), 0.0, 1.0);
}

struct MarginalOptions {
  /// Extra equispaced evaluation points between the smallest and largest
  /// outcome, for smooth rendering. Zero evaluates at outcomes only.
  std::size_t grid = 0;
};

/// Points (average forecast CDF, outcome ECDF) at each distinct outcome.
inline std::vector<CurvePoint> marginal_reliability(std::span<const Distribution> forecasts,
                                                    std::span<const double> y,
                                                    MarginalOptions opt = {}) {
  if (forecasts.empty() || y.empty()) throw DomainError("empty input");
  if (forecasts.size() != y.size()) throw DomainError("forecasts and outcomes differ in length");
  std::vector<double> ys(y.begin(), y.end());
  for (double v : ys) {
    if (!std::isfinite(v)) throw DomainError("non-finite data");
  }
  std::sort(ys.begin(), ys.end());
  std::vector<double> at = ys;
  if (opt.grid > 1 && ys.back() > ys.front()) {
    for (std::size_t k = 0; k < opt.grid; ++k) {
      at.push_back(ys.front() + (ys.back() - ys.front()) * static_cast<double>(k) /
                                    static_cast<double>(opt.grid - 1));
    }
    std::sort(at.begin(), at.end());
  }
  at.erase(std::unique(at.begin(), at.end()), at.end());
  const double n = static_cast<double>(ys.size());
  std::vector<CurvePoint> curve;
  curve.reserve(at.size());
  for (double v : at) {
    const auto count = std::upper_bound(ys.begin(), ys.end(), v) - ys.begin();
    curve.push_back({average_cdf(forecasts, v), static_cast<double>(count) / n});
  }
  return curve;
}

}  // namespace corp
