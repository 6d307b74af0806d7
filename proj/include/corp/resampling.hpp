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

// Monte Carlo consistency resamples, bands and calibration p-values.
//
// Seeding: surrogate outcome i of replicate j is drawn from
// RandomStream(seed, j, i), so every result is a pure function of the inputs
// and the seed.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "corp/diagrams.hpp"
#include "corp/distributions.hpp"
#include "corp/errors.hpp"
#include "corp/functional.hpp"
#include "corp/pav.hpp"
#include "corp/random.hpp"
#include "corp/scores.hpp"

namespace corp {

enum class Hypothesis { Auto, Residual };

inline const char* to_string(Hypothesis h) { return h == Hypothesis::Auto ? "auto" : "residual"; }

struct ResampleSet {
  std::vector<double> x;
  std::vector<std::vector<double>> replicates;
  Hypothesis hypothesis = Hypothesis::Auto;
  std::uint64_t seed = 0;
};

namespace detail {
inline void check_resamples(std::size_t m, std::size_t at_least) {
  if (m < at_least) {
    throw DomainError(at_least == 1 ? "at least one resample required"
                                    : "at least two resamples required");
  }
}

inline void check_level(double level) {
  if (!(level > 0.0 && level <= 1.0)) throw DomainError("band level must lie in (0,1]");
}

// Rank of the lower envelope order statistic (1-based) for coverage level.
inline std::size_t envelope_rank(double level, std::size_t m) {
  const double q = 0.5 * (1.0 - level);
  const double r = std::ceil(q * static_cast<double>(m) - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::max(r, 0.0)));
}

// Pointwise envelope of m curves sampled at common locations.
inline CurveBand envelope(std::vector<double> at, const std::vector<std::vector<double>>& curves,
                          double level) {
  const std::size_t m = curves.size();
  const std::size_t k = envelope_rank(level, m);
  CurveBand band{std::move(at), {}, {}, level};
  band.lower.resize(band.at.size());
  band.upper.resize(band.at.size());
  std::vector<double> column(m);
  for (std::size_t p = 0; p < band.at.size(); ++p) {
    for (std::size_t j = 0; j < m; ++j) column[j] = curves[j][p];
    std::sort(column.begin(), column.end());
    band.lower[p] = column[k - 1];
    band.upper[p] = column[m - k];
  }
  return band;
}
}  // namespace detail

/// Surrogate outcomes under auto-calibration: each replicate redraws y_i from F_i.
inline ResampleSet resample_auto(std::span<const Distribution> forecasts, const Functional& f,
                                 std::size_t m, std::uint64_t seed) {
  detail::check_resamples(m, 1);
  if (forecasts.empty()) throw DomainError("empty input");
  ResampleSet rs;
  rs.hypothesis = Hypothesis::Auto;
  rs.seed = seed;
  rs.x.reserve(forecasts.size());
  for (const Distribution& d : forecasts) rs.x.push_back(functional_of(d, f));
  rs.replicates.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    auto& rep = rs.replicates[j];
    rep.resize(forecasts.size());
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
      RandomStream rng(seed, j, i);
      rep[i] = sample(forecasts[i], rng);
    }
  }
  return rs;
}

/// Surrogate outcomes under T-calibration with forecast-independent
/// residuals: y~_i = x_i + r~_i - c_hat, r~ drawn with replacement.
inline ResampleSet resample_residual(std::span<const double> x, std::span<const double> y,
                                     const Functional& f, std::size_t m, std::uint64_t seed) {
  detail::check_resamples(m, 1);
  const double c = unconditional_shift(x, y, f);
  const std::size_t n = x.size();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = y[i] - x[i];
  ResampleSet rs;
  rs.hypothesis = Hypothesis::Residual;
  rs.seed = seed;
  rs.x.assign(x.begin(), x.end());
  rs.replicates.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    auto& rep = rs.replicates[j];
    rep.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      RandomStream rng(seed, j, i);
      rep[i] = x[i] + r[uniform_index(rng, n)] - c;
    }
  }
  return rs;
}

/// Consistency band for the reliability curve at the distinct forecast values.
inline CurveBand consistency_band(const ResampleSet& rs, const Functional& f, double level) {
  detail::check_resamples(rs.replicates.size(), 2);
  detail::check_level(level);
  std::vector<double> at;
  std::vector<std::vector<double>> curves;
  curves.reserve(rs.replicates.size());
  for (const auto& rep : rs.replicates) {
    const IsotonicFit fit = fit_isotonic(rs.x, rep, f);
    if (at.empty()) {
      for (const IndexRange& g : fit.tie_groups) at.push_back(fit.sorted_x[g.begin]);
    }
    std::vector<double> curve;
    curve.reserve(fit.tie_groups.size());
    for (const IndexRange& g : fit.tie_groups) curve.push_back(fit.fitted[g.begin]);
    curves.push_back(std::move(curve));
  }
  return detail::envelope(std::move(at), curves, level);
}

/// 1 - r/(m+1), r = #{resampled <= observed}.
inline double mc_pvalue(double observed, std::span<const double> resampled) {
  if (resampled.empty()) throw DomainError("at least one resample required");
  const auto r = std::count_if(resampled.begin(), resampled.end(),
                               [&](double v) { return v <= observed; });
  return 1.0 - static_cast<double>(r) / static_cast<double>(resampled.size() + 1);
}

struct CalibrationTest {
  double observed_mcb = 0.0;
  std::vector<double> resampled_mcb;
  double p_value = 1.0;
  Hypothesis hypothesis = Hypothesis::Auto;
};

/// MCB test of observed forecasts x and outcomes y against resamples rs.
inline CalibrationTest mcb_test(std::span<const double> y, const ResampleSet& rs,
                                const Functional& f) {
  CalibrationTest t;
  t.hypothesis = rs.hypothesis;
  t.observed_mcb = decompose(rs.x, y, f).mcb;
  t.resampled_mcb.reserve(rs.replicates.size());
  for (const auto& rep : rs.replicates) t.resampled_mcb.push_back(decompose(rs.x, rep, f).mcb);
  t.p_value = mc_pvalue(t.observed_mcb, t.resampled_mcb);
  return t;
}

/// Empirical quantile of v by the same order-statistic rule as the bands.
inline double order_statistic_quantile(std::vector<double> v, double p) {
  if (v.empty()) throw DomainError("empty input");
  std::sort(v.begin(), v.end());
  const double r = std::ceil(p * static_cast<double>(v.size()) - 1e-9);
  const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(r, 1.0)), 1, v.size());
  return v[k - 1];
}

/// Equispaced grid of 101 points on [0, 1].
inline std::vector<double> unit_grid() {
  std::vector<double> g(101);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = static_cast<double>(k) / 100.0;
  return g;
}

/// Band for the PIT reliability curve of n ideal PIT values.
inline CurveBand pit_band(std::size_t n, std::size_t m, double level, std::uint64_t seed) {
  detail::check_resamples(m, 2);
  detail::check_level(level);
  if (n == 0) throw DomainError("empty input");
  std::vector<double> grid = unit_grid();
  std::vector<std::vector<double>> curves(m, std::vector<double>(grid.size()));
  std::vector<double> u(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      RandomStream rng(seed, j, i);
      u[i] = uniform_open(rng);
    }
    std::sort(u.begin(), u.end());
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const auto c = std::upper_bound(u.begin(), u.end(), grid[p]) - u.begin();
      curves[j][p] = static_cast<double>(c) / static_cast<double>(n);
    }
  }
  return detail::envelope(std::move(grid), curves, level);
}

/// Band for the marginal reliability curve, resampling outcomes from the
/// average forecast CDF. Replicate curves are interpolated on a 101-point
/// grid of average-CDF values, anchored at (0,0) and (1,1).
inline CurveBand marginal_band(std::span<const Distribution> forecasts, std::size_t m,
                               double level, std::uint64_t seed) {
  detail::check_resamples(m, 2);
  detail::check_level(level);
  if (forecasts.empty()) throw DomainError("empty input");
  const std::size_t n = forecasts.size();
  std::vector<double> grid = unit_grid();
  std::vector<std::vector<double>> curves(m, std::vector<double>(grid.size()));
  std::vector<double> ys(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      RandomStream rng(seed, j, i);
      ys[i] = sample(forecasts[uniform_index(rng, n)], rng);
    }
    std::vector<CurvePoint> curve{{0.0, 0.0}};
    const auto body = marginal_reliability(forecasts, ys);
    curve.insert(curve.end(), body.begin(), body.end());
    curve.push_back({1.0, 1.0});
    for (std::size_t p = 0; p < grid.size(); ++p) curves[j][p] = interpolate(curve, grid[p]);
  }
  return detail::envelope(std::move(grid), curves, level);
}

}  // namespace corp
