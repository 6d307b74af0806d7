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

// CORP score decompositions: mean score = MCB - DSC + UNC.

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "corp/errors.hpp"
#include "corp/exact_sum.hpp"
#include "corp/functional.hpp"
#include "corp/pav.hpp"

namespace corp {

struct ScoreDecomposition {
  double mean_score = 0.0;          ///< mean canonical loss of the forecasts
  double score_recalibrated = 0.0;  ///< ... of the PAV-recalibrated forecasts
  double score_marginal = 0.0;      ///< ... of the constant T(outcomes)
  double mcb = 0.0;
  double dsc = 0.0;
  double unc = 0.0;
  std::optional<double> mcb_uncond;
  std::optional<double> mcb_cond;
  std::optional<double> shift_c;
  std::optional<double> r_star;
  double marginal_value = 0.0;  ///< x_hat_0
};

namespace detail {

template <class Fn>
double mean_loss(std::size_t n, Fn&& loss_at) {
  ExactSum s;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = loss_at(i);
    if (!std::isfinite(l)) throw DomainError("non-finite loss");
    s.add(l);
  }
  return s.value() / static_cast<double>(n);
}

}  // namespace detail

/// (DSC - MCB) / UNC: the skill score out of sample, R* in sample.
inline double skill_and_rstar(const ScoreDecomposition& d) {
  if (!std::isfinite(d.unc)) throw DomainError("non-finite uncertainty");
  if (!(d.unc > 0.0)) throw DomainError("degenerate uncertainty");
  return (d.dsc - d.mcb) / d.unc;
}

/// Decomposition from an existing isotonic fit of the same data.
inline ScoreDecomposition decompose(std::span<const double> x, std::span<const double> y,
                                    const IsotonicFit& fit) {
  const Functional& f = fit.functional;
  const std::size_t n = x.size();
  ScoreDecomposition d;
  d.marginal_value = eval_functional(f, SortedSample(fit.sorted_y));
  d.mean_score = detail::mean_loss(n, [&](std::size_t i) { return canonical_loss(f, x[i], y[i]); });
  d.score_recalibrated = detail::mean_loss(
      n, [&](std::size_t k) { return canonical_loss(f, fit.fitted[k], fit.sorted_y[k]); });
  d.score_marginal = detail::mean_loss(
      n, [&](std::size_t i) { return canonical_loss(f, d.marginal_value, y[i]); });
  d.mcb = d.mean_score - d.score_recalibrated;
  d.dsc = d.score_marginal - d.score_recalibrated;
  d.unc = d.score_marginal;
  if (d.unc > 0.0) d.r_star = skill_and_rstar(d);
  return d;
}

/// CORP decomposition of the mean canonical score of forecasts x for outcomes y.
inline ScoreDecomposition decompose(std::span<const double> x, std::span<const double> y,
                                    const Functional& f) {
  const IsotonicFit fit = fit_isotonic(x, y, f);
  return decompose(x, y, fit);
}

/// Constant c such that (x + c, y) is unconditionally T-calibrated: the
/// functional of the residual sample y - x.
inline double unconditional_shift(std::span<const double> x, std::span<const double> y,
                                  const Functional& f) {
  if (!f.has_prediction_error_form()) {
    throw DomainError("shift recalibration undefined for this functional");
  }
  detail::check_pairs(x, y);
  std::vector<double> residuals(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) residuals[i] = y[i] - x[i];
  return eval_functional(f, SortedSample(std::move(residuals)));
}

/// decompose() plus the split MCB = MCB_uncond + MCB_cond.
inline ScoreDecomposition extended_decompose(std::span<const double> x,
                                             std::span<const double> y,
                                             const Functional& f) {
  const double c = unconditional_shift(x, y, f);
  ScoreDecomposition d = decompose(x, y, f);
  const double shifted = detail::mean_loss(
      x.size(), [&](std::size_t i) { return canonical_loss(f, x[i] + c, y[i]); });
  d.shift_c = c;
  d.mcb_uncond = d.mean_score - shifted;
  d.mcb_cond = shifted - d.score_recalibrated;
  return d;
}

}  // namespace corp
