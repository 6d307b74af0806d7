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

// Generic T-pool-adjacent-violators isotonic regression.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "corp/errors.hpp"
#include "corp/exact_sum.hpp"
#include "corp/functional.hpp"

namespace corp {

/// Half-open run [begin, end) of positions in sorted-x order.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  [[nodiscard]] std::size_t size() const { return end - begin; }
};

struct PavBlock {
  IndexRange range;
  double value = 0.0;
};

/// Result of fit_isotonic. All per-observation sequences are in sorted-x
/// order; `order[k]` is the input index of the k-th sorted observation.
struct IsotonicFit {
  Functional functional;
  std::vector<std::size_t> order;
  std::vector<double> sorted_x;
  std::vector<double> sorted_y;
  std::vector<double> fitted;
  std::vector<PavBlock> blocks;
  /// Observations sharing the same forecast value, pooled before merging.
  std::vector<IndexRange> tie_groups;

  /// Outcomes of block k as an empirical measure.
  [[nodiscard]] SortedSample block_sample(std::size_t k) const {
    const IndexRange r = blocks.at(k).range;
    return SortedSample(std::vector<double>(sorted_y.begin() + static_cast<std::ptrdiff_t>(r.begin),
                                            sorted_y.begin() + static_cast<std::ptrdiff_t>(r.end)));
  }

  /// Fitted values mapped back to the caller's input order.
  [[nodiscard]] std::vector<double> fitted_in_input_order() const {
    std::vector<double> out(fitted.size());
    for (std::size_t k = 0; k < order.size(); ++k) out[order[k]] = fitted[k];
    return out;
  }
};

namespace detail {

inline void check_pairs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("forecasts and outcomes differ in length");
  if (x.empty()) throw DomainError("empty input");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw DomainError("non-finite data");
  }
}

// Mergeable running statistics for kinds that reduce to a weighted mean.
struct MeanBlock {
  IndexRange range;
  ExactSum sum;
  double count = 0.0;
  double min_y = 0.0;
  double max_y = 0.0;
  double value = 0.0;

  void absorb(const MeanBlock& rhs) {
    range.end = rhs.range.end;
    sum.merge(rhs.sum);
    count += rhs.count;
    min_y = std::min(min_y, rhs.min_y);
    max_y = std::max(max_y, rhs.max_y);
  }

  // Mirrors eval_functional, including the point-mass shortcut, so block
  // values reproduce exactly.
  void refresh(const Functional& f) {
    value = min_y == max_y ? f.point_value(min_y) : sum.value() / count;
  }
};

struct SampleBlock {
  IndexRange range;
  SortedSample sample;
  double value = 0.0;
};

template <class Block, class Merge>
void pool_violators(std::vector<Block>& stack, Block next, Merge merge) {
  stack.push_back(std::move(next));
  while (stack.size() >= 2 && stack[stack.size() - 2].value > stack.back().value) {
    Block top = std::move(stack.back());
    stack.pop_back();
    merge(stack.back(), top);
  }
}

}  // namespace detail

/// Isotonic T-regression of outcomes y on forecasts x.
///
/// Pairs are stably sorted by x and observations with identical x are pooled
/// into one initial group; adjacent groups are then merged while a strict
/// violation remains, re-evaluating T on the merged outcomes.
inline IsotonicFit fit_isotonic(std::span<const double> x, std::span<const double> y,
                                const Functional& f) {
  detail::check_pairs(x, y);
  const std::size_t n = x.size();

  IsotonicFit fit{f, {}, {}, {}, {}, {}, {}};
  fit.order.resize(n);
  std::iota(fit.order.begin(), fit.order.end(), std::size_t{0});
  std::stable_sort(fit.order.begin(), fit.order.end(),
                   [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  fit.sorted_x.resize(n);
  fit.sorted_y.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    fit.sorted_x[k] = x[fit.order[k]];
    fit.sorted_y[k] = y[fit.order[k]];
  }
  for (std::size_t k = 0; k < n;) {
    std::size_t e = k + 1;
    while (e < n && fit.sorted_x[e] == fit.sorted_x[k]) ++e;
    fit.tie_groups.push_back({k, e});
    k = e;
  }

  if (f.reduces_to_mean()) {
    std::vector<detail::MeanBlock> stack;
    stack.reserve(fit.tie_groups.size());
    for (const IndexRange& g : fit.tie_groups) {
      detail::MeanBlock b;
      b.range = g;
      b.min_y = fit.sorted_y[g.begin];
      b.max_y = b.min_y;
      for (std::size_t k = g.begin; k < g.end; ++k) {
        b.sum.add(f.point_value(fit.sorted_y[k]));
        b.count += 1.0;
        b.min_y = std::min(b.min_y, fit.sorted_y[k]);
        b.max_y = std::max(b.max_y, fit.sorted_y[k]);
      }
      b.refresh(f);
      detail::pool_violators(stack, std::move(b),
                             [&](detail::MeanBlock& lhs, const detail::MeanBlock& rhs) {
                               lhs.absorb(rhs);
                               lhs.refresh(f);
                             });
    }
    for (const auto& b : stack) fit.blocks.push_back({b.range, b.value});
  } else {
    std::vector<detail::SampleBlock> stack;
    stack.reserve(fit.tie_groups.size());
    for (const IndexRange& g : fit.tie_groups) {
      detail::SampleBlock b;
      b.range = g;
      b.sample = SortedSample(std::vector<double>(
          fit.sorted_y.begin() + static_cast<std::ptrdiff_t>(g.begin),
          fit.sorted_y.begin() + static_cast<std::ptrdiff_t>(g.end)));
      b.value = eval_functional(f, b.sample);
      detail::pool_violators(stack, std::move(b),
                             [&](detail::SampleBlock& lhs, const detail::SampleBlock& rhs) {
                               lhs.range.end = rhs.range.end;
                               lhs.sample = SortedSample::merge(lhs.sample, rhs.sample);
                               lhs.value = eval_functional(f, lhs.sample);
                             });
    }
    for (const auto& b : stack) fit.blocks.push_back({b.range, b.value});
  }

  fit.fitted.resize(n);
  for (const PavBlock& b : fit.blocks) {
    std::fill(fit.fitted.begin() + static_cast<std::ptrdiff_t>(b.range.begin),
              fit.fitted.begin() + static_cast<std::ptrdiff_t>(b.range.end), b.value);
  }
  return fit;
}

}  // namespace corp
