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

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace corp {

/// Exact floating-point accumulator (Shewchuk's non-overlapping partials).
///
/// The represented sum is exact; `value()` returns it correctly rounded, so
/// the result does not depend on the order in which terms were added or on
/// how partial accumulators were merged. Inputs must be finite.
class ExactSum {
 public:
  ExactSum() = default;

  void add(double x) {
    std::size_t i = 0;
    for (double y : partials_) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[i++] = lo;
      x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
  }

  /// Adds w * y without rounding the product.
  void add_product(double w, double y) {
    const double p = w * y;
    add(p);
    const double e = std::fma(w, y, -p);
    if (e != 0.0) add(e);
  }

  void merge(const ExactSum& other) {
    for (double p : other.partials_) add(p);
  }

  [[nodiscard]] double value() const {
    std::size_t n = partials_.size();
    if (n == 0) return 0.0;
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      const double yr = hi - x;
      lo = y - yr;
      if (lo != 0.0) break;
    }
    // Round half-even across the remaining partials.
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) ||
                  (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      const double yr = x - hi;
      if (y == yr) hi = x;
    }
    return hi;
  }

 private:
  std::vector<double> partials_;
};

inline double exact_sum(std::span<const double> values) {
  ExactSum s;
  for (double v : values) s.add(v);
  return s.value();
}

inline double exact_mean(std::span<const double> values) {
  return exact_sum(values) / static_cast<double>(values.size());
}

}  // namespace corp
