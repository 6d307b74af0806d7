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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "corp/scores.hpp"
#include "corp/synthetic.hpp"

using namespace corp;
using Catch::Matchers::WithinAbs;

namespace {

// Monte Carlo MSE of the forecast means and its standard error.
std::pair<double, double> mse_of_means(const std::vector<ForecastCase>& cases) {
  double s = 0, s2 = 0;
  for (const auto& c : cases) {
    const double e = std::pow(mean(c.forecast) - c.y, 2);
    s += e;
    s2 += e * e;
  }
  const double n = static_cast<double>(cases.size());
  const double m = s / n;
  return {m, std::sqrt((s2 / n - m * m) / n)};
}

}  // namespace

TEST_CASE("scenario forecasts have the documented form", "[synthetic]") {
  for (const auto& c : gen_scenario(Scenario::perfect(), 50, 1)) {
    const auto* n = std::get_if<Normal>(&c.forecast.kind());
    REQUIRE(n);
    CHECK(n->sigma == 1.0);
  }
  for (const auto& c : gen_scenario(Scenario::unconditional(), 50, 1)) {
    const auto* n = std::get_if<Normal>(&c.forecast.kind());
    REQUIRE(n);
    CHECK(n->mu == 0.0);
    CHECK(n->sigma == std::sqrt(2.0));
  }
  for (const auto& c : gen_scenario(Scenario::unfocused(1.5), 50, 1)) {
    const auto* m = std::get_if<NormalMixture>(&c.forecast.kind());
    REQUIRE(m);
    const double mu = m->mus[0];
    const double eta = m->mus[1] - mu;
    CHECK_THAT(std::fabs(eta), WithinAbs(1.5, 1e-12));
    CHECK_THAT(functional_of(c.forecast, Functional::mean()), WithinAbs(mu + eta / 2, 1e-12));
  }
  for (const auto& c : gen_scenario(Scenario::lopsided(0.5), 50, 1)) {
    const auto* l = std::get_if<Lopsided>(&c.forecast.kind());
    REQUIRE(l);
    CHECK(std::fabs(l->delta) == 0.5);
  }
  for (const auto& c : gen_scenario(Scenario::piecewise_uniform(), 50, 1)) {
    const auto* u = std::get_if<UniformMixture>(&c.forecast.kind());
    REQUIRE(u);
    CHECK(c.y >= u->breaks.front());
    CHECK(c.y <= u->breaks.back());
  }
  CHECK(gen_scenario(Scenario::perfect(), 10, 3)[4].y == gen_scenario(Scenario::perfect(), 7, 3)[4].y);
  CHECK_THROWS_AS(Scenario::unfocused(0), DomainError);
  CHECK_THROWS_AS(Scenario::lopsided(1.0), DomainError);
  CHECK_THROWS_AS(Scenario::piecewise_uniform(-1), DomainError);
  CHECK_THROWS_AS(gen_scenario(Scenario::perfect(), 0, 1), DomainError);
}

TEST_CASE("unfocused and lopsided MSE laws", "[synthetic]") {
  for (double eta0 : {0.5, 1.5}) {
    const auto [m, se] = mse_of_means(gen_scenario(Scenario::unfocused(eta0), 100000, 8));
    CHECK(std::fabs(m - (1 + eta0 * eta0 / 4)) < 3 * se);
  }
  const double d0 = 0.7;
  const auto [m, se] = mse_of_means(gen_scenario(Scenario::lopsided(d0), 100000, 9));
  CHECK(std::fabs(m - (1 + 2 / std::numbers::pi * d0 * d0)) < 3 * se);
}

TEST_CASE("toy data", "[synthetic]") {
  const XYData k = kvalseth_data();
  CHECK(k.x.size() == 9);
  CHECK(k.y.size() == 9);
  CHECK(eval_functional(Functional::mean(), SortedSample(k.y)) == 9);
  CHECK(eval_functional(Functional::quantile(0.5), SortedSample(k.y)) == 9);
  double var = 0, mad = 0;
  for (double v : k.y) {
    var += (v - 9) * (v - 9) / 9;
    mad += std::fabs(v - 9) / 9;
  }
  CHECK_THAT(var, WithinAbs(12.0, 1e-12));
  CHECK_THAT(mad, WithinAbs(26.0 / 9, 1e-12));
}

TEST_CASE("line fitters", "[synthetic]") {
  const XYData k = kvalseth_data();
  const LineFit ols = fit_ols(k.x, k.y);
  CHECK_THAT(ols.slope, WithinAbs(0.70740, 1e-5));
  CHECK_THAT(ols.intercept, WithinAbs(3.6552, 1e-4));

  const LineFit lad = fit_lad(k.x, k.y);
  double err = 0;
  for (std::size_t i = 0; i < 9; ++i) err += std::fabs(k.y[i] - lad(k.x[i]));
  CHECK_THAT(err, WithinAbs(8.0, 1e-9));
  CHECK_THAT(lad.slope, WithinAbs(11.0 / 13, 1e-12));
  CHECK_THAT(lad.intercept, WithinAbs(41.0 / 13, 1e-12));

  // The competing minimizer ranks forecasts identically.
  const LineFit other{5.0 / 6, 10.0 / 3};
  double err2 = 0;
  for (std::size_t i = 0; i < 9; ++i) err2 += std::fabs(k.y[i] - other(k.x[i]));
  CHECK_THAT(err2, WithinAbs(8.0, 1e-9));
  const auto a = decompose(lad.predict(k.x), k.y, Functional::quantile(0.5));
  const auto b = decompose(other.predict(k.x), k.y, Functional::quantile(0.5));
  CHECK_THAT(a.dsc, WithinAbs(b.dsc, 1e-12));
  CHECK_THAT(*a.r_star, WithinAbs(*b.r_star, 1e-9));

  const std::vector<double> cx{0, 1, 2, 3};
  const std::vector<double> cy{1, 3, 5, 7};
  for (const LineFit& f : {fit_ols(cx, cy), fit_lad(cx, cy)}) {
    for (std::size_t i = 0; i < 4; ++i) CHECK_THAT(f(cx[i]), WithinAbs(cy[i], 1e-12));
  }
  CHECK_THROWS_AS(fit_ols(std::vector<double>{1, 1}, std::vector<double>{0, 2}), DomainError);
  CHECK_THROWS_AS(fit_lad(std::vector<double>{1}, std::vector<double>{0}), DomainError);
}

TEST_CASE("LAD is optimal over all pairwise lines", "[synthetic]") {
  std::mt19937_64 gen(51);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 3 + rep % 12;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = nd(gen);
      y[i] = x[i] + nd(gen);
    }
    const LineFit lad = fit_lad(x, y);
    auto loss = [&](const LineFit& f) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += std::fabs(y[i] - f(x[i]));
      return s;
    };
    const double best = loss(lad);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double s = (y[j] - y[i]) / (x[j] - x[i]);
        CHECK(best <= loss({s, y[i] - s * x[i]}) + 1e-9);
      }
    }
  }
}
