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
#include <random>
#include <vector>

#include "corp/functional.hpp"
#include "oracles.hpp"

using namespace corp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("identification functions", "[functional]") {
  CHECK(identification(Functional::mean(), 3, 1) == 2);
  CHECK(identification(Functional::quantile(0.25), 1, 2) == -0.25);
  CHECK_THAT(identification(Functional::expectile(0.9), 2, 0), WithinAbs(0.2, 1e-15));
  CHECK(identification(Functional::huber(0.5, 1, 1), 3, 0) == 0.5);
  CHECK(identification(Functional::moment(2), 5, 2) == 1);
  CHECK(identification(Functional::threshold(1.0), 0.3, 1.0) == Catch::Approx(-0.7));
  CHECK(identification(Functional::threshold(1.0), 0.3, 1.5) == 0.3);
}

TEST_CASE("invalid functional parameters are rejected", "[functional]") {
  CHECK_THROWS_AS(Functional::quantile(0.0), DomainError);
  CHECK_THROWS_AS(Functional::quantile(1.0), DomainError);
  CHECK_THROWS_AS(Functional::expectile(-0.1), DomainError);
  CHECK_THROWS_AS(Functional::moment(0), DomainError);
  CHECK_THROWS_AS(Functional::huber(0.5, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(Functional::huber(0.5, 1.0, -1.0), DomainError);
}

TEST_CASE("eval_functional on small samples", "[functional]") {
  CHECK(eval_functional(Functional::mean(), SortedSample({1, 2, 3})) == 2);
  const SortedSample s4({1, 2, 3, 4});
  CHECK(eval_functional(Functional::quantile(0.5, Side::Lower), s4) == 2);
  CHECK(eval_functional(Functional::quantile(0.5, Side::Upper), s4) == 3);
  CHECK(eval_functional(Functional::moment(2), SortedSample({1, 2})) == 2.5);
  CHECK_THROWS_WITH(eval_functional(Functional::mean(), SortedSample(std::vector<double>{})),
                    "empty empirical measure");
}

TEST_CASE("expectile matches a bisection oracle", "[functional]") {
  const SortedSample s({0, 1});
  CHECK_THAT(eval_functional(Functional::expectile(0.75), s), WithinAbs(0.75, 1e-12));
  CHECK_THAT(oracle::expectile_bisection(0.75, {0, 1}), WithinAbs(0.75, 1e-10));

  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.05, 0.95);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> y(1 + rep % 9);
    for (double& v : y) v = std::round(nd(gen) * 4) / 2;
    const double a = ud(gen);
    CHECK_THAT(eval_functional(Functional::expectile(a), SortedSample(y)),
               WithinAbs(oracle::expectile_bisection(a, y), 1e-9));
  }
}

TEST_CASE("huber boundary roots match a bisection oracle", "[functional]") {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> y(1 + rep % 7);
    for (double& v : y) v = nd(gen) * 3;
    const double a = 0.2 + 0.1 * (rep % 7);
    const double lo = 0.3 + 0.2 * (rep % 4);
    const double hi = 0.4 + 0.3 * (rep % 3);
    for (Side side : {Side::Lower, Side::Upper}) {
      const Functional f = Functional::huber(a, lo, hi, side);
      CHECK_THAT(eval_functional(f, SortedSample(y)),
                 WithinAbs(oracle::huber_bisection(f, y), 1e-9));
    }
  }
}

TEST_CASE("singleton samples give the point-mass value", "[functional]") {
  const double y = 1.7;
  const SortedSample s({y});
  CHECK(eval_functional(Functional::mean(), s) == y);
  CHECK(eval_functional(Functional::quantile(0.3), s) == y);
  CHECK(eval_functional(Functional::quantile(0.3, Side::Upper), s) == y);
  CHECK(eval_functional(Functional::expectile(0.8), s) == y);
  CHECK(eval_functional(Functional::huber(0.2, 1, 2), s) == y);
  CHECK(eval_functional(Functional::moment(3), s) == Catch::Approx(y * y * y));
  CHECK(eval_functional(Functional::threshold(2.0), s) == 1.0);
  CHECK(eval_functional(Functional::threshold(1.0), s) == 0.0);
}

TEST_CASE("quantile sides and weighted samples", "[functional]") {
  std::mt19937_64 gen(13);
  std::uniform_int_distribution<int> ui(0, 5);
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<double> y(1 + rep % 10);
    for (double& v : y) v = ui(gen);
    const double a = 0.1 + 0.8 * (rep % 17) / 16.0;
    const SortedSample s(y);
    const double lo = eval_functional(Functional::quantile(a, Side::Lower), s);
    const double hi = eval_functional(Functional::quantile(a, Side::Upper), s);
    CHECK(lo <= hi);
    CHECK(lo == oracle::lower_quantile(a, y));
    CHECK(hi == oracle::upper_quantile(a, y));
  }
  // Weighted: value 0 has weight 3, value 1 weight 1.
  const SortedSample w({1.0, 0.0}, {1.0, 3.0});
  CHECK(eval_functional(Functional::quantile(0.75), w) == 0.0);
  CHECK(eval_functional(Functional::quantile(0.75, Side::Upper), w) == 1.0);
  CHECK(eval_functional(Functional::mean(), w) == 0.25);
}

TEST_CASE("expectile at one half equals the mean", "[functional]") {
  std::mt19937_64 gen(14);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> y(1 + rep % 20);
    for (double& v : y) v = nd(gen);
    const SortedSample s(y);
    CHECK_THAT(eval_functional(Functional::expectile(0.5), s),
               WithinAbs(eval_functional(Functional::mean(), s), 1e-12));
  }
}

TEST_CASE("huber limits recover expectile and quantile", "[functional]") {
  std::mt19937_64 gen(15);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> y(2 + rep % 9);
    for (double& v : y) v = nd(gen);
    const SortedSample s(y);
    const double a = 0.15 + 0.7 * (rep % 5) / 4.0;
    CHECK_THAT(eval_functional(Functional::huber(a, 1e9, 1e9), s),
               WithinAbs(eval_functional(Functional::expectile(a), s), 1e-6));
    // Away from attained levels the quantile is a singleton.
    const double aq = (std::floor(a * y.size()) + 0.5) / y.size();
    CHECK_THAT(eval_functional(Functional::huber(aq, 1e-9, 1e-9), s),
               WithinAbs(eval_functional(Functional::quantile(aq), s), 1e-6));
  }
}

TEST_CASE("canonical losses", "[functional]") {
  CHECK(canonical_loss(Functional::mean(), 2, 0) == 4);
  CHECK(canonical_loss(Functional::quantile(0.75), 0, 1) == 1.5);
  CHECK(canonical_loss(Functional::huber(0.5, 1, 1), 3, 0) == 5);
  CHECK_THROWS_WITH(canonical_loss(Functional::threshold(0.0), 1.5, 0.0),
                    Catch::Matchers::ContainsSubstring("probability out of range"));
  const std::vector<Functional> fs{Functional::mean(),          Functional::quantile(0.3),
                                   Functional::expectile(0.8),  Functional::huber(0.4, 1, 2),
                                   Functional::quantile(0.6, Side::Upper)};
  for (const Functional& f : fs) {
    CHECK(canonical_loss(f, 1.25, 1.25) == 0);
    CHECK(canonical_loss(f, -3, 4) >= 0);
  }
  CHECK(canonical_loss(Functional::moment(2), 4, 2) == 0);
  CHECK(canonical_loss(Functional::threshold(1.0), 1.0, 0.5) == 0);
}

TEST_CASE("canonical loss equals integrated elementary scores", "[functional]") {
  // Huber oracle: 4 * integral of elementary scores.
  CHECK_THAT(4 * oracle::integrate_elementary(Functional::huber(0.5, 1, 1), 3, 0),
             WithinRel(5.0, 1e-3));
  struct Case {
    Functional f;
    double scale;
  };
  const std::vector<Case> cases{{Functional::mean(), 2},         {Functional::quantile(0.3), 2},
                                {Functional::expectile(0.8), 4}, {Functional::huber(0.3, 0.5, 1.5), 4},
                                {Functional::moment(2), 2},      {Functional::threshold(0.4), 2}};
  std::mt19937_64 gen(16);
  std::uniform_real_distribution<double> ud(-2, 2);
  for (const auto& c : cases) {
    for (int rep = 0; rep < 20; ++rep) {
      double x = ud(gen);
      const double y = ud(gen);
      if (c.f.kind() == FunctionalKind::ThresholdNonExceedance) x = (x + 2) / 4;
      const double loss = canonical_loss(c.f, x, y);
      const double integral = c.scale * oracle::integrate_elementary(c.f, x, y);
      CHECK_THAT(integral, WithinAbs(loss, 1e-3 * std::max(1.0, loss)));
    }
  }
}

TEST_CASE("elementary scores", "[functional]") {
  CHECK(elementary_score(Functional::mean(), 0.5, 1, 0) == 0.5);
  CHECK(elementary_score(Functional::quantile(0.5), 1.5, 2, 1) == 0.5);
  CHECK(elementary_score(Functional::expectile(0.3), 0.1, 2, 2) == 0);
  // Consistency at point masses on a grid.
  const std::vector<Functional> fs{Functional::mean(), Functional::quantile(0.2),
                                   Functional::expectile(0.7), Functional::huber(0.6, 1, 0.5),
                                   Functional::moment(2), Functional::threshold(0.0)};
  for (const Functional& f : fs) {
    for (double y : {-1.0, 0.0, 0.7}) {
      const double t = eval_functional(f, SortedSample({y}));
      for (double eta = -3; eta <= 3; eta += 0.125) {
        for (double x = -2; x <= 2; x += 0.25) {
          CHECK(elementary_score(f, eta, t, y) <= elementary_score(f, eta, x, y));
        }
      }
    }
  }
}

TEST_CASE("functional grammar round-trips", "[functional]") {
  for (const char* s : {"mean", "quantile:0.75", "quantile:0.75:upper", "expectile:0.5", "moment:2",
                        "threshold:2", "huber:0.5:1:1", "huber:0.25:0.5:2:upper"}) {
    CHECK(to_string(parse_functional(s)) == s);
  }
  CHECK(parse_functional("median") == Functional::quantile(0.5));
  CHECK(parse_functional("threshold:2.0") == Functional::threshold(2.0));
  CHECK_THROWS_AS(parse_functional("quantile"), ParseError);
  CHECK_THROWS_AS(parse_functional("quantile:abc"), ParseError);
  CHECK_THROWS_AS(parse_functional("foo"), ParseError);
  CHECK_THROWS_AS(parse_functional("quantile:0.5:middle"), ParseError);
  CHECK_THROWS_AS(parse_functional("quantile:1.5"), ParseError);
  CHECK(score_label(Functional::threshold(1)) == "BS");
  CHECK(score_label(Functional::mean()) == "MSE");
  CHECK(score_label(Functional::quantile(0.5)) == "QS");
}
