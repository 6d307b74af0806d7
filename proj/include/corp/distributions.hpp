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

// Predictive distributions for (F, y) workflows.
//
// Parametrizations:
//   Normal(mu, sigma)
//   TwoPieceNormal(mode, sigma1, sigma2): density
//       A exp(-(x-mode)^2 / (2 sigma1^2))  for x < mode,
//       A exp(-(x-mode)^2 / (2 sigma2^2))  for x >= mode,
//     with A = sqrt(2/pi) / (sigma1 + sigma2). The CDF is continuous at the
//     mode, where it equals sigma1 / (sigma1 + sigma2).
//   NormalMixture(weights, mus, sigmas)
//   Lopsided(mu, delta): density (1-delta) phi(x-mu) left of mu and
//     (1+delta) phi(x-mu) right of mu, |delta| < 1.
//   UniformMixture(weights, breaks): weight w_k uniform on [b_k, b_{k+1}].
//   Discrete(atoms, probs)
//   PiecewiseLinearCdf(knots): F linear between knots (x, F), 0 left of the
//     first knot and 1 right of the last. Repeated x encodes an atom.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "corp/errors.hpp"
#include "corp/functional.hpp"
#include "corp/random.hpp"

namespace corp {

// ---- standard normal helpers --------------------------------------------

inline double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

inline double std_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

inline double std_normal_quantile(double p) {
  if (p <= 0.0) return -HUGE_VAL;
  if (p >= 1.0) return HUGE_VAL;
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

namespace detail {

// Integral of Phi from -inf to z.
inline double std_normal_integrated_cdf(double z) {
  return z * std_normal_cdf(z) + std_normal_pdf(z);
}

// E|Z|^k for standard normal Z.
inline double abs_normal_moment(int k) {
  return std::pow(2.0, 0.5 * k) * std::tgamma(0.5 * (k + 1)) * std::numbers::inv_sqrtpi;
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// Raw n-th moment from central moments about `center`.
template <class Central>
double shift_moment(double center, int n, Central&& central) {
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    sum += binomial(n, k) * std::pow(center, n - k) * central(k);
  }
  return sum;
}

inline void check_probabilities(std::span<const double> p, const char* what) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string(what) + " must be nonnegative");
    }
    total += v;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw DomainError(std::string(what) + " must sum to 1");
}

inline void check_scale(double s, const char* what) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError(std::string(what) + " must be positive");
}

inline void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace detail

// ---- distribution kinds -------------------------------------------------

struct Normal {
  double mu = 0.0;
  double sigma = 1.0;
};

struct TwoPieceNormal {
  double mode = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
};

struct NormalMixture {
  std::vector<double> weights;
  std::vector<double> mus;
  std::vector<double> sigmas;
};

struct Lopsided {
  double mu = 0.0;
  double delta = 0.0;
};

struct UniformMixture {
  std::vector<double> weights;
  std::vector<double> breaks;
};

struct Discrete {
  std::vector<double> atoms;
  std::vector<double> probs;
};

struct CdfKnot {
  double x = 0.0;
  double p = 0.0;
  friend bool operator==(const CdfKnot&, const CdfKnot&) = default;
};

struct PiecewiseLinearCdf {
  std::vector<CdfKnot> knots;
};

/// Immutable predictive CDF. Construct through the validating factories.
class Distribution {
 public:
  using Kind = std::variant<Normal, TwoPieceNormal, NormalMixture, Lopsided, UniformMixture,
                            Discrete, PiecewiseLinearCdf>;

  static Distribution normal(double mu, double sigma) {
    detail::check_finite(mu, "mu");
    detail::check_scale(sigma, "sigma");
    return Distribution(Normal{mu, sigma});
  }

  static Distribution two_piece_normal(double mode, double sigma1, double sigma2) {
    detail::check_finite(mode, "mode");
    detail::check_scale(sigma1, "sigma1");
    detail::check_scale(sigma2, "sigma2");
    return Distribution(TwoPieceNormal{mode, sigma1, sigma2});
  }

  static Distribution normal_mixture(std::vector<double> weights, std::vector<double> mus,
                                     std::vector<double> sigmas) {
    if (weights.empty() || weights.size() != mus.size() || weights.size() != sigmas.size()) {
      throw DomainError("normal mixture needs equally many weights, means and sigmas");
    }
    detail::check_probabilities(weights, "mixture weights");
    for (double m : mus) detail::check_finite(m, "mixture mean");
    for (double s : sigmas) detail::check_scale(s, "mixture sigma");
    return Distribution(NormalMixture{std::move(weights), std::move(mus), std::move(sigmas)});
  }

  static Distribution lopsided(double mu, double delta) {
    detail::check_finite(mu, "mu");
    if (!(delta > -1.0 && delta < 1.0)) throw DomainError("lopsided delta must lie in (-1,1)");
    return Distribution(Lopsided{mu, delta});
  }

  static Distribution uniform_mixture(std::vector<double> weights, std::vector<double> breaks) {
    if (weights.empty() || breaks.size() != weights.size() + 1) {
      throw DomainError("uniform mixture needs one more break than weights");
    }
    detail::check_probabilities(weights, "mixture weights");
    for (std::size_t k = 0; k < breaks.size(); ++k) {
      detail::check_finite(breaks[k], "break");
      if (k > 0 && !(breaks[k] > breaks[k - 1])) {
        throw DomainError("uniform mixture breaks must be strictly increasing");
      }
    }
    std::vector<CdfKnot> knots{{breaks[0], 0.0}};
    double cum = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      cum += weights[k];
      knots.push_back({breaks[k + 1], k + 1 == weights.size() ? 1.0 : std::min(cum, 1.0)});
    }
    return Distribution(UniformMixture{std::move(weights), std::move(breaks)}, std::move(knots));
  }

  static Distribution uniform(double lo, double hi) { return uniform_mixture({1.0}, {lo, hi}); }

  static Distribution discrete(std::vector<double> atoms, std::vector<double> probs) {
    if (atoms.empty() || atoms.size() != probs.size()) {
      throw DomainError("discrete distribution needs equally many atoms and probabilities");
    }
    detail::check_probabilities(probs, "probabilities");
    for (double a : atoms) detail::check_finite(a, "atom");
    std::vector<std::size_t> idx(atoms.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t i, std::size_t j) { return atoms[i] < atoms[j]; });
    std::vector<CdfKnot> knots;
    double cum = 0.0;
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const double a = atoms[idx[r]];
      if (knots.empty() || knots.back().x != a) knots.push_back({a, cum});
      cum += probs[idx[r]];
      knots.push_back({a, r + 1 == idx.size() ? 1.0 : std::min(cum, 1.0)});
    }
    return Distribution(Discrete{std::move(atoms), std::move(probs)}, std::move(knots));
  }

  static Distribution point_mass(double at) { return discrete({at}, {1.0}); }

  static Distribution piecewise_linear(std::vector<CdfKnot> knots) {
    if (knots.size() < 2) throw DomainError("piecewise-linear CDF needs at least two knots");
    for (std::size_t k = 0; k < knots.size(); ++k) {
      detail::check_finite(knots[k].x, "knot location");
      detail::check_finite(knots[k].p, "knot probability");
      if (k > 0 && (knots[k].x < knots[k - 1].x || knots[k].p < knots[k - 1].p)) {
        throw DomainError("piecewise-linear CDF knots must be nondecreasing");
      }
    }
    if (std::fabs(knots.front().p) > 1e-12 || std::fabs(knots.back().p - 1.0) > 1e-12) {
      throw DomainError("piecewise-linear CDF must rise from 0 to 1");
    }
    knots.front().p = 0.0;
    knots.back().p = 1.0;
    auto copy = knots;
    return Distribution(PiecewiseLinearCdf{std::move(knots)}, std::move(copy));
  }

  [[nodiscard]] const Kind& kind() const { return kind_; }

  /// Breakpoints of the CDF for the piecewise-linear kinds; empty otherwise.
  [[nodiscard]] std::span<const CdfKnot> knots() const { return knots_; }

 private:
  explicit Distribution(Kind kind, std::vector<CdfKnot> knots = {})
      : kind_(std::move(kind)), knots_(std::move(knots)) {}

  Kind kind_;
  std::vector<CdfKnot> knots_;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ---- piecewise-linear engine --------------------------------------------

namespace detail {

inline double knots_cdf(std::span<const CdfKnot> k, double y) {
  if (y < k.front().x) return 0.0;
  if (y >= k.back().x) return 1.0;
  // Last knot with x <= y; the next one lies strictly to the right.
  const auto it = std::upper_bound(k.begin(), k.end(), y,
                                   [](double v, const CdfKnot& c) { return v < c.x; });
  const CdfKnot& r = *it;
  const CdfKnot& l = *(it - 1);
  return l.p + (r.p - l.p) * ((y - l.x) / (r.x - l.x));
}

inline double knots_cdf_left(std::span<const CdfKnot> k, double y) {
  if (y <= k.front().x) return 0.0;
  if (y > k.back().x) return 1.0;
  // First knot with x >= y; the previous one lies strictly to the left.
  const auto it = std::lower_bound(k.begin(), k.end(), y,
                                   [](const CdfKnot& c, double v) { return c.x < v; });
  const CdfKnot& r = *it;
  const CdfKnot& l = *(it - 1);
  if (r.x == y) return r.p;
  return l.p + (r.p - l.p) * ((y - l.x) / (r.x - l.x));
}

inline double knots_quantile(std::span<const CdfKnot> k, double alpha, Side side) {
  std::size_t j = 1;
  while (j + 1 < k.size() && !(side == Side::Lower ? k[j].p >= alpha : k[j].p > alpha)) ++j;
  const CdfKnot& l = k[j - 1];
  const CdfKnot& r = k[j];
  if (r.x == l.x || r.p == l.p) return r.x;
  const double t = (alpha - l.p) / (r.p - l.p);
  return std::clamp(l.x + t * (r.x - l.x), l.x, r.x);
}

inline double knots_integrated_cdf(std::span<const CdfKnot> k, double x) {
  double area = 0.0;
  for (std::size_t j = 1; j < k.size(); ++j) {
    const CdfKnot& l = k[j - 1];
    const CdfKnot& r = k[j];
    if (x <= l.x) return area;
    if (r.x == l.x) continue;
    if (x < r.x) {
      const double px = l.p + (r.p - l.p) * ((x - l.x) / (r.x - l.x));
      return area + 0.5 * (l.p + px) * (x - l.x);
    }
    area += 0.5 * (l.p + r.p) * (r.x - l.x);
  }
  return area + (x - k.back().x);
}

inline double knots_raw_moment(std::span<const CdfKnot> k, int n) {
  double sum = 0.0;
  for (std::size_t j = 1; j < k.size(); ++j) {
    const double mass = k[j].p - k[j - 1].p;
    if (mass == 0.0) continue;
    const double l = k[j - 1].x;
    const double r = k[j].x;
    if (l == r) {
      sum += mass * std::pow(l, n);
    } else {
      // (r^{n+1} - l^{n+1}) / ((n+1)(r-l)) without cancellation.
      double s = 0.0;
      for (int i = 0; i <= n; ++i) s += std::pow(l, i) * std::pow(r, n - i);
      sum += mass * s / (n + 1);
    }
  }
  return sum;
}

template <class Cdf>
double bisect_quantile(Cdf&& cdf, double alpha, Side side, double lo, double hi) {
  auto above = [&](double x) { return side == Side::Lower ? cdf(x) >= alpha : cdf(x) > alpha; };
  double width = hi - lo;
  while (above(lo)) {
    lo -= width;
    width *= 2.0;
  }
  width = hi - lo;
  while (!above(hi)) {
    hi += width;
    width *= 2.0;
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    (above(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

// ---- CDF, quantiles ----------------------------------------------------

/// F(y), right-continuous.
inline double cdf(const Distribution& d, double y) {
  return std::visit(
      overloaded{
          [&](const Normal& k) { return std_normal_cdf((y - k.mu) / k.sigma); },
          [&](const TwoPieceNormal& k) {
            const double s = k.sigma1 + k.sigma2;
            if (y < k.mode) return 2.0 * k.sigma1 / s * std_normal_cdf((y - k.mode) / k.sigma1);
            return (k.sigma1 - k.sigma2) / s +
                   2.0 * k.sigma2 / s * std_normal_cdf((y - k.mode) / k.sigma2);
          },
          [&](const NormalMixture& k) {
            double p = 0.0;
            for (std::size_t j = 0; j < k.weights.size(); ++j) {
              p += k.weights[j] * std_normal_cdf((y - k.mus[j]) / k.sigmas[j]);
            }
            return std::clamp(p, 0.0, 1.0);
          },
          [&](const Lopsided& k) {
            const double phi = std_normal_cdf(y - k.mu);
            if (y <= k.mu) return (1.0 - k.delta) * phi;
            return std::clamp((1.0 + k.delta) * phi - k.delta, 0.0, 1.0);
          },
          [&](const auto&) { return detail::knots_cdf(d.knots(), y); },
      },
      d.kind());
}

/// F(y-), the left limit; differs from cdf() only at atoms.
inline double cdf_left(const Distribution& d, double y) {
  if (!d.knots().empty()) return detail::knots_cdf_left(d.knots(), y);
  return cdf(d, y);
}

/// Lower quantile inf{x : F(x) >= alpha} or upper quantile inf{x : F(x) > alpha}.
inline double quantile(const Distribution& d, double alpha, Side side = Side::Lower) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("quantile level must lie in (0,1)");
  return std::visit(
      overloaded{
          [&](const Normal& k) { return k.mu + k.sigma * std_normal_quantile(alpha); },
          [&](const TwoPieceNormal& k) {
            const double s = k.sigma1 + k.sigma2;
            if (alpha <= k.sigma1 / s) {
              return k.mode + k.sigma1 * std_normal_quantile(alpha * s / (2.0 * k.sigma1));
            }
            return k.mode +
                   k.sigma2 * std_normal_quantile((alpha * s - (k.sigma1 - k.sigma2)) /
                                                  (2.0 * k.sigma2));
          },
          [&](const NormalMixture& k) {
            double lo = HUGE_VAL;
            double hi = -HUGE_VAL;
            for (std::size_t j = 0; j < k.weights.size(); ++j) {
              lo = std::min(lo, k.mus[j] + k.sigmas[j] * std_normal_quantile(alpha));
              hi = std::max(hi, k.mus[j] + k.sigmas[j] * std_normal_quantile(alpha));
            }
            if (!(hi > lo)) hi = lo + 1.0;
            return detail::bisect_quantile([&](double x) { return cdf(d, x); }, alpha, side,
                                           lo, hi);
          },
          [&](const Lopsided& k) {
            if (alpha <= 0.5 * (1.0 - k.delta)) {
              return k.mu + std_normal_quantile(alpha / (1.0 - k.delta));
            }
            return k.mu + std_normal_quantile((alpha + k.delta) / (1.0 + k.delta));
          },
          [&](const auto&) { return detail::knots_quantile(d.knots(), alpha, side); },
      },
      d.kind());
}

/// Integral of F from -inf to x.
inline double integrated_cdf(const Distribution& d, double x) {
  using detail::std_normal_integrated_cdf;
  return std::visit(
      overloaded{
          [&](const Normal& k) { return k.sigma * std_normal_integrated_cdf((x - k.mu) / k.sigma); },
          [&](const TwoPieceNormal& k) {
            const double s = k.sigma1 + k.sigma2;
            if (x < k.mode) {
              return 2.0 * k.sigma1 * k.sigma1 / s *
                     std_normal_integrated_cdf((x - k.mode) / k.sigma1);
            }
            const double at_mode = 2.0 * k.sigma1 * k.sigma1 / s * std_normal_pdf(0.0);
            return at_mode + (k.sigma1 - k.sigma2) / s * (x - k.mode) +
                   2.0 * k.sigma2 * k.sigma2 / s *
                       (std_normal_integrated_cdf((x - k.mode) / k.sigma2) - std_normal_pdf(0.0));
          },
          [&](const NormalMixture& k) {
            double s = 0.0;
            for (std::size_t j = 0; j < k.weights.size(); ++j) {
              s += k.weights[j] * k.sigmas[j] *
                   std_normal_integrated_cdf((x - k.mus[j]) / k.sigmas[j]);
            }
            return s;
          },
          [&](const Lopsided& k) {
            const double z = x - k.mu;
            if (z <= 0.0) return (1.0 - k.delta) * std_normal_integrated_cdf(z);
            return (1.0 - k.delta) * std_normal_pdf(0.0) +
                   (1.0 + k.delta) * (std_normal_integrated_cdf(z) - std_normal_pdf(0.0)) -
                   k.delta * z;
          },
          [&](const auto&) { return detail::knots_integrated_cdf(d.knots(), x); },
      },
      d.kind());
}

/// E[Y^n] in closed form.
inline double raw_moment(const Distribution& d, int n) {
  if (n < 1) throw DomainError("moment order must be positive");
  using detail::abs_normal_moment;
  return std::visit(
      overloaded{
          [&](const Normal& k) {
            return detail::shift_moment(k.mu, n, [&](int j) {
              return j % 2 == 1 ? 0.0 : std::pow(k.sigma, j) * abs_normal_moment(j);
            });
          },
          [&](const TwoPieceNormal& k) {
            return detail::shift_moment(k.mode, n, [&](int j) {
              const double left = (j % 2 == 1 ? -1.0 : 1.0) * std::pow(k.sigma1, j + 1);
              return (left + std::pow(k.sigma2, j + 1)) / (k.sigma1 + k.sigma2) *
                     abs_normal_moment(j);
            });
          },
          [&](const NormalMixture& k) {
            double s = 0.0;
            for (std::size_t c = 0; c < k.weights.size(); ++c) {
              s += k.weights[c] * detail::shift_moment(k.mus[c], n, [&](int j) {
                     return j % 2 == 1 ? 0.0 : std::pow(k.sigmas[c], j) * abs_normal_moment(j);
                   });
            }
            return s;
          },
          [&](const Lopsided& k) {
            return detail::shift_moment(k.mu, n, [&](int j) {
              const double sign = j % 2 == 1 ? -1.0 : 1.0;
              return 0.5 * abs_normal_moment(j) * ((1.0 - k.delta) * sign + (1.0 + k.delta));
            });
          },
          [&](const auto&) { return detail::knots_raw_moment(d.knots(), n); },
      },
      d.kind());
}

inline double mean(const Distribution& d) { return raw_moment(d, 1); }

namespace detail {

// Expected identification E[V(x, Y)] for expectile and Huber kinds, via the
// integrated CDF.
inline double expected_identification(const Distribution& d, const Functional& f,
                                      double x, double mu) {
  const double a = f.alpha();
  if (f.kind() == FunctionalKind::Expectile) {
    return (1.0 - 2.0 * a) * integrated_cdf(d, x) + a * (x - mu);
  }
  const double lo = f.clip_lower();
  const double hi = f.clip_upper();
  const double ix = integrated_cdf(d, x);
  const double below = ix - integrated_cdf(d, x - hi);        // E[min((x-Y)+, b)]
  const double above = lo - (integrated_cdf(d, x + lo) - ix);  // E[min((Y-x)+, a)]
  return (1.0 - a) * below - a * above;
}

inline double solve_identification(const Distribution& d, const Functional& f) {
  const double mu = f.kind() == FunctionalKind::Expectile ? mean(d) : 0.0;
  const bool lower = f.kind() == FunctionalKind::Expectile || f.side() == Side::Lower;
  auto g = [&](double x) { return expected_identification(d, f, x, mu); };
  auto right_of_root = [&](double v) { return lower ? v >= 0.0 : v > 0.0; };
  double lo = quantile(d, 0.01);
  double hi = quantile(d, 0.99);
  if (!(hi > lo)) hi = lo + 1.0;
  double width = hi - lo;
  while (right_of_root(g(lo))) {
    lo -= width;
    width *= 2.0;
  }
  width = hi - lo;
  while (!right_of_root(g(hi))) {
    hi += width;
    width *= 2.0;
  }
  while (hi - lo > 1e-12 * std::max(1.0, std::fabs(lo))) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    (right_of_root(g(mid)) ? hi : lo) = mid;
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace detail

/// T(F) for a predictive distribution.
inline double functional_of(const Distribution& d, const Functional& f) {
  switch (f.kind()) {
    case FunctionalKind::Mean:
      return mean(d);
    case FunctionalKind::Moment:
      return raw_moment(d, f.order());
    case FunctionalKind::ThresholdNonExceedance:
      return cdf(d, f.threshold());
    case FunctionalKind::Quantile:
      return quantile(d, f.alpha(), f.side());
    case FunctionalKind::Expectile:
    case FunctionalKind::Huber:
      return detail::solve_identification(d, f);
  }
  throw DomainError("unsupported functional for this distribution");
}

// ---- sampling and PIT -------------------------------------------------

/// One draw from d. Inverse-CDF sampling, except normal mixtures, which
/// pick a component first.
template <class URBG>
double sample(const Distribution& d, URBG& rng) {
  if (const auto* mix = std::get_if<NormalMixture>(&d.kind())) {
    const double u = uniform_open(rng);
    double cum = 0.0;
    std::size_t c = 0;
    for (; c + 1 < mix->weights.size(); ++c) {
      cum += mix->weights[c];
      if (u < cum) break;
    }
    return mix->mus[c] + mix->sigmas[c] * std_normal_quantile(uniform_open(rng));
  }
  return quantile(d, uniform_open(rng), Side::Lower);
}

/// Randomized PIT F(y-) + u (F(y) - F(y-)) for a given uniform u.
inline double pit_with_uniform(const Distribution& d, double y, double u) {
  const double left = cdf_left(d, y);
  const double right = cdf(d, y);
  return std::clamp(left + u * (right - left), 0.0, 1.0);
}

/// Randomized PIT; consumes exactly one uniform from rng.
template <class URBG>
double pit(const Distribution& d, double y, URBG& rng) {
  return pit_with_uniform(d, y, uniform_open(rng));
}

}  // namespace corp
