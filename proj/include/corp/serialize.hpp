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

// JSON encoding of library results and of predictive distributions.

#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "corp/diagrams.hpp"
#include "corp/distributions.hpp"
#include "corp/errors.hpp"
#include "corp/resampling.hpp"
#include "corp/scores.hpp"

namespace corp {

using Json = nlohmann::ordered_json;

inline Json to_json(const ScoreDecomposition& d) {
  Json j;
  j["score"] = d.mean_score;
  j["score_recalibrated"] = d.score_recalibrated;
  j["score_marginal"] = d.score_marginal;
  j["mcb"] = d.mcb;
  j["dsc"] = d.dsc;
  j["unc"] = d.unc;
  if (d.mcb_uncond) j["mcb_uncond"] = *d.mcb_uncond;
  if (d.mcb_cond) j["mcb_cond"] = *d.mcb_cond;
  if (d.shift_c) j["shift_c"] = *d.shift_c;
  if (d.r_star) j["r_star"] = *d.r_star;
  return j;
}

inline Json to_json(const CurveBand& b) {
  return Json{{"at", b.at}, {"lower", b.lower}, {"upper", b.upper}, {"level", b.level}};
}

inline Json to_json(const std::vector<CurvePoint>& pts) {
  Json arr = Json::array();
  for (const CurvePoint& p : pts) arr.push_back(Json::array({p.x, p.y}));
  return arr;
}

inline Json to_json(const ReliabilityDiagram& d) {
  Json j;
  j["functional"] = to_string(d.functional);
  j["points"] = to_json(d.points);
  j["decomposition"] = to_json(d.decomposition);
  if (d.band) j["band"] = to_json(*d.band);
  return j;
}

inline Json to_json(const Distribution& d) {
  return std::visit(
      overloaded{
          [](const Normal& k) { return Json{{"type", "normal"}, {"mu", k.mu}, {"sigma", k.sigma}}; },
          [](const TwoPieceNormal& k) {
            return Json{{"type", "two_piece_normal"},
                        {"mode", k.mode},
                        {"sigma1", k.sigma1},
                        {"sigma2", k.sigma2}};
          },
          [](const NormalMixture& k) {
            return Json{{"type", "normal_mixture"},
                        {"weights", k.weights},
                        {"mus", k.mus},
                        {"sigmas", k.sigmas}};
          },
          [](const Lopsided& k) {
            return Json{{"type", "lopsided"}, {"mu", k.mu}, {"delta", k.delta}};
          },
          [](const UniformMixture& k) {
            return Json{{"type", "uniform_mixture"}, {"weights", k.weights}, {"breaks", k.breaks}};
          },
          [](const Discrete& k) {
            return Json{{"type", "discrete"}, {"atoms", k.atoms}, {"probs", k.probs}};
          },
          [](const PiecewiseLinearCdf& k) {
            Json knots = Json::array();
            for (const CdfKnot& c : k.knots) knots.push_back(Json::array({c.x, c.p}));
            return Json{{"type", "piecewise_linear"}, {"knots", knots}};
          },
      },
      d.kind());
}

namespace detail {

inline double json_number(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing field '") + key + "'");
  if (!it->is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

inline std::vector<double> json_numbers(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing field '") + key + "'");
  if (!it->is_array()) throw ParseError(std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  out.reserve(it->size());
  for (const Json& v : *it) {
    if (!v.is_number()) throw ParseError(std::string("field '") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace detail

/// Parses {"type": ..., parameters...}. Malformed JSON shapes raise
/// ParseError; invalid parameter values raise DomainError.
inline Distribution distribution_from_json(const Json& j) {
  using detail::json_number;
  using detail::json_numbers;
  if (!j.is_object()) throw ParseError("distribution must be a JSON object");
  const auto t = j.find("type");
  if (t == j.end() || !t->is_string()) throw ParseError("distribution needs a string 'type'");
  const std::string type = t->get<std::string>();
  if (type == "normal") return Distribution::normal(json_number(j, "mu"), json_number(j, "sigma"));
  if (type == "two_piece_normal") {
    return Distribution::two_piece_normal(json_number(j, "mode"), json_number(j, "sigma1"),
                                          json_number(j, "sigma2"));
  }
  if (type == "normal_mixture") {
    return Distribution::normal_mixture(json_numbers(j, "weights"), json_numbers(j, "mus"),
                                        json_numbers(j, "sigmas"));
  }
  if (type == "lopsided") {
    return Distribution::lopsided(json_number(j, "mu"), json_number(j, "delta"));
  }
  if (type == "uniform_mixture") {
    return Distribution::uniform_mixture(json_numbers(j, "weights"), json_numbers(j, "breaks"));
  }
  if (type == "discrete") {
    return Distribution::discrete(json_numbers(j, "atoms"), json_numbers(j, "probs"));
  }
  if (type == "piecewise_linear") {
    const auto it = j.find("knots");
    if (it == j.end() || !it->is_array()) throw ParseError("field 'knots' must be an array");
    std::vector<CdfKnot> knots;
    for (const Json& k : *it) {
      if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
        throw ParseError("each knot must be a pair [x, F]");
      }
      knots.push_back({k[0].get<double>(), k[1].get<double>()});
    }
    return Distribution::piecewise_linear(std::move(knots));
  }
  throw ParseError("unknown distribution type '" + type + "'");
}

}  // namespace corp
