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

// corp: command-line calibration diagnostics.
//
// Exit codes: 0 success, 2 input or usage error, 3 numeric or domain error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corp/corp.hpp"

namespace {

using corp::DomainError;
using corp::Json;
using corp::ParseError;

struct Options {
  std::string functional = "mean";
  std::string input = "-";
  std::string format;
  std::string output = "-";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> resamples;
  double level = 0.9;
  std::string hypothesis;
  bool extended = false;
  std::string svg;
  // simulate
  std::string model = "perfect";
  std::size_t n = 400;
  double eta0 = 1.5;
  double delta0 = 0.7;
  double c = 0.5;
};

// Stream tag for randomized PIT uniforms.
constexpr std::uint64_t kPitStream = 0x9177ULL;

struct Data {
  bool distributional = false;
  std::vector<corp::Distribution> forecasts;
  std::vector<double> x;
  std::vector<double> y;
};

std::string input_format(const Options& o) {
  if (!o.format.empty()) {
    if (o.format != "csv" && o.format != "jsonl") {
      throw ParseError("--format must be 'csv' or 'jsonl'");
    }
    return o.format;
  }
  const auto dot = o.input.rfind('.');
  if (o.input != "-" && dot != std::string::npos) {
    const std::string ext = o.input.substr(dot + 1);
    if (ext == "jsonl" || ext == "json" || ext == "ndjson") return "jsonl";
  }
  return "csv";
}

Data load(const Options& o, const corp::Functional& f) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (o.input != "-") {
    file.open(o.input);
    if (!file) throw ParseError("cannot open input '" + o.input + "'");
    in = &file;
  }
  Data d;
  if (input_format(o) == "csv") {
    corp::XYData xy = corp::read_csv(*in);
    d.x = std::move(xy.x);
    d.y = std::move(xy.y);
    return d;
  }
  d.distributional = true;
  for (corp::ForecastCase& c : corp::read_jsonl(*in)) {
    d.x.push_back(corp::functional_of(c.forecast, f));
    d.y.push_back(c.y);
    d.forecasts.push_back(std::move(c.forecast));
  }
  return d;
}

void require_distributional(const Data& d, const char* command) {
  if (!d.distributional) {
    throw ParseError(std::string(command) + " needs distributional (jsonl) input");
  }
}

std::uint64_t require_seed(const Options& o) {
  if (!o.seed) throw ParseError("--seed is required for randomized output");
  return *o.seed;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open output '" + path + "'");
  out << text;
}

void write_json(const Options& o, const Json& j) { write_text(o.output, j.dump(2) + "\n"); }

corp::Hypothesis hypothesis_for(const Options& o, const Data& d, const corp::Functional& f) {
  if (o.hypothesis == "auto") return corp::Hypothesis::Auto;
  if (o.hypothesis == "residual") return corp::Hypothesis::Residual;
  if (!o.hypothesis.empty()) throw ParseError("--hypothesis must be 'auto' or 'residual'");
  const bool binary = f.kind() == corp::FunctionalKind::ThresholdNonExceedance;
  return d.distributional || binary ? corp::Hypothesis::Auto : corp::Hypothesis::Residual;
}

// Forecast distributions for auto-calibration resampling. Point probability
// forecasts of a threshold functional induce two-point laws on the binary
// outcome.
std::vector<corp::Distribution> auto_forecasts(const Data& d, const corp::Functional& f) {
  if (d.distributional) return d.forecasts;
  if (f.kind() != corp::FunctionalKind::ThresholdNonExceedance) {
    throw ParseError("auto-calibration resampling needs distributional (jsonl) input");
  }
  const double t = f.threshold();
  std::vector<corp::Distribution> out;
  out.reserve(d.x.size());
  for (double p : d.x) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability out of range");
    out.push_back(corp::Distribution::discrete({t, t + 1.0}, {p, 1.0 - p}));
  }
  return out;
}

corp::ResampleSet resamples(const Options& o, const Data& d, const corp::Functional& f,
                            std::size_t m) {
  const std::uint64_t seed = require_seed(o);
  if (hypothesis_for(o, d, f) == corp::Hypothesis::Auto) {
    return corp::resample_auto(auto_forecasts(d, f), f, m, seed);
  }
  return corp::resample_residual(d.x, d.y, f, m, seed);
}

int run_decompose(const Options& o) {
  const corp::Functional f = corp::parse_functional(o.functional);
  const Data d = load(o, f);
  const corp::ScoreDecomposition s =
      o.extended ? corp::extended_decompose(d.x, d.y, f) : corp::decompose(d.x, d.y, f);
  Json j;
  j["functional"] = corp::to_string(f);
  j["n"] = d.x.size();
  j.update(corp::to_json(s));
  write_json(o, j);
  return 0;
}

int run_reliability(const Options& o) {
  const corp::Functional f = corp::parse_functional(o.functional);
  const Data d = load(o, f);
  corp::ReliabilityDiagram diag = corp::reliability_diagram(d.x, d.y, f);
  if (o.resamples) {
    diag.band = corp::consistency_band(resamples(o, d, f, *o.resamples), f, o.level);
  }
  Json j;
  j["n"] = d.x.size();
  j.update(corp::to_json(diag));
  if (diag.band) j["hypothesis"] = corp::to_string(hypothesis_for(o, d, f));
  write_json(o, j);
  if (!o.svg.empty()) {
    corp::SvgPlot plot;
    plot.title = "Reliability diagram (" + corp::to_string(f) + ")";
    plot.x_label = "Forecast value";
    plot.y_label = "Conditional functional";
    plot.curve = diag.points;
    plot.band = diag.band;
    plot.histogram_values = d.x;
    plot.annotation = corp::decomposition_annotation(corp::score_label(f), diag.decomposition);
    write_text(o.svg, corp::render_svg(plot));
  }
  return 0;
}

int run_band(const Options& o) {
  const corp::Functional f = corp::parse_functional(o.functional);
  const Data d = load(o, f);
  const corp::CurveBand band =
      corp::consistency_band(resamples(o, d, f, o.resamples.value_or(99)), f, o.level);
  Json j = corp::to_json(band);
  j["hypothesis"] = corp::to_string(hypothesis_for(o, d, f));
  write_json(o, j);
  return 0;
}

int run_pit(const Options& o) {
  const Data d = load(o, corp::Functional::mean());
  require_distributional(d, "pit");
  corp::RandomStream rng(require_seed(o), kPitStream);
  std::vector<double> pits;
  pits.reserve(d.y.size());
  for (std::size_t i = 0; i < d.y.size(); ++i) pits.push_back(corp::pit(d.forecasts[i], d.y[i], rng));
  const auto curve = corp::pit_reliability(pits);
  const double ks = corp::ks_uniform(pits);
  Json j;
  j["n"] = pits.size();
  j["ks"] = ks;
  j["ks_critical_05"] = corp::ks_critical_value_05(pits.size());
  j["curve"] = corp::to_json(curve);
  std::optional<corp::CurveBand> band;
  if (o.resamples) {
    band = corp::pit_band(pits.size(), *o.resamples, o.level, *o.seed);
    j["band"] = corp::to_json(*band);
  }
  write_json(o, j);
  if (!o.svg.empty()) {
    corp::SvgPlot plot;
    plot.title = "PIT reliability diagram";
    plot.x_label = "u";
    plot.y_label = "Empirical CDF of PIT";
    plot.curve = curve;
    plot.step = true;
    plot.band = band;
    plot.unit_square = true;
    plot.annotation = {"KS  " + corp::detail::fmt(ks, "%.3f")};
    write_text(o.svg, corp::render_svg(plot));
  }
  return 0;
}

int run_marginal(const Options& o) {
  const Data d = load(o, corp::Functional::mean());
  require_distributional(d, "marginal");
  const auto curve = corp::marginal_reliability(d.forecasts, d.y);
  Json j;
  j["n"] = d.y.size();
  j["curve"] = corp::to_json(curve);
  std::optional<corp::CurveBand> band;
  if (o.resamples) {
    band = corp::marginal_band(d.forecasts, *o.resamples, o.level, require_seed(o));
    j["band"] = corp::to_json(*band);
  }
  write_json(o, j);
  if (!o.svg.empty()) {
    corp::SvgPlot plot;
    plot.title = "Marginal reliability diagram";
    plot.x_label = "Average forecast NEP";
    plot.y_label = "Empirical NEP";
    plot.curve = curve;
    plot.band = band;
    plot.unit_square = true;
    write_text(o.svg, corp::render_svg(plot));
  }
  return 0;
}

int run_simulate(const Options& o) {
  corp::Scenario s;
  if (o.model == "perfect") {
    s = corp::Scenario::perfect();
  } else if (o.model == "unconditional") {
    s = corp::Scenario::unconditional();
  } else if (o.model == "unfocused") {
    s = corp::Scenario::unfocused(o.eta0);
  } else if (o.model == "lopsided") {
    s = corp::Scenario::lopsided(o.delta0);
  } else if (o.model == "piecewise_uniform") {
    s = corp::Scenario::piecewise_uniform(o.c);
  } else {
    throw ParseError("unknown model '" + o.model + "'");
  }
  std::ostringstream out;
  corp::write_jsonl(out, corp::gen_scenario(s, o.n, require_seed(o)));
  write_text(o.output, out.str());
  return 0;
}

int run_test(const Options& o) {
  const corp::Functional f = corp::parse_functional(o.functional);
  const Data d = load(o, f);
  const corp::ResampleSet rs = resamples(o, d, f, o.resamples.value_or(99));
  const corp::CalibrationTest t = corp::mcb_test(d.y, rs, f);
  Json q;
  for (double p : {0.05, 0.5, 0.9, 0.95}) {
    q[corp::detail::format_number(p)] = corp::order_statistic_quantile(t.resampled_mcb, p);
  }
  Json j;
  j["functional"] = corp::to_string(f);
  j["hypothesis"] = corp::to_string(t.hypothesis);
  j["n"] = d.x.size();
  j["m"] = t.resampled_mcb.size();
  j["observed_mcb"] = t.observed_mcb;
  j["resampled_mcb_quantiles"] = q;
  j["p_value"] = t.p_value;
  write_json(o, j);
  return 0;
}

void add_io(CLI::App* cmd, Options& o) {
  cmd->add_option("--input,-i", o.input, "Input file, '-' for stdin");
  cmd->add_option("--format", o.format, "Input format: csv or jsonl (default: from extension)");
  cmd->add_option("--output,-o", o.output, "Output file, '-' for stdout");
}

void add_functional(CLI::App* cmd, Options& o) {
  cmd->add_option("--functional,-f", o.functional, "Functional, e.g. mean, quantile:0.5");
}

void add_random(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--resamples,-m", o.resamples, "Number of Monte Carlo resamples");
  cmd->add_option("--level", o.level, "Band coverage level")->check(CLI::Range(0.0, 1.0));
}

void add_hypothesis(CLI::App* cmd, Options& o) {
  cmd->add_option("--hypothesis", o.hypothesis, "Resampling hypothesis: auto or residual");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibration diagnostics for point and distributional forecasts"};
  app.require_subcommand(1);
  Options o;

  auto* decompose = app.add_subcommand("decompose", "Score decomposition MCB - DSC + UNC");
  add_io(decompose, o);
  add_functional(decompose, o);
  decompose->add_flag("--extended", o.extended, "Split MCB into unconditional and conditional parts");

  auto* reliability = app.add_subcommand("reliability", "Reliability diagram with optional band");
  add_io(reliability, o);
  add_functional(reliability, o);
  add_random(reliability, o);
  add_hypothesis(reliability, o);
  reliability->add_option("--svg", o.svg, "Write the diagram as SVG to this path");

  auto* band = app.add_subcommand("band", "Consistency band of the reliability curve");
  add_io(band, o);
  add_functional(band, o);
  add_random(band, o);
  add_hypothesis(band, o);

  auto* pit = app.add_subcommand("pit", "PIT reliability diagram");
  add_io(pit, o);
  add_random(pit, o);
  pit->add_option("--svg", o.svg, "Write the diagram as SVG to this path");

  auto* marginal = app.add_subcommand("marginal", "Marginal reliability diagram");
  add_io(marginal, o);
  add_random(marginal, o);
  marginal->add_option("--svg", o.svg, "Write the diagram as SVG to this path");

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic scenario as JSONL");
  simulate->add_option("--model", o.model,
                       "perfect, unconditional, unfocused, lopsided or piecewise_uniform");
  simulate->add_option("-n", o.n, "Number of cases")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", o.seed, "Random seed");
  simulate->add_option("--eta0", o.eta0, "Unfocused offset");
  simulate->add_option("--delta0", o.delta0, "Lopsided skew");
  simulate->add_option("--c", o.c, "Latent spread for piecewise_uniform");
  simulate->add_option("--output,-o", o.output, "Output file, '-' for stdout");

  auto* test = app.add_subcommand("test", "Monte Carlo MCB calibration test");
  add_io(test, o);
  add_functional(test, o);
  add_random(test, o);
  add_hypothesis(test, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*decompose) return run_decompose(o);
    if (*reliability) return run_reliability(o);
    if (*band) return run_band(o);
    if (*pit) return run_pit(o);
    if (*marginal) return run_marginal(o);
    if (*simulate) return run_simulate(o);
    if (*test) return run_test(o);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
