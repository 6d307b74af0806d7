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

#include <sstream>
#include <string>

#include "cli_runner.hpp"
#include "corp/io.hpp"

using namespace corp;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using clitest::run;
using clitest::TempDir;

namespace {

std::string xy_csv(const std::vector<double>& x, const std::vector<double>& y) {
  std::ostringstream out;
  write_csv(out, {x, y});
  return out.str();
}

Json parse(const clitest::Run& r) {
  INFO(r.err);
  REQUIRE(r.code == 0);
  return Json::parse(r.out);
}

}  // namespace

TEST_CASE("decompose on point forecasts", "[cli]") {
  TempDir dir;
  const XYData k = kvalseth_data();
  const std::string ols = dir.file("ols.csv");
  clitest::spit(ols, xy_csv(fit_ols(k.x, k.y).predict(k.x), k.y));
  const Json a = parse(run(dir, "decompose -i " + ols));
  CHECK(a["functional"] == "mean");
  CHECK(a["n"] == 9);
  CHECK_THAT(a["r_star"].get<double>(), WithinAbs(0.779, 5e-4));
  CHECK_THAT(a["unc"].get<double>(), WithinAbs(12.0, 1e-9));

  const std::string lad = dir.file("lad.csv");
  clitest::spit(lad, xy_csv(fit_lad(k.x, k.y).predict(k.x), k.y));
  const Json b = parse(run(dir, "decompose -f quantile:0.5 -i " + lad));
  CHECK_THAT(b["r_star"].get<double>(), WithinAbs(0.692, 5e-4));

  const std::string flat = dir.file("flat.csv");
  clitest::spit(flat, xy_csv(std::vector<double>(9, 9.0), k.y));
  const Json c = parse(run(dir, "decompose --format csv -i " + flat));
  CHECK(c["mcb"] == 0.0);
  CHECK(c["dsc"] == 0.0);

  const Json e = parse(run(dir, "decompose --extended -i " + ols));
  CHECK(e.contains("mcb_uncond"));
  CHECK(e.contains("mcb_cond"));
}

TEST_CASE("exit codes", "[cli]") {
  TempDir dir;
  const std::string bad = dir.file("bad.csv");
  clitest::spit(bad, "x,y\n1,oops\n");
  const auto r = run(dir, "decompose -i " + bad);
  CHECK(r.code == 2);
  CHECK_THAT(r.err, ContainsSubstring("line 2"));
  CHECK(run(dir, "decompose -i " + dir.file("missing.csv")).code == 2);
  CHECK(run(dir, "nonsense").code == 2);
  CHECK(run(dir, "decompose --functional quantile:2 -i " + bad).code == 2);

  const std::string dom = dir.file("dom.jsonl");
  clitest::spit(dom, "{\"dist\":{\"type\":\"normal\",\"mu\":0,\"sigma\":-1},\"y\":0}\n");
  CHECK(run(dir, "decompose -i " + dom).code == 3);

  const std::string ok = dir.file("ok.csv");
  clitest::spit(ok, "x,y\n1,2\n2,3\n3,3\n");
  CHECK(run(dir, "band -i " + ok).code == 2);
  CHECK(run(dir, "band --seed 1 --resamples 1 -i " + ok).code == 3);
  CHECK(run(dir, "pit -i " + ok + " --seed 1").code == 2);
  CHECK(run(dir, "--help").code == 0);
}

TEST_CASE("simulate then analyse", "[cli]") {
  TempDir dir;
  const std::string sim = dir.file("sim.jsonl");
  REQUIRE(run(dir, "simulate --model unfocused -n 400 --seed 3 -o " + sim).code == 0);
  std::istringstream in(clitest::slurp(sim));
  const auto cases = read_jsonl(in);
  REQUIRE(cases.size() == 400);
  for (const auto& c : cases) CHECK(to_json(c.forecast)["type"] == "normal_mixture");

  std::vector<double> x, y;
  for (const auto& c : cases) {
    x.push_back(mean(c.forecast));
    y.push_back(c.y);
  }
  const auto direct = decompose(x, y, Functional::mean());
  const Json d = parse(run(dir, "decompose -i " + sim));
  CHECK_THAT(d["mcb"].get<double>(), WithinAbs(direct.mcb, 1e-12));
  CHECK_THAT(d["dsc"].get<double>(), WithinAbs(direct.dsc, 1e-12));

  const std::string perfect = dir.file("perfect.jsonl");
  REQUIRE(run(dir, "simulate -n 400 --seed 4 -o " + perfect).code == 0);
  const Json p = parse(run(dir, "pit --seed 5 -i " + perfect));
  CHECK(p["ks"].get<double>() < 0.10);
  CHECK(p["n"] == 400);

  const Json m = parse(run(dir, "marginal --seed 6 -m 20 -i " + perfect));
  CHECK(m.contains("band"));
  CHECK(m["band"]["at"].size() == 101);

  const Json t = parse(run(dir, "test --seed 7 -m 19 -i " + perfect));
  CHECK(t["hypothesis"] == "auto");
  CHECK(t["m"] == 19);
  CHECK(t["p_value"].get<double>() > 0.0);
  CHECK(t["p_value"].get<double>() <= 1.0);
}

TEST_CASE("reliability output and svg", "[cli]") {
  TempDir dir;
  const std::string sim = dir.file("sim.jsonl");
  REQUIRE(run(dir, "simulate --model lopsided -n 200 --seed 8 -o " + sim).code == 0);
  const std::string s1 = dir.file("a.svg");
  const std::string s2 = dir.file("b.svg");
  const auto r1 = run(dir, "reliability -f threshold:2.0 --seed 9 -m 30 --svg " + s1 + " -i " + sim);
  const auto r2 = run(dir, "reliability -f threshold:2.0 --seed 9 -m 30 --svg " + s2 + " -i " + sim);
  const Json j = parse(r1);
  CHECK(r1.out == r2.out);
  CHECK(clitest::slurp(s1) == clitest::slurp(s2));
  CHECK_THAT(clitest::slurp(s1), ContainsSubstring("BS"));
  CHECK(j["hypothesis"] == "auto");
  CHECK(j.contains("band"));
  for (const auto& pt : j["points"]) {
    CHECK(pt[0].get<double>() >= 0.0);
    CHECK(pt[1].get<double>() <= 1.0);
  }

  const std::string pts = dir.file("pts.csv");
  clitest::spit(pts, "x,y\n0.1,0\n0.4,1\n0.8,1\n0.3,0\n");
  const Json b = parse(run(dir, "band -f threshold:0 --seed 2 -i " + pts));
  CHECK(b["hypothesis"] == "auto");
  const Json res = parse(run(dir, "band --seed 2 -m 10 -i " + pts));
  CHECK(res["hypothesis"] == "residual");
}
