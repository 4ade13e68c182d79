#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "waz/cli.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = waz::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::filesystem::path scratch(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "waz_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("invert command") {
  Run r = run({"invert", "--map", "square2d", "--target", "4,0"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["status"] == "ok");
  CHECK(std::abs(j["x"][0].get<double>() - 2.0) <= 1e-8);
  CHECK(std::abs(j["x"][1].get<double>()) <= 1e-8);
  CHECK(j["residual"].get<double>() <= 1e-8);
  CHECK(j["lift"]["complete"] == true);

  r = run({"invert", "--map", "identity2d", "--target=7,-1"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["x"][0].get<double>() == doctest::Approx(7.0));
  CHECK(j["x"][1].get<double>() == doctest::Approx(-1.0));

  r = run({"invert", "--map", "exp1d", "--target", "0"});
  CHECK(r.code == 1);
  j = json::parse(r.out);
  CHECK(j["status"] == "failure");
  CHECK(j["reason"] == "FiniteLife");
}

TEST_CASE("config errors exit 2") {
  CHECK(run({"invert", "--map", "nosuch", "--target", "1"}).code == 2);
  CHECK(run({"invert", "--map", "square2d"}).code == 2);
  CHECK(run({"invert", "--map", "square2d", "--target", "1,2,3"}).code == 2);
  CHECK(run({"invert", "--map", "square2d", "--target", "1,abc"}).code == 2);
  CHECK(run({"invert", "--target", "1"}).code == 2);
  CHECK(run({"invert", "--map", "square2d", "--expr", "x1", "--dim", "1", "--target", "1"}).code == 2);
  CHECK(run({"invert", "--expr", "x1 +", "--dim", "1", "--target", "1"}).code == 2);
  CHECK(run({"invert", "--expr", "x1", "--target", "1"}).code == 2);
  CHECK(run({"invert", "--map", "square2d", "--x0=0,0", "--target", "1,0"}).code == 2);
  CHECK(run({"invert", "--map", "square2d", "--target", "1,0", "--jacobian", "magic"}).code == 2);
  CHECK(run({"invert", "--map", "square2d", "--target", "1,0", "--dt-min", "0"}).code == 2);
  CHECK(run({"invert", "--map", "square2d", "--target", "1,0", "--eta-rel=-1"}).code == 2);
  CHECK(run({"trace", "--map", "square2d", "--start", "0,0"}).code == 2);
  CHECK(run({"trace", "--map", "square2d", "--format", "pgm"}).code == 2);
  CHECK(run({"basin", "--map", "exp1d"}).code == 2);
  CHECK(run({"basin", "--map", "square2d", "--bounds", "1,0,0,1"}).code == 2);
  CHECK(run({"certify", "--map", "square2d", "--radii", "2,1"}).code == 2);
  CHECK(run({"certify", "--map", "square2d", "--box", "-1,1,-1,1"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  const Run e = run({"invert", "--map", "nosuch", "--target", "1"});
  CHECK(e.err.find("nosuch") != std::string::npos);
}

TEST_CASE("help exits 0") {
  Run r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("invert") != std::string::npos);
  r = run({"certify", "--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("--lyapunov") != std::string::npos);
}

TEST_CASE("trace command") {
  Run r = run({"trace", "--map", "identity1d", "--start", "1"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x1,residual");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) {
      last = line;
      continue;
    }
    double t = 0, x = 0, res = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &x, &res) == 3);
    REQUIRE(std::abs(x - std::exp(-t)) <= 1e-8);
    ++rows;
  }
  CHECK(rows > 10);
  CHECK(last.rfind("# outcome=ConvergedToBase", 0) == 0);

  r = run({"trace", "--map", "square2d"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "t,x1,x2,residual\n0,1,0,0\n# outcome=ConvergedToBase t=0\n");

  r = run({"trace", "--map", "square2d", "--start", "0,1", "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["trajectory"]["outcome"]["tag"] == "FiniteLife");
  CHECK(std::abs(j["trajectory"]["outcome"]["param"].get<double>() - std::log(2.0)) <= 1e-2);

  const auto path = scratch("trace.csv");
  r = run({"trace", "--map", "identity1d", "--start", "1", "--out", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(slurp(path).rfind("t,x1,residual\n", 0) == 0);
}

TEST_CASE("basin command") {
  const auto prefix = scratch("identity");
  Run r = run({"basin", "--map", "identity2d", "--bounds=-1,1,-1,1", "--res", "21", "--out", prefix.string()});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["counts"]["InBasin"] == 441);
  CHECK(j["counts"]["Out"] == 0);
  const std::string pgm = slurp(prefix.string() + ".pgm");
  CHECK(pgm.rfind("P5\n21 21\n255\n", 0) == 0);
  CHECK(pgm.size() == std::string("P5\n21 21\n255\n").size() + 441);
  const std::string csv = slurp(prefix.string() + ".csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 442);
}

TEST_CASE("certify command") {
  Run r = run({"certify", "--map", "shear10", "--r0", "1.2"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE_FALSE(j["criterion_violations"].empty());
  double lowest = 0.0;
  bool near = false;
  for (const auto& v : j["criterion_violations"]) {
    const double val = v["value"].get<double>();
    lowest = std::min(lowest, val);
    const double dx = v["point"][0].get<double>() - 1.0, dy = v["point"][1].get<double>() - 0.5;
    if (std::hypot(dx, dy) < 0.1 && val <= -3.0) near = true;
  }
  CHECK(lowest <= -3.7);
  CHECK(near);

  r = run({"certify", "--map", "sinperturb"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["growth_fit"]["verdict"] == "AffineBoundHolds");
  CHECK(j["growth_fit"]["a"].get<double>() <= 2.01);
  CHECK(j["growth_fit"]["b"].get<double>() == 0.0);

  r = run({"certify", "--map", "exp1d", "--samples", "1000"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["growth_fit"]["verdict"] == "SuperlinearGrowth");
  CHECK(j["coercivity_trend"]["verdict"] == "NotCoercive");
}

TEST_CASE("list-fixtures command") {
  const Run r = run({"list-fixtures"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["fixtures"].size() == 9);
}

TEST_CASE("expressions and Jacobian sources from the command line") {
  Run r = run({"invert", "--expr", "x1^2 - x2^2; 2*x1*x2", "--dim", "2", "--x0=1,0", "--target", "4,0"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["x"][0].get<double>() == doctest::Approx(2.0));
  r = run({"invert", "--map", "square2d", "--jacobian", "fd", "--target", "0,2"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["x"][0].get<double>() == doctest::Approx(1.0));
  r = run({"invert", "--map", "square2d", "--jacobian", "analytic", "--target", "0,2"});
  REQUIRE(r.code == 0);
  r = run({"invert", "--map", "linear", "--matrix", "1,2,0,3", "--target", "3,3"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["x"][0].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("outputs are byte-identical across runs") {
  const std::vector<std::vector<std::string>> cmds = {
      {"invert", "--map", "exp2d", "--target=-1,2"},
      {"trace", "--map", "square2d", "--start", "0.3,1.7"},
      {"certify", "--map", "shear10", "--r0", "1.2", "--samples", "3000", "--lyapunov", "4"},
      {"basin", "--map", "square2d", "--res", "17", "--out", scratch("det").string()},
  };
  for (const auto& c : cmds) {
    const Run a = run(c), b = run(c);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}
