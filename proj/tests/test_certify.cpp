#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "waz/certify.hpp"
#include "waz/error.hpp"
#include "waz/fixtures.hpp"
#include "waz/flow.hpp"
#include "waz/report.hpp"
#include "waz/sampling.hpp"

using namespace waz;
using cplx = std::complex<double>;

namespace {

// Hand-derived criterion values.
double square_value(const Vec& x) {
  const cplx z(x[0], x[1]);
  return std::norm(z - 1.0) * ((z + 1.0) / (2.0 * z)).real();
}
double shear_value(const Vec& x) { return x[0] * x[0] + x[1] * x[1] - 10.0 * x[0] * x[0] * x[1]; }

}  // namespace

TEST_CASE("sampling stays in the requested sets and is reproducible") {
  const Vec c{1.0, -2.0, 0.5};
  const auto a = sample_ball(c, 0.7, 500, 3);
  const auto b = sample_ball(c, 0.7, 500, 3);
  CHECK(a == b);
  CHECK(a != sample_ball(c, 0.7, 500, 4));
  for (const Vec& x : a) REQUIRE(distance(x, c) < 0.7);
  for (const Vec& x : sample_sphere(c, 2.0, 300, 1)) REQUIRE(distance(x, c) == doctest::Approx(2.0).epsilon(1e-12));
  const auto s1 = sample_sphere(Vec{0.0}, 3.0, 50, 0);
  REQUIRE(s1.size() == 2);
  CHECK(s1[0][0] == -3.0);
  CHECK(s1[1][0] == 3.0);
  for (const Vec& x : sample_box(Vec{0.0, 1.0}, Vec{1.0, 3.0}, 200, 0)) {
    REQUIRE(x[0] >= 0.0);
    REQUIRE(x[0] <= 1.0);
    REQUIRE(x[1] >= 1.0);
    REQUIRE(x[1] <= 3.0);
  }
  // Planar ball samples fill the disc evenly: about a quarter inside r/2.
  const auto d = sample_ball(Vec{0.0, 0.0}, 1.0, 4000, 0);
  std::size_t inner = 0;
  for (const Vec& x : d) inner += norm(x) < 0.5 ? 1 : 0;
  CHECK(static_cast<double>(inner) / 4000.0 == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("criterion value examples") {
  const MapSpec id = fixtures::make("identity2d");
  CHECK(star_criterion_value(id, Vec{3.0, -4.0}) == doctest::Approx(25.0));
  const StarCriterionResult ri = check_star_criterion(id, 2.0, 1000, 0);
  CHECK(ri.violations.empty());
  CHECK(ri.evaluated == 1000);

  const MapSpec sh = fixtures::make("shear10");
  CHECK(star_criterion_value(sh, Vec{1.0, 0.5}) == doctest::Approx(-3.75).epsilon(1e-14));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const MapSpec sq = fixtures::make("square2d");
  for (int k = 0; k < 500; ++k) {
    const Vec x{u(rng), u(rng)};
    REQUIRE(star_criterion_value(sq, x) == doctest::Approx(square_value(x)).epsilon(1e-10).scale(1.0));
    REQUIRE(star_criterion_value(sh, x) == doctest::Approx(shear_value(x)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("criterion certificates agree with the analytic sign") {
  const MapSpec sq = fixtures::make("square2d");
  const StarCriterionResult r = check_star_criterion(sq, 0.9, 10000, 0);
  CHECK(r.violations.empty());
  CHECK(r.evaluated == 10000);
  // Brute-force oracle over the same samples.
  for (const Vec& x : sample_ball(sq.base_point(), 0.9, 10000, 0)) REQUIRE(square_value(x) >= 0.0);

  const MapSpec sh = fixtures::make("shear10");
  const StarCriterionResult rs = check_star_criterion(sh, 1.2, 10000, 0);
  REQUIRE_FALSE(rs.violations.empty());
  std::size_t oracle_negative = 0;
  for (const Vec& x : sample_ball(sh.base_point(), 1.2, 10000, 0)) {
    if (shear_value(x) < -1e-12 * (1.0 + dot(x, x))) ++oracle_negative;
  }
  CHECK(rs.violations.size() == oracle_negative);
  for (const Violation& v : rs.violations) {
    REQUIRE(v.value < 0.0);
    REQUIRE(norm(v.point) < 1.2);
    REQUIRE(v.value == doctest::Approx(shear_value(v.point)).epsilon(1e-10));
  }
  CHECK(rs.min_value <= -3.7);
  MESSAGE("shear10 sampled minimum " << rs.min_value << " at (" << rs.argmin[0] << ", " << rs.argmin[1] << ")");
}

TEST_CASE("Lyapunov monotonicity") {
  const MapSpec id = fixtures::make("identity2d");
  const Trajectory tr = integrate_flow(id, Vec{1.0, -2.0}, kForever);
  const ScalarFn k = half_squared_distance(id.base_point());
  for (const auto& s : tr.samples) {
    REQUIRE(k(s.x) == doctest::Approx(2.5 * std::exp(-2.0 * s.param)).epsilon(1e-7).scale(1e-16));
  }
  const Trajectory constant = integrate_flow(id, id.base_point(), kForever);
  const std::vector<Trajectory> both{tr, constant};
  const auto res = check_lyapunov(k, both);
  REQUIRE(res.size() == 2);
  CHECK(res[0].monotone);
  CHECK(res[1].monotone);
  CHECK(res[1].samples == 1);

  const MapSpec sh = fixtures::make("shear10");
  const std::vector<Trajectory> shear{integrate_flow(sh, Vec{1.0, 0.5}, kForever)};
  const auto rs = check_lyapunov(half_squared_distance(sh.base_point()), shear);
  CHECK_FALSE(rs[0].monotone);
  REQUIRE(rs[0].first_violation.has_value());
  CHECK(*rs[0].first_violation == 1);
  CHECK(rs[0].max_increase > 0.0);
}

TEST_CASE("coercivity probe examples") {
  const Vec radii{1.0, 2.0, 4.0};
  const CoercivityTrend id = coercivity_probe(fixtures::make("identity2d"), radii, 360);
  CHECK(id.verdict == CoercivityVerdict::Coercive);
  for (std::size_t i = 0; i < 3; ++i) CHECK(id.minima[i] == doctest::Approx(radii[i]).epsilon(1e-12));

  const CoercivityTrend sq = coercivity_probe(fixtures::make("square2d"), radii, 360);
  CHECK(sq.verdict == CoercivityVerdict::Coercive);
  for (std::size_t i = 0; i < 3; ++i) CHECK(sq.minima[i] == doctest::Approx(radii[i] * radii[i]).epsilon(1e-12));

  const Vec er{1.0, 2.0, 3.0};
  const CoercivityTrend ex = coercivity_probe(fixtures::make("exp2d"), er, 720);
  CHECK(ex.verdict == CoercivityVerdict::NotCoercive);
  // The minimum sits at z = -R, which the sampled directions approach.
  for (std::size_t i = 0; i < 3; ++i) CHECK(ex.minima[i] == doctest::Approx(std::exp(-er[i])).epsilon(1e-3));
  CHECK(ex.minima.back() < 0.1);

  const CoercivityTrend e1 = coercivity_probe(fixtures::make("exp1d"), Vec{1.0, 2.0, 4.0, 8.0}, 2);
  CHECK(e1.verdict == CoercivityVerdict::NotCoercive);
}

TEST_CASE("support line fit") {
  const Vec s{1.0, 2.0, 4.0, 8.0};
  const SupportLine flat = fit_support_line(s, Vec{0.5, 0.5, 0.5, 0.5});
  CHECK(flat.a == doctest::Approx(0.5));
  CHECK(flat.b == 0.0);
  const SupportLine line = fit_support_line(s, Vec{2.0, 3.0, 5.0, 9.0});
  CHECK(line.a == doctest::Approx(1.0));
  CHECK(line.b == doctest::Approx(1.0));
  // Decreasing data is bounded by a constant.
  const SupportLine dec = fit_support_line(s, Vec{4.0, 3.0, 1.0, 0.5});
  CHECK(dec.b == 0.0);
  CHECK(dec.a == doctest::Approx(4.0));
  // The line dominates every point.
  const Vec g{1.0, 5.0, 2.0, 7.0};
  const SupportLine mix = fit_support_line(s, g);
  for (std::size_t i = 0; i < 4; ++i) CHECK(mix.a + mix.b * s[i] >= g[i] - 1e-12);
}

TEST_CASE("growth probe examples") {
  const Vec radii{1.0, 2.0, 4.0, 8.0, 16.0};
  fixtures::FixtureOptions opts;
  opts.matrix = Matrix{{3.0, 1.0}, {0.0, 2.0}};
  const MapSpec lin = fixtures::make("linear", opts);
  const GrowthModel gl = growth_probe(lin, radii, 64);
  // Direct oracle: 1 / sigma_min of [[3,1],[0,2]] from the 2x2 closed form.
  const double tr = 9.0 + 1.0 + 4.0, det = 6.0;
  const double smin = std::sqrt((tr - std::sqrt(tr * tr - 4.0 * det * det)) / 2.0);
  CHECK(gl.verdict == GrowthVerdict::AffineBoundHolds);
  CHECK(gl.b == 0.0);
  CHECK(gl.a == doctest::Approx(1.0 / smin).epsilon(1e-6));

  const GrowthModel gs = growth_probe(fixtures::make("sinperturb"), radii, 720);
  CHECK(gs.verdict == GrowthVerdict::AffineBoundHolds);
  CHECK(gs.a <= 2.0 + 1e-6);
  CHECK(gs.b <= 1e-3);
  for (std::size_t i = 0; i < radii.size(); ++i) CHECK(gs.g[i] <= (gs.a + gs.b * radii[i]) * (1.0 + 1e-6));

  const GrowthModel ge = growth_probe(fixtures::make("exp1d"), radii, 2);
  CHECK(ge.verdict == GrowthVerdict::SuperlinearGrowth);
  for (std::size_t i = 0; i < radii.size(); ++i) CHECK(ge.g[i] == doctest::Approx(std::exp(radii[i])).epsilon(1e-12));
}

TEST_CASE("bounded growth on a box") {
  const BoxSupResult id = bounded_growth_on_box(fixtures::make("identity2d"), Vec{-3.0, 1.0}, Vec{2.0, 4.0}, 200);
  CHECK(id.sup == doctest::Approx(1.0));
  CHECK(id.singular_points.empty());

  const MapSpec sq = fixtures::make("square2d");
  const BoxSupResult bs = bounded_growth_on_box(sq, Vec{0.5, 0.5}, Vec{2.0, 2.0}, 2000);
  // Dense-grid oracle of 1 / (2|z|).
  double oracle = 0.0;
  for (int i = 0; i <= 400; ++i)
    for (int j = 0; j <= 400; ++j) {
      const double a = 0.5 + 1.5 * i / 400.0, b = 0.5 + 1.5 * j / 400.0;
      oracle = std::max(oracle, 1.0 / (2.0 * std::hypot(a, b)));
    }
  CHECK(oracle == doctest::Approx(1.0 / (2.0 * std::sqrt(0.5))));
  CHECK(std::abs(bs.sup - oracle) <= 0.05 * oracle);

  const BoxSupResult cu = bounded_growth_on_box(fixtures::make("cubic1d"), Vec{-1.0}, Vec{1.0}, 500);
  CHECK(cu.sup == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(bounded_growth_on_box(sq, Vec{-1.0, -1.0}, Vec{1.0, 1.0}, 10), Error);
}

TEST_CASE("basin of the identity") {
  BasinSpec spec;
  spec.lo = {-1.0, -1.0};
  spec.hi = {1.0, 1.0};
  spec.resolution = 21;
  const BasinGrid g = estimate_basin(fixtures::make("identity2d"), spec);
  CHECK(g.cells.size() == 441);
  CHECK(g.counts().in_basin == 441);

  spec.lo = {-2.0, -2.0};
  spec.hi = {2.0, 2.0};
  CHECK(estimate_basin(fixtures::make("identity2d"), spec).counts().in_basin == 441);
  CHECK_THROWS_AS(estimate_basin(fixtures::make("exp1d"), spec), Error);
}

TEST_CASE("square map basin matches the right half-plane") {
  const MapSpec sq = fixtures::make("square2d");
  BasinSpec spec;
  spec.lo = {-2.0, -2.0};
  spec.hi = {2.0, 2.0};
  spec.resolution = 41;
  spec.threads = 2;
  const BasinGrid g = estimate_basin(sq, spec);
  std::size_t tested = 0, agree = 0;
  for (std::size_t j = 0; j < 41; ++j)
    for (std::size_t i = 0; i < 41; ++i) {
      const Vec c = g.center(i, j);
      if (std::abs(c[0]) <= 0.05) continue;
      ++tested;
      const CellCode want = c[0] > 0 ? CellCode::InBasin : CellCode::Out;
      agree += g.at(i, j).code == want ? 1 : 0;
    }
  CHECK(static_cast<double>(agree) >= 0.99 * static_cast<double>(tested));

  // Coherence: in-basin cells round-trip, finite-life cells stay dead under a tighter floor.
  TrackOptions tight;
  tight.dt_min = 1e-13;
  std::size_t checked_out = 0;
  for (std::size_t j = 0; j < 41; j += 4)
    for (std::size_t i = 0; i < 41; i += 4) {
      const BasinCell& cell = g.at(i, j);
      const Vec c = g.center(i, j);
      if (cell.code == CellCode::InBasin) {
        const InvertResult r = invert_at(sq, sq.evaluate(c));
        REQUIRE(r.ok);
        REQUIRE(distance(r.x, c) <= 1e-6);
      } else if (cell.outcome == OutcomeKind::FiniteLife) {
        ++checked_out;
        const Trajectory tr = integrate_flow(sq, c, kForever, tight);
        REQUIRE(tr.outcome.kind != OutcomeKind::ConvergedToBase);
      }
    }
  CHECK(checked_out > 0);
}

TEST_CASE("star-shaped image of the square map basin") {
  const MapSpec sq = fixtures::make("square2d");
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int found = 0;
  while (found < 100) {
    Vec x{u(rng), u(rng)};
    if (!sq.domain().contains(x)) continue;
    const Trajectory tr = integrate_flow(sq, x, kForever);
    if (tr.outcome.kind != OutcomeKind::ConvergedToBase) continue;
    ++found;
    const Vec y = sq.evaluate(x);
    for (double s : {0.25, 0.5, 0.75}) {
      const Vec ys = axpy(sq.base_image(), s, sub(y, sq.base_image()));
      REQUIRE(invert_at(sq, ys).ok);
    }
  }
}

TEST_CASE("basin output is independent of the worker count") {
  const MapSpec ex = fixtures::make("exp2d");
  BasinSpec spec;
  spec.lo = {-3.0, -7.0};
  spec.hi = {3.0, 7.0};
  spec.resolution = 25;
  spec.threads = 1;
  const BasinGrid a = estimate_basin(ex, spec);
  spec.threads = 4;
  const BasinGrid b = estimate_basin(ex, spec);
  CHECK(to_pgm(a) == to_pgm(b));
  CHECK(to_csv(a) == to_csv(b));
  std::size_t tested = 0, agree = 0;
  for (std::size_t j = 0; j < 25; ++j)
    for (std::size_t i = 0; i < 25; ++i) {
      const Vec c = a.center(i, j);
      if (std::abs(std::abs(c[1]) - M_PI) <= 0.1) continue;
      ++tested;
      const CellCode want = std::abs(c[1]) < M_PI ? CellCode::InBasin : CellCode::Out;
      agree += a.at(i, j).code == want ? 1 : 0;
    }
  CHECK(static_cast<double>(agree) >= 0.99 * static_cast<double>(tested));
}

TEST_CASE("raster formats") {
  BasinSpec spec;
  spec.lo = {-1.0, -1.0};
  spec.hi = {1.0, 1.0};
  spec.resolution = 3;
  const BasinGrid g = estimate_basin(fixtures::make("square2d"), spec);
  // The centre cell is the puncture.
  CHECK(g.at(1, 1).code == CellCode::OutsideDomain);
  const std::string pgm = to_pgm(g);
  const std::string header = "P5\n3 3\n255\n";
  REQUIRE(pgm.size() == header.size() + 9);
  CHECK(pgm.substr(0, header.size()) == header);
  // Top row is the largest x2, i.e. j = 2.
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(static_cast<unsigned char>(pgm[header.size() + i]) == static_cast<unsigned>(g.at(i, 2).code));
    CHECK(static_cast<unsigned char>(pgm[header.size() + 6 + i]) == static_cast<unsigned>(g.at(i, 0).code));
  }
  CHECK(static_cast<unsigned char>(pgm[header.size() + 4]) == 64);
  const std::string csv = to_csv(g);
  CHECK(csv.rfind("x,y,code\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
}

TEST_CASE("report flags use sampled wording") {
  CertReport rep;
  rep.map_label = "shear10";
  const MapSpec sh = fixtures::make("shear10");
  rep.criterion = check_star_criterion(sh, 1.2, 2000, 0);
  rep.growth = growth_probe(sh, Vec{1.0, 2.0, 4.0}, 90);
  summarize(rep);
  REQUIRE_FALSE(rep.flags.empty());
  for (const auto& f : rep.flags) CHECK(f.find("(sampled)") != std::string::npos);
}
