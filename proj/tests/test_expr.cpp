#include <cmath>
#include <random>

#include "doctest.h"
#include "waz/dual.hpp"
#include "waz/error.hpp"
#include "waz/expr.hpp"
#include "waz/fixtures.hpp"
#include "waz/map.hpp"

using namespace waz;

namespace {

Error caught(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected waz::Error");
  return Error(ErrorKind::InvalidArgument, "");
}

// Text forms of every fixture; the map objects are the oracles.
struct TextFixture {
  const char* name;
  const char* src;
};
constexpr TextFixture kTextFixtures[] = {
    {"identity1d", "x1"},
    {"identity2d", "x1; x2"},
    {"linear", "2*x1; 4*x2"},
    {"square2d", "x1^2 - x2^2; 2*x1*x2"},
    {"exp1d", "exp(x1)"},
    {"exp2d", "exp(x1)*cos(x2); exp(x1)*sin(x2)"},
    {"shear10", "x1; x2 + 10*x1^2"},
    {"sinperturb", "x1 + 0.5*sin(x1); x2 + 0.5*sin(x2)"},
    {"cubic1d", "x1^3 + x1"},
};

}  // namespace

TEST_CASE("parse examples") {
  const auto id = expr::parse("x1; x2", 2);
  REQUIRE(id.size() == 2);
  CHECK(expr::eval(id[0], Vec{3.0, 4.0}) == 3.0);
  CHECK(expr::eval(id[1], Vec{3.0, 4.0}) == 4.0);

  const auto sq = expr::parse("x1^2 - x2^2; 2*x1*x2", 2);
  const MapSpec fx = fixtures::make("square2d");
  for (const Vec& x : {Vec{1.0, 2.0}, Vec{-0.3, 0.8}, Vec{2.5, -1.5}}) {
    const Vec y = fx.evaluate(x);
    CHECK(expr::eval(sq[0], x) == y[0]);
    CHECK(expr::eval(sq[1], x) == y[1]);
  }

  const Error e = caught([] { expr::parse("x1 +", 1); });
  CHECK(e.kind() == ErrorKind::SyntaxError);
  REQUIRE(e.offset().has_value());
  CHECK(*e.offset() == 4);
}

TEST_CASE("parse errors") {
  CHECK(caught([] { expr::parse("x1; x1", 1); }).kind() == ErrorKind::ArityError);
  CHECK(caught([] { expr::parse("x1", 2); }).kind() == ErrorKind::ArityError);
  CHECK(caught([] { expr::parse("x3", 2); }).kind() == ErrorKind::UnknownIdentifier);
  CHECK(caught([] { expr::parse("y + 1", 1); }).kind() == ErrorKind::UnknownIdentifier);
  CHECK(caught([] { expr::parse("foo(x1)", 1); }).kind() == ErrorKind::UnknownIdentifier);
  CHECK(caught([] { expr::parse("", 1); }).kind() == ErrorKind::SyntaxError);

  const Error frac = caught([] { expr::parse("x1^0.5", 1); });
  CHECK(frac.kind() == ErrorKind::SyntaxError);
  CHECK(*frac.offset() == 3);

  const Error paren = caught([] { expr::parse("(x1 + 2", 1); });
  CHECK(paren.kind() == ErrorKind::SyntaxError);
  CHECK(*paren.offset() == 7);

  const Error junk = caught([] { expr::parse("x1 $ 2", 1); });
  CHECK(junk.kind() == ErrorKind::SyntaxError);
  CHECK(*junk.offset() == 3);
}

TEST_CASE("precedence and associativity") {
  const Vec x{2.0, 3.0};
  auto v = [&](const char* s) { return expr::eval(expr::parse_scalar(s, 2), x); };
  CHECK(v("1 + 2*3") == 7.0);
  CHECK(v("x1 - x2 - 1") == -2.0);
  CHECK(v("x1 / x2 / 2") == doctest::Approx(1.0 / 3.0));
  CHECK(v("-x1^2") == -4.0);
  CHECK(v("(-x1)^2") == 4.0);
  CHECK(v("x1^-1") == 0.5);
  CHECK(v("2*-x2") == -6.0);
  CHECK(v("--x1") == 2.0);
  // Exponents are integer literals, so a chained power cannot parse.
  const Error chained = caught([] { expr::parse_scalar("x1^3^1", 1); });
  CHECK(chained.kind() == ErrorKind::SyntaxError);
  CHECK(*chained.offset() == 4);
  CHECK(v("1e-3*x2") == doctest::Approx(3e-3));
  CHECK(v("sqrt(x1*8) + ln(exp(x2)) + abs(-x1) + cos(0) + sin(0)") == doctest::Approx(4.0 + 3.0 + 2.0 + 1.0));
}

TEST_CASE("eval examples") {
  CHECK(expr::eval(expr::parse_scalar("x1^2-x2^2", 2), Vec{3.0, 2.0}) == 5.0);
  const auto c = expr::parse_scalar("7", 3);
  CHECK(expr::eval(c, Vec{1.0, -9.0, 1e30}) == 7.0);
  CHECK(caught([] { expr::eval(expr::parse("1/x1", 1)[0], Vec{0.0}); }).kind() == ErrorKind::NonFinite);
  CHECK(caught([] { expr::eval(expr::parse("ln(x1)", 1)[0], Vec{0.0}); }).kind() == ErrorKind::NonFinite);
  CHECK(caught([] { expr::eval(expr::parse("ln(x1)", 1)[0], Vec{-1.0}); }).kind() == ErrorKind::NonFinite);
  CHECK(caught([] { expr::eval(expr::parse("sqrt(x1)", 1)[0], Vec{-1e-300}); }).kind() == ErrorKind::NonFinite);
  CHECK(caught([] { expr::eval(expr::parse("exp(x1)", 1)[0], Vec{1000.0}); }).kind() == ErrorKind::NonFinite);
}

TEST_CASE("ad_jacobian examples") {
  const auto id = expr::parse("x1; x2; x3", 3);
  const Matrix j = expr::ad_jacobian(id, Vec{0.1, 0.2, 0.3});
  CHECK(j == Matrix::identity(3));

  const auto sq = expr::parse("x1^2 - x2^2; 2*x1*x2", 2);
  const double a = 1.25, b = -0.5;
  const Matrix js = expr::ad_jacobian(sq, Vec{a, b});
  CHECK(js(0, 0) == 2 * a);
  CHECK(js(0, 1) == -2 * b);
  CHECK(js(1, 0) == 2 * b);
  CHECK(js(1, 1) == 2 * a);

  const auto ab = expr::parse("abs(x1)", 1);
  CHECK(caught([&] { expr::ad_jacobian(ab, Vec{0.0}); }).kind() == ErrorKind::NotDifferentiable);
  CHECK(expr::ad_jacobian(ab, Vec{-2.0})(0, 0) == -1.0);
  CHECK(expr::eval(ab[0], Vec{0.0}) == 0.0);
}

TEST_CASE("ad_jacobian agrees with central differences on every fixture") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& tf : kTextFixtures) {
    CAPTURE(tf.name);
    const MapSpec fx = fixtures::make(tf.name);
    const auto comps = expr::parse(tf.src, fx.dim());
    for (int k = 0; k < 100; ++k) {
      Vec x(fx.dim());
      for (auto& v : x) v = u(rng);
      const Matrix jad = expr::ad_jacobian(comps, x);
      // Independent oracle: central differences on the parsed evaluator.
      const double h = 1e-6 * (1.0 + norm(x));
      double scale = 1.0;
      for (std::size_t c = 0; c < fx.dim(); ++c) {
        Vec xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        for (std::size_t r = 0; r < fx.dim(); ++r) {
          const double fd = (expr::eval(comps[r], xp) - expr::eval(comps[r], xm)) / (xp[c] - xm[c]);
          scale = std::max(scale, std::abs(fd));
          REQUIRE(std::abs(jad(r, c) - fd) <= 1e-6 * (1.0 + std::abs(fd)) * 10.0);
        }
      }
      // And the parsed map reproduces the built-in fixture.
      const Vec y = fx.evaluate(x);
      for (std::size_t r = 0; r < fx.dim(); ++r) {
        REQUIRE(expr::eval(comps[r], x) == doctest::Approx(y[r]).epsilon(1e-14));
      }
      const Matrix jfx = fx.jacobian(x);
      for (std::size_t r = 0; r < fx.dim(); ++r)
        for (std::size_t c = 0; c < fx.dim(); ++c)
          REQUIRE(std::abs(jad(r, c) - jfx(r, c)) <= 1e-5 * scale);
    }
  }
}

TEST_CASE("print and reparse gives an equal tree") {
  const char* sources[] = {
      "x1^2 - x2^2; 2*x1*x2",
      "-x1^2 + sin(cos(x2))/3.25e-7; ((x1))",
      "x1^-3 - -x2; exp(ln(sqrt(abs(x1 - 0.1))))",
      "1 - 2 - 3 + x1*x2/x1*2; (x2^2)^3",
      "0.1 + 1e300 * x1; -(-(x2))",
  };
  for (const char* src : sources) {
    CAPTURE(src);
    const auto a = expr::parse(src, 2);
    const std::string printed = expr::to_string(a);
    const auto b = expr::parse(printed, 2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(expr::structurally_equal(a[i], b[i]));
    // Printing is a fixed point after one round.
    CHECK(expr::to_string(b) == printed);
  }
  CHECK_FALSE(expr::structurally_equal(expr::parse_scalar("x1 + 1", 1), expr::parse_scalar("1 + x1", 1)));
  CHECK(caught([] { expr::parse_scalar("x1; x1", 1); }).kind() == ErrorKind::ArityError);
}

TEST_CASE("identical text gives identical trees and values") {
  const char* src = "exp(x1)*cos(x2) + 0.3; x1*x2 - sin(x1)";
  const auto a = expr::parse(src, 2);
  const auto b = expr::parse(src, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(expr::structurally_equal(a[i], b[i]));
    CHECK(expr::eval(a[i], Vec{0.37, -1.1}) == expr::eval(b[i], Vec{0.37, -1.1}));
  }
}

TEST_CASE("dual numbers follow the product and chain rules") {
  const Dual x = Dual::variable(0.7, 0, 2);
  const Dual y = Dual::variable(-1.2, 1, 2);
  CHECK(x.partial(0) == 1.0);
  CHECK(x.partial(1) == 0.0);
  const Dual p = x * y;
  CHECK(p.partial(0) == -1.2);
  CHECK(p.partial(1) == 0.7);
  const Dual s = sin(x * x);
  CHECK(s.partial(0) == doctest::Approx(std::cos(0.49) * 1.4));
  const Dual q = x / y;
  CHECK(q.partial(1) == doctest::Approx(-0.7 / (1.44)));
}

TEST_CASE("make_map builds a usable MapSpec") {
  const MapSpec m = expr::make_map("x1^2 - x2^2; 2*x1*x2", 2, Vec{1.0, 0.0});
  CHECK(m.base_image() == Vec{1.0, 0.0});
  const Matrix j = m.jacobian(Vec{0.5, 2.0});
  CHECK(j(0, 1) == -4.0);
  CHECK(m.with_jacobian(FiniteDifference{}).jacobian(Vec{0.5, 2.0})(0, 1) == doctest::Approx(-4.0).epsilon(1e-7));
}
