#include "waz/fixtures.hpp"

#include <cmath>

#include "waz/error.hpp"

namespace waz::fixtures {

namespace {

constexpr double kSquareExclusionRadius = 1e-6;
constexpr double kShear = 10.0;

Matrix linear_matrix(const FixtureOptions& opts) {
  if (opts.matrix) return *opts.matrix;
  const double d[] = {2.0, 4.0};
  return Matrix::diagonal(d);
}

template <class T>
std::vector<T> square2d(std::span<const T> x) {
  return {x[0] * x[0] - x[1] * x[1], T(2.0) * x[0] * x[1]};
}

template <class T>
std::vector<T> exp1d(std::span<const T> x) {
  using std::exp;
  return {exp(x[0])};
}

template <class T>
std::vector<T> exp2d(std::span<const T> x) {
  using std::cos;
  using std::exp;
  using std::sin;
  const T e = exp(x[0]);
  return {e * cos(x[1]), e * sin(x[1])};
}

template <class T>
std::vector<T> shear(std::span<const T> x) {
  return {x[0], x[1] + T(kShear) * x[0] * x[0]};
}

template <class T>
std::vector<T> sinperturb(std::span<const T> x) {
  using std::sin;
  std::vector<T> y;
  y.reserve(x.size());
  for (const T& xi : x) y.push_back(xi + T(0.5) * sin(xi));
  return y;
}

template <class T>
std::vector<T> cubic1d(std::span<const T> x) {
  return {x[0] * x[0] * x[0] + x[0]};
}

MapSpec build(std::string_view name, const FixtureOptions& opts) {
  const auto whole = [](std::size_t n) { return DomainSpec(DomainSpec::whole_space(n)); };
  const auto x0_or = [&](Vec fallback) { return opts.base_point.value_or(std::move(fallback)); };
  const std::string label(name);

  if (name == "identity1d" || name == "identity2d") {
    const std::size_t n = name == "identity1d" ? 1 : 2;
    auto id = [](auto x) { return std::vector<typename decltype(x)::value_type>(x.begin(), x.end()); };
    return MapSpec::from_generic(label, n, id, whole(n), x0_or(Vec(n, 0.0)));
  }
  if (name == "linear") {
    const Matrix a = linear_matrix(opts);
    if (!a.square() || a.rows() == 0) throw Error(ErrorKind::InvalidArgument, "linear fixture needs a square matrix");
    const std::size_t n = a.rows();
    auto fn = [a](auto x) {
      using T = typename decltype(x)::value_type;
      std::vector<T> y(a.rows(), T(0.0));
      for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) y[r] += T(a(r, c)) * x[c];
      return y;
    };
    return MapSpec::from_generic(label, n, fn, whole(n), x0_or(Vec(n, 0.0)));
  }
  if (name == "square2d") {
    const Vec x0 = x0_or({1.0, 0.0});
    DomainSpec d(DomainSpec::punctured_plane({Vec{0.0, 0.0}}, kSquareExclusionRadius), -1.0,
                 1.0 + norm(x0));
    return MapSpec::from_generic(label, 2, [](auto x) { return square2d(x); }, d, x0);
  }
  if (name == "exp1d") {
    return MapSpec::from_generic(label, 1, [](auto x) { return exp1d(x); }, whole(1), x0_or({0.0}));
  }
  if (name == "exp2d") {
    return MapSpec::from_generic(label, 2, [](auto x) { return exp2d(x); }, whole(2), x0_or({0.0, 0.0}));
  }
  if (name == "shear10") {
    return MapSpec::from_generic(label, 2, [](auto x) { return shear(x); }, whole(2), x0_or({0.0, 0.0}));
  }
  if (name == "sinperturb") {
    return MapSpec::from_generic(label, 2, [](auto x) { return sinperturb(x); }, whole(2), x0_or({0.0, 0.0}));
  }
  if (name == "cubic1d") {
    return MapSpec::from_generic(label, 1, [](auto x) { return cubic1d(x); }, whole(1), x0_or({0.0}));
  }
  throw Error(ErrorKind::InvalidArgument, "unknown fixture '" + label + "'");
}

}  // namespace

const std::vector<FixtureInfo>& list() {
  static const std::vector<FixtureInfo> kFixtures = {
      {"identity1d", 1, "f(x) = x on R"},
      {"identity2d", 2, "f(x) = x on R^2"},
      {"linear", 2, "f(x) = A x, A configurable (default diag(2,4))"},
      {"square2d", 2, "complex square z^2 on the punctured plane, x0 = (1,0)"},
      {"exp1d", 1, "f(x) = e^x on R"},
      {"exp2d", 2, "complex exponential e^z as a map of R^2"},
      {"shear10", 2, "f(x,y) = (x, y + 10 x^2)"},
      {"sinperturb", 2, "f(x) = x + 0.5 sin(x) componentwise"},
      {"cubic1d", 1, "f(x) = x^3 + x on R"},
  };
  return kFixtures;
}

bool exists(std::string_view name) {
  for (const auto& f : list())
    if (f.name == name) return true;
  return false;
}

MapSpec make(std::string_view name, const FixtureOptions& opts) {
  MapSpec m = build(name, opts);
  if (opts.jacobian) {
    if (std::holds_alternative<Analytic>(*opts.jacobian) && !std::get<Analytic>(*opts.jacobian).jacobian) {
      return m.with_jacobian(Analytic{analytic_jacobian(name, opts)});
    }
    return m.with_jacobian(*opts.jacobian);
  }
  return m;
}

MatFn analytic_jacobian(std::string_view name, const FixtureOptions& opts) {
  if (name == "identity1d") return [](std::span<const double>) { return Matrix::identity(1); };
  if (name == "identity2d") return [](std::span<const double>) { return Matrix::identity(2); };
  if (name == "linear") {
    const Matrix a = linear_matrix(opts);
    return [a](std::span<const double>) { return a; };
  }
  if (name == "square2d") {
    return [](std::span<const double> x) {
      return Matrix{{2 * x[0], -2 * x[1]}, {2 * x[1], 2 * x[0]}};
    };
  }
  if (name == "exp1d") return [](std::span<const double> x) { return Matrix{{std::exp(x[0])}}; };
  if (name == "exp2d") {
    return [](std::span<const double> x) {
      const double e = std::exp(x[0]), c = std::cos(x[1]), s = std::sin(x[1]);
      return Matrix{{e * c, -e * s}, {e * s, e * c}};
    };
  }
  if (name == "shear10") {
    return [](std::span<const double> x) { return Matrix{{1.0, 0.0}, {2 * kShear * x[0], 1.0}}; };
  }
  if (name == "sinperturb") {
    return [](std::span<const double> x) {
      Matrix j(x.size(), x.size());
      for (std::size_t i = 0; i < x.size(); ++i) j(i, i) = 1.0 + 0.5 * std::cos(x[i]);
      return j;
    };
  }
  if (name == "cubic1d") return [](std::span<const double> x) { return Matrix{{3 * x[0] * x[0] + 1.0}}; };
  throw Error(ErrorKind::InvalidArgument, "unknown fixture '" + std::string(name) + "'");
}

}  // namespace waz::fixtures
