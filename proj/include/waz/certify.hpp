#pragma once

// Sampling-based evidence for the injectivity / surjectivity conditions and a
// planar basin estimator. Every verdict here is a certificate (sampled): it can
// refute a condition with a witness, but never proves one.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "waz/flow.hpp"
#include "waz/map.hpp"

namespace waz {

// ---------------------------------------------------------------------------
// Star-shape criterion  (x - x0) . Jf(x)^{-1} (f(x) - f(x0)) >= 0 on a ball.

struct Violation {
  Vec point;
  double value;
};

struct StarCriterionResult {
  Vec center;
  double radius = 0.0;
  std::size_t requested = 0;
  std::size_t evaluated = 0;
  std::size_t singular_skipped = 0;
  std::size_t outside_skipped = 0;
  /// Strictly negative values below -1e-12 * magnitude, in sample order.
  std::vector<Violation> violations;
  double min_value = 0.0;
  Vec argmin;
};

/// Left-hand side of the criterion at x. Throws SingularJacobian.
double star_criterion_value(const MapSpec& m, std::span<const double> x);

StarCriterionResult check_star_criterion(const MapSpec& m, double radius, std::size_t samples,
                                         std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Lyapunov monotonicity along tracked trajectories.

using ScalarFn = std::function<double(std::span<const double>)>;

/// k(x) = 1/2 ||x - x0||^2; its flow derivative at t = 0 is minus the
/// star-criterion value.
ScalarFn half_squared_distance(Vec x0);

struct LyapunovCheck {
  bool monotone = true;
  std::optional<std::size_t> first_violation;  // sample index
  double violation_param = 0.0;
  double max_increase = 0.0;
  std::size_t samples = 0;
};

/// Checks k(x_k) is nonincreasing within slack 1e-8 * (1 + |k|).
std::vector<LyapunovCheck> check_lyapunov(const ScalarFn& k, std::span<const Trajectory> trajectories);

// ---------------------------------------------------------------------------
// Coercivity: min ||f|| over spheres ||x|| = R.

enum class CoercivityVerdict { Coercive, NotCoercive, Inconclusive };
std::string_view to_string(CoercivityVerdict v);

struct CoercivityTrend {
  Vec radii;
  Vec minima;
  std::vector<Vec> argmins;
  std::size_t skipped = 0;
  CoercivityVerdict verdict = CoercivityVerdict::Inconclusive;
};

CoercivityTrend coercivity_probe(const MapSpec& m, std::span<const double> radii, std::size_t samples,
                                 std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Growth of ||Jf(x)^{-1}|| against the affine model a + b ||x||.

enum class GrowthVerdict { AffineBoundHolds, SuperlinearGrowth, Inconclusive };
std::string_view to_string(GrowthVerdict v);

struct GrowthModel {
  Vec radii;
  Vec g;  // sampled max of ||Jf^{-1}|| per sphere
  double a = 0.0;
  double b = 0.0;
  /// max_i (g_i - (a + b s_i)) / (a + b s_i), clipped at 0.
  double fit_quality = 0.0;
  /// log-log slope of g over the upper half of the radii.
  double exponent = 0.0;
  std::size_t singular_skipped = 0;
  GrowthVerdict verdict = GrowthVerdict::Inconclusive;
};

struct SupportLine {
  double a, b;
};
/// Least bound a + b s (a, b >= 0, minimal mean over [s_min, s_max]) lying on
/// or above every (s_i, g_i).
SupportLine fit_support_line(std::span<const double> s, std::span<const double> g);

GrowthModel growth_probe(const MapSpec& m, std::span<const double> radii, std::size_t samples,
                         std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Sampled supremum of ||Jf^{-1}|| on a box bounded in D.

struct BoxSupResult {
  double sup = 0.0;
  Vec argmax;
  std::size_t evaluated = 0;
  /// Points where Jf is singular; any entry refutes boundedness on the box.
  std::vector<Vec> singular_points;
};

/// Samples the box vertices, its centre and `samples` quasi-uniform points.
/// Throws InvalidArgument if the box is not bounded in the domain.
BoxSupResult bounded_growth_on_box(const MapSpec& m, std::span<const double> lo, std::span<const double> hi,
                                   std::size_t samples, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Basin raster for planar maps.

enum class CellCode : std::uint8_t { InBasin = 255, Out = 0, Undetermined = 128, OutsideDomain = 64 };
std::string_view to_string(CellCode c);

struct BasinCell {
  CellCode code = CellCode::Undetermined;
  std::optional<OutcomeKind> outcome;
  double param = 0.0;
  std::string note;
};

struct BasinSpec {
  std::array<double, 2> lo{-1.0, -1.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::size_t resolution = 21;
  TrackOptions track;
  /// Re-run every cell with dt_min / 10 and mark class flips Undetermined.
  bool flip_check = true;
  std::size_t threads = 1;
};

struct BasinCounts {
  std::size_t in_basin = 0, out = 0, undetermined = 0, outside_domain = 0;
};

struct BasinGrid {
  std::array<double, 2> lo{}, hi{};
  std::size_t resolution = 0;
  Vec x0;
  /// Row-major by cell index j * resolution + i, with i along x1, j along x2.
  std::vector<BasinCell> cells;

  Vec center(std::size_t i, std::size_t j) const;
  const BasinCell& at(std::size_t i, std::size_t j) const { return cells[j * resolution + i]; }
  BasinCounts counts() const;
};

/// Maps a tracked outcome to its raster class.
CellCode classify_outcome(OutcomeKind kind);

/// Requires a 2-D map; throws InvalidArgument otherwise.
BasinGrid estimate_basin(const MapSpec& m, const BasinSpec& spec);

/// Binary P5 PGM, top row = largest x2.
std::string to_pgm(const BasinGrid& grid);
/// "x,y,code" rows in cell-index order.
std::string to_csv(const BasinGrid& grid);

}  // namespace waz
