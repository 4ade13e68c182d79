#pragma once

// Tracking of the auxiliary flow  x' = -Jf(x)^{-1} (f(x) - y0)  and of
// maximal liftings of codomain segments. Both are realised as
// predictor-corrector continuation on an exact algebraic target:
//   flow:  f(x(t)) = y0 + e^{-t} (f(x_start) - y0)
//   lift:  f(x(s)) = f(x_a) + s (y_b - f(x_a)),  s in [0, 1]
// so the corrector removes all integration error.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "waz/map.hpp"

namespace waz {

struct TrackOptions {
  // Time stepping of the flow.
  double dt_initial = 0.1;
  double dt_min = 1e-12;
  double dt_max = 1.0;
  // Segment lifting: arclength step in units of map scale, and the floor on
  // the parameter increment.
  double h_initial = 0.1;
  double h_max = 1.0;
  double ds_min = 1e-12;

  int max_newton = 8;
  /// Step attempts (accepted + rejected) before BudgetExhausted.
  std::size_t max_steps = 100000;
  /// t_end = +inf runs until convergence or t > horizon.
  double horizon = 50.0;
  /// Invariant residual bound eta_inv = eta_rel * (1 + ||image span||).
  double eta_rel = 1e-9;
  /// tol_conv = tol_rel * (1 + ||x0||).
  double tol_rel = 1e-8;
  /// ||F|| > blowup * scale at step collapse counts as finite life.
  double blowup = 1e6;
  /// Corrector displacement must stay below contraction * predictor length.
  double contraction = 0.5;
  /// Consecutive first-try successes before the step doubles.
  int growth_streak = 3;
};

inline constexpr double kForever = std::numeric_limits<double>::infinity();

enum class OutcomeKind {
  ConvergedToBase,
  ConvergedElsewhere,
  ReachedEnd,
  FiniteLife,
  LeftDomain,
  StepCollapse,
  BudgetExhausted,
};

std::string_view to_string(OutcomeKind kind);

struct Outcome {
  OutcomeKind kind;
  /// t (flow) or s (lift) at which the outcome was decided.
  double param = 0.0;
  /// Last point; for ConvergedElsewhere the limit point.
  Vec point;
  std::string note;
};

struct PathSample {
  double param;
  Vec x;
  double residual;
};

struct Trajectory {
  Vec x_start;
  std::vector<PathSample> samples;
  Outcome outcome;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double eta_inv = 0.0;
};

struct LiftOutcome {
  Vec x_a;
  Vec y_b;
  std::vector<PathSample> samples;
  bool complete = false;
  double s_max = 0.0;
  std::optional<Outcome> failure;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double eta_inv = 0.0;
};

/// y0 + e^{-t} (y - y0).
Vec psi(std::span<const double> y, double t, std::span<const double> y0);

/// F(x) = -Jf(x)^{-1} (f(x) - y0). Throws SingularJacobian, DomainViolation.
Vec flow_field(const MapSpec& m, std::span<const double> x);

/// Follows the flow from x_start up to t_end (kForever: until convergence,
/// failure, t > horizon or budget). Throws SingularJacobian (with the
/// location in the message) if Jf is singular at an accepted point, and
/// DomainViolation if x_start is outside the domain.
Trajectory integrate_flow(const MapSpec& m, std::span<const double> x_start, double t_end,
                          const TrackOptions& opts = {});

/// Maximal lifting through x_a of the segment from f(x_a) to y_b.
LiftOutcome lift_segment(const MapSpec& m, std::span<const double> x_a, std::span<const double> y_b,
                         const TrackOptions& opts = {});

struct InvertResult {
  bool ok = false;
  Vec x;
  double residual = 0.0;
  LiftOutcome lift;
};

/// Solves f(x) = y by lifting the segment [y0, y] from x0, then polishing
/// with Newton. A failed lift means y is outside f(basin of x0).
InvertResult invert_at(const MapSpec& m, std::span<const double> y, const TrackOptions& opts = {});

enum class OmegaKind { ClusterPoint, EmptyDivergent, BoundaryCluster, Inconclusive };
std::string_view to_string(OmegaKind kind);

struct OmegaOptions {
  /// Tail diameter (relative to map scale) accepted as a cluster point.
  double cluster_tol = 1e-5;
  /// Tail must end within this many exclusion radii of an excluded point.
  double boundary_factor = 10.0;
  /// ||x|| must exceed this multiple of map scale for divergence.
  double divergence_factor = 10.0;
};

struct OmegaProbeResult {
  OmegaKind kind = OmegaKind::Inconclusive;
  Vec point;  // cluster / excluded point when applicable
  std::size_t examined = 0;
  double tail_diameter = 0.0;
  double final_norm = 0.0;
};

/// Classifies the tail (last `window` samples) of a tracked path.
OmegaProbeResult omega_probe(const MapSpec& m, std::span<const PathSample> samples, std::size_t window,
                             const OmegaOptions& opts = {});

}  // namespace waz
