#include "waz/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "waz/error.hpp"

namespace waz {

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::ConvergedToBase: return "ConvergedToBase";
    case OutcomeKind::ConvergedElsewhere: return "ConvergedElsewhere";
    case OutcomeKind::ReachedEnd: return "ReachedEnd";
    case OutcomeKind::FiniteLife: return "FiniteLife";
    case OutcomeKind::LeftDomain: return "LeftDomain";
    case OutcomeKind::StepCollapse: return "StepCollapse";
    case OutcomeKind::BudgetExhausted: return "BudgetExhausted";
  }
  return "Unknown";
}

std::string_view to_string(OmegaKind kind) {
  switch (kind) {
    case OmegaKind::ClusterPoint: return "ClusterPoint";
    case OmegaKind::EmptyDivergent: return "EmptyDivergent";
    case OmegaKind::BoundaryCluster: return "BoundaryCluster";
    case OmegaKind::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

namespace {

std::string describe(std::span<const double> x, double param) {
  std::string s = "param=";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", param);
  s += buf;
  s += " x=(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.17g", i ? ", " : "", x[i]);
    s += buf;
  }
  return s + ")";
}

struct Correction {
  bool ok = false;
  Vec x;
  double residual = std::numeric_limits<double>::infinity();
  BoundaryPiece exit = BoundaryPiece::None;
};

bool is_soft_failure(const Error& e) {
  return e.kind() == ErrorKind::NonFinite || e.kind() == ErrorKind::DomainViolation ||
         e.kind() == ErrorKind::NotDifferentiable || e.kind() == ErrorKind::SingularJacobian;
}

// Damped Newton on f(x) = target from a predictor inside the domain. Iterates
// past the residual bound until the Newton step itself is negligible, so the
// accepted points are accurate in x and not just in the image.
Correction correct(const MapSpec& m, Vec x, std::span<const double> target, double eta, int max_newton) {
  Correction c;
  const DomainSpec& dom = m.domain();
  Vec fx;
  try {
    fx = m.evaluate(x);
  } catch (const Error& e) {
    if (!is_soft_failure(e)) throw;
    return c;
  }
  double res = distance(fx, target);
  for (int it = 0; it < max_newton; ++it) {
    Vec d;
    try {
      const LuFactors lu(m.jacobian(x));
      if (lu.singular()) break;
      d = lu.solve(sub(target, fx));
    } catch (const Error& e) {
      if (!is_soft_failure(e)) throw;
      break;
    }
    bool moved = false;
    double step = 0.0;
    double lambda = 1.0;
    for (int k = 0; k < 6; ++k, lambda *= 0.5) {
      Vec xt = axpy(x, lambda, d);
      if (!dom.contains(xt)) {
        c.exit = dom.nearest_piece(xt);
        continue;
      }
      Vec ft;
      try {
        ft = m.evaluate(xt);
      } catch (const Error& e) {
        if (!is_soft_failure(e)) throw;
        continue;
      }
      const double rt = distance(ft, target);
      if (rt < res || rt == 0.0) {
        step = lambda * norm(d);
        x = std::move(xt);
        fx = std::move(ft);
        res = rt;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    if (res <= eta && step <= 1e-12 * (1.0 + norm(x))) break;
  }
  c.ok = res <= eta;
  c.x = std::move(x);
  c.residual = res;
  return c;
}

// Decides what a collapsed step means (finite life, domain exit or a
// numerical stall). `speed` is the tangent length at the last point.
Outcome classify_collapse(const MapSpec& m, const Vec& x, double param, double speed,
                          BoundaryPiece exit, const TrackOptions& opts) {
  const DomainSpec& dom = m.domain();
  if (speed > opts.blowup * m.scale()) {
    return {OutcomeKind::FiniteLife, param, x, "vector field blow-up"};
  }
  BoundaryPiece piece = exit;
  if (piece == BoundaryPiece::None && dom.boundary_distance(x) < 2.0 * dom.margin()) {
    piece = dom.nearest_piece(x);
  }
  if (piece == BoundaryPiece::Natural) {
    return {OutcomeKind::FiniteLife, param, x, "domain boundary reached in finite time"};
  }
  if (piece == BoundaryPiece::OuterBox) {
    return {OutcomeKind::LeftDomain, param, x, "left the computational box"};
  }
  return {OutcomeKind::StepCollapse, param, x, "step size collapsed"};
}

// Tangent solve at an accepted point; a singular Jacobian here is a hard error.
Vec tangent(const MapSpec& m, std::span<const double> x, std::span<const double> rhs, double param) {
  const LuFactors lu(m.jacobian(x));
  if (lu.singular()) {
    throw Error(ErrorKind::SingularJacobian, "singular Jacobian while tracking at " + describe(x, param));
  }
  return lu.solve(rhs);
}

// Newton refinement of an already accurate point; never makes it worse.
std::pair<Vec, double> polish(const MapSpec& m, Vec x, std::span<const double> y) {
  Vec fx = m.evaluate(x);
  double res = distance(fx, y);
  for (int it = 0; it < 6 && res > 0.0; ++it) {
    Vec xt;
    try {
      const LuFactors lu(m.jacobian(x));
      if (lu.singular()) break;
      xt = add(x, lu.solve(sub(y, fx)));
      if (!m.domain().contains(xt)) break;
      Vec ft = m.evaluate(xt);
      const double rt = distance(ft, y);
      if (!(rt < res)) break;
      x = std::move(xt);
      fx = std::move(ft);
      res = rt;
    } catch (const Error& e) {
      if (!is_soft_failure(e)) throw;
      break;
    }
  }
  return {std::move(x), res};
}

}  // namespace

Vec psi(std::span<const double> y, double t, std::span<const double> y0) {
  return axpy(y0, std::exp(-t), sub(y, y0));
}

Vec flow_field(const MapSpec& m, std::span<const double> x) {
  const Vec fx = m.evaluate(x);
  return scaled(-1.0, tangent(m, x, sub(fx, m.base_image()), 0.0));
}

Trajectory integrate_flow(const MapSpec& m, std::span<const double> x_start, double t_end,
                          const TrackOptions& opts) {
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_end must be positive");
  const DomainSpec& dom = m.domain();
  Trajectory traj;
  traj.x_start.assign(x_start.begin(), x_start.end());
  if (!dom.contains(traj.x_start)) {
    throw Error(ErrorKind::DomainViolation, "start point outside the domain: " + describe(x_start, 0.0));
  }
  const Vec& x0 = m.base_point();
  const Vec& y0 = m.base_image();
  const Vec ys = m.evaluate(traj.x_start);
  const Vec image_span = sub(ys, y0);
  const double scale = m.scale();
  const double eta = opts.eta_rel * (1.0 + norm(image_span));
  const double tol = opts.tol_rel * scale;
  const bool forever = std::isinf(t_end);
  traj.eta_inv = eta;

  const auto finish = [&](OutcomeKind kind, double t, const Vec& x, std::string note) {
    traj.outcome = Outcome{kind, t, x, std::move(note)};
    return traj;
  };

  traj.samples.push_back({0.0, traj.x_start, 0.0});
  if (distance(traj.x_start, x0) <= tol && distance(ys, y0) <= tol) {
    return finish(OutcomeKind::ConvergedToBase, 0.0, traj.x_start, "");
  }

  Vec x = traj.x_start;
  Vec fx = ys;
  double t = 0.0;
  double dt = opts.dt_initial;
  int streak = 0;
  std::size_t attempts = 0;
  // Cause of the most recent rejection, kept across accepted steps.
  BoundaryPiece exit = BoundaryPiece::None;

  while (true) {
    if (forever && t > opts.horizon) {
      return finish(OutcomeKind::BudgetExhausted, t, x, "time horizon passed without convergence");
    }
    const Vec field = scaled(-1.0, tangent(m, x, sub(fx, y0), t));
    const double speed = norm(field);

    bool first_try = true;
    while (true) {
      if (attempts >= opts.max_steps) {
        return finish(OutcomeKind::BudgetExhausted, t, x, "step budget exhausted");
      }
      ++attempts;
      const bool last = !forever && dt >= t_end - t;
      const double t_new = last ? t_end : t + dt;
      const double step = t_new - t;
      const Vec x_pred = axpy(x, step, field);

      bool ok = false;
      if (!dom.segment_inside(x, x_pred)) {
        exit = dom.nearest_piece(x_pred);
      } else {
        const Vec target = axpy(y0, std::exp(-t_new), image_span);
        Correction c = correct(m, x_pred, target, eta, opts.max_newton);
        if (c.ok && distance(c.x, x_pred) <= opts.contraction * step * speed + 1e-10 * scale &&
            dom.segment_inside(x, c.x)) {
          x = std::move(c.x);
          fx = m.evaluate(x);
          t = t_new;
          traj.samples.push_back({t, x, c.residual});
          ++traj.accepted;
          ok = true;
        } else {
          exit = c.exit;
        }
      }
      if (ok) break;
      ++traj.rejected;
      first_try = false;
      streak = 0;
      dt *= 0.5;
      if (dt < opts.dt_min) {
        traj.outcome = classify_collapse(m, x, t, speed, exit, opts);
        return traj;
      }
    }
    if (first_try && ++streak >= opts.growth_streak) {
      dt = std::min(2.0 * dt, opts.dt_max);
      streak = 0;
    }

    if (!forever && t >= t_end) return finish(OutcomeKind::ReachedEnd, t, x, "");
    if (forever) {
      const double image_gap = distance(fx, y0);
      if (image_gap <= tol && distance(x, x0) <= tol) {
        return finish(OutcomeKind::ConvergedToBase, t, x, "");
      }
      const Vec& prev = traj.samples[traj.samples.size() - 2].x;
      if (image_gap <= tol && distance(x, prev) <= tol && distance(x, x0) > 1e-4 * scale) {
        return finish(OutcomeKind::ConvergedElsewhere, t, x, "converged to another preimage of y0");
      }
    }
  }
}

LiftOutcome lift_segment(const MapSpec& m, std::span<const double> x_a, std::span<const double> y_b,
                         const TrackOptions& opts) {
  const DomainSpec& dom = m.domain();
  LiftOutcome lift;
  lift.x_a.assign(x_a.begin(), x_a.end());
  lift.y_b.assign(y_b.begin(), y_b.end());
  if (y_b.size() != m.dim()) throw Error(ErrorKind::InvalidArgument, "target has wrong dimension");
  if (!dom.contains(lift.x_a)) {
    throw Error(ErrorKind::DomainViolation, "lift start outside the domain: " + describe(x_a, 0.0));
  }
  const Vec ya = m.evaluate(lift.x_a);
  const Vec v = sub(y_b, ya);
  const double scale = m.scale();
  const double eta = opts.eta_rel * (1.0 + norm(v));
  const double tol = opts.tol_rel * scale;
  lift.eta_inv = eta;

  lift.samples.push_back({0.0, lift.x_a, 0.0});
  if (norm(v) == 0.0) {
    lift.samples.push_back({1.0, lift.x_a, 0.0});
    lift.complete = true;
    lift.s_max = 1.0;
    return lift;
  }

  const auto fail = [&](Outcome o) {
    lift.failure = std::move(o);
    return lift;
  };

  Vec x = lift.x_a;
  double s = 0.0;
  double h = opts.h_initial * scale;
  int streak = 0;
  std::size_t attempts = 0;
  BoundaryPiece exit = BoundaryPiece::None;

  while (s < 1.0) {
    const Vec dir = tangent(m, x, v, s);
    const double speed = norm(dir);

    bool first_try = true;
    while (true) {
      if (attempts >= opts.max_steps) {
        return fail({OutcomeKind::BudgetExhausted, s, x, "step budget exhausted"});
      }
      const double ds = h / speed;
      const bool last = ds >= 1.0 - s;
      if (!last && ds < opts.ds_min) {
        return fail(classify_collapse(m, x, s, speed, exit, opts));
      }
      ++attempts;
      const double s_new = last ? 1.0 : s + ds;
      const double step = s_new - s;
      const Vec x_pred = axpy(x, step, dir);

      bool ok = false;
      if (!dom.segment_inside(x, x_pred)) {
        exit = dom.nearest_piece(x_pred);
      } else {
        const Vec target = axpy(ya, s_new, v);
        Correction c = correct(m, x_pred, target, eta, opts.max_newton);
        if (c.ok && distance(c.x, x_pred) <= opts.contraction * step * speed + 1e-10 * scale &&
            dom.segment_inside(x, c.x)) {
          x = std::move(c.x);
          s = s_new;
          lift.s_max = s;
          lift.samples.push_back({s, x, c.residual});
          ++lift.accepted;
          ok = true;
        } else {
          exit = c.exit;
        }
      }
      if (ok) break;
      ++lift.rejected;
      first_try = false;
      streak = 0;
      h *= 0.5;
    }
    if (first_try && ++streak >= opts.growth_streak) {
      h = std::min(2.0 * h, opts.h_max * scale);
      streak = 0;
    }
  }

  auto [xp, res] = polish(m, x, y_b);
  if (res > tol) {
    return fail({OutcomeKind::StepCollapse, 1.0, x, "endpoint residual above tolerance"});
  }
  lift.samples.back() = {1.0, std::move(xp), res};
  lift.complete = true;
  return lift;
}

InvertResult invert_at(const MapSpec& m, std::span<const double> y, const TrackOptions& opts) {
  InvertResult r;
  r.lift = lift_segment(m, m.base_point(), y, opts);
  if (!r.lift.complete) return r;
  auto [x, res] = polish(m, r.lift.samples.back().x, y);
  r.ok = true;
  r.x = std::move(x);
  r.residual = res;
  return r;
}

OmegaProbeResult omega_probe(const MapSpec& m, std::span<const PathSample> samples, std::size_t window,
                             const OmegaOptions& opts) {
  OmegaProbeResult r;
  if (window == 0 || samples.size() < window) {
    r.examined = samples.size();
    return r;
  }
  const auto tail = samples.subspan(samples.size() - window);
  r.examined = window;
  for (std::size_t i = 0; i < tail.size(); ++i)
    for (std::size_t j = i + 1; j < tail.size(); ++j)
      r.tail_diameter = std::max(r.tail_diameter, distance(tail[i].x, tail[j].x));
  r.final_norm = norm(tail.back().x);
  const double scale = m.scale();

  const double excl = m.domain().exclusion_radius();
  for (const Vec& p : m.domain().excluded_points()) {
    bool approaching = true;
    for (std::size_t i = 1; i < tail.size(); ++i)
      if (distance(tail[i].x, p) > distance(tail[i - 1].x, p)) approaching = false;
    if (approaching && distance(tail.back().x, p) <= opts.boundary_factor * excl) {
      r.kind = OmegaKind::BoundaryCluster;
      r.point = p;
      return r;
    }
  }
  if (r.tail_diameter <= opts.cluster_tol * scale) {
    r.kind = OmegaKind::ClusterPoint;
    r.point = tail.back().x;
    return r;
  }
  bool increasing = true;
  for (std::size_t i = 1; i < tail.size(); ++i)
    if (!(norm(tail[i].x) > norm(tail[i - 1].x))) increasing = false;
  if (increasing && r.final_norm > opts.divergence_factor * scale) {
    r.kind = OmegaKind::EmptyDivergent;
    return r;
  }
  return r;
}

}  // namespace waz
