#include "waz/certify.hpp"

#include <algorithm>
#include <cmath>

#include "waz/error.hpp"
#include "waz/io.hpp"
#include "waz/parallel.hpp"
#include "waz/sampling.hpp"

namespace waz {

std::string_view to_string(CoercivityVerdict v) {
  switch (v) {
    case CoercivityVerdict::Coercive: return "Coercive";
    case CoercivityVerdict::NotCoercive: return "NotCoercive";
    case CoercivityVerdict::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

std::string_view to_string(GrowthVerdict v) {
  switch (v) {
    case GrowthVerdict::AffineBoundHolds: return "AffineBoundHolds";
    case GrowthVerdict::SuperlinearGrowth: return "SuperlinearGrowth";
    case GrowthVerdict::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

std::string_view to_string(CellCode c) {
  switch (c) {
    case CellCode::InBasin: return "InBasin";
    case CellCode::Out: return "Out";
    case CellCode::Undetermined: return "Undetermined";
    case CellCode::OutsideDomain: return "OutsideDomain";
  }
  return "Unknown";
}

double star_criterion_value(const MapSpec& m, std::span<const double> x) {
  const Vec w = solve_linear(m.jacobian(x), sub(m.evaluate(x), m.base_image()));
  return dot(sub(x, m.base_point()), w);
}

StarCriterionResult check_star_criterion(const MapSpec& m, double radius, std::size_t samples,
                                         std::uint64_t seed) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be positive");
  StarCriterionResult r;
  r.center = m.base_point();
  r.radius = radius;
  r.requested = samples;
  bool first = true;
  for (const Vec& x : sample_ball(r.center, radius, samples, seed)) {
    if (!m.domain().contains(x)) {
      ++r.outside_skipped;
      continue;
    }
    Vec w;
    try {
      w = solve_linear(m.jacobian(x), sub(m.evaluate(x), m.base_image()));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularJacobian) throw;
      ++r.singular_skipped;
      continue;
    }
    const Vec dx = sub(x, r.center);
    const double value = dot(dx, w);
    ++r.evaluated;
    if (first || value < r.min_value) {
      r.min_value = value;
      r.argmin = x;
      first = false;
    }
    if (value < -1e-12 * (1.0 + norm(dx) * norm(w))) r.violations.push_back({x, value});
  }
  return r;
}

ScalarFn half_squared_distance(Vec x0) {
  return [x0 = std::move(x0)](std::span<const double> x) {
    const double d = distance(x, x0);
    return 0.5 * d * d;
  };
}

std::vector<LyapunovCheck> check_lyapunov(const ScalarFn& k, std::span<const Trajectory> trajectories) {
  std::vector<LyapunovCheck> out;
  out.reserve(trajectories.size());
  for (const Trajectory& tr : trajectories) {
    LyapunovCheck c;
    c.samples = tr.samples.size();
    double prev = 0.0;
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
      const double v = k(tr.samples[i].x);
      if (i > 0) {
        const double increase = v - prev;
        c.max_increase = std::max(c.max_increase, increase);
        if (increase > 1e-8 * (1.0 + std::abs(prev)) && c.monotone) {
          c.monotone = false;
          c.first_violation = i;
          c.violation_param = tr.samples[i].param;
        }
      }
      prev = v;
    }
    out.push_back(c);
  }
  return out;
}

CoercivityTrend coercivity_probe(const MapSpec& m, std::span<const double> radii, std::size_t samples,
                                 std::uint64_t seed) {
  CoercivityTrend t;
  const Vec origin(m.dim(), 0.0);
  for (double radius : radii) {
    double lowest = std::numeric_limits<double>::infinity();
    Vec arg;
    for (const Vec& x : sample_sphere(origin, radius, samples, seed)) {
      if (!m.domain().contains(x)) {
        ++t.skipped;
        continue;
      }
      const double v = norm(m.evaluate(x));
      if (v < lowest) {
        lowest = v;
        arg = x;
      }
    }
    t.radii.push_back(radius);
    t.minima.push_back(lowest);
    t.argmins.push_back(std::move(arg));
  }
  const std::size_t n = t.minima.size();
  if (n >= 2) {
    bool increasing = true;
    for (std::size_t i = 1; i < n; ++i)
      if (!(t.minima[i] > t.minima[i - 1])) increasing = false;
    bool upper_nonincreasing = true;
    for (std::size_t i = n / 2 + 1; i < n; ++i)
      if (t.minima[i] > t.minima[i - 1]) upper_nonincreasing = false;
    if (increasing) {
      t.verdict = CoercivityVerdict::Coercive;
    } else if (upper_nonincreasing && t.minima.back() < t.minima.front()) {
      t.verdict = CoercivityVerdict::NotCoercive;
    }
  }
  return t;
}

SupportLine fit_support_line(std::span<const double> s, std::span<const double> g) {
  const std::size_t m = s.size();
  if (m == 0) return {0.0, 0.0};
  const double s_mid = 0.5 * (*std::min_element(s.begin(), s.end()) + *std::max_element(s.begin(), s.end()));
  const auto feasible = [&](double a, double b) {
    if (a < 0.0 || b < 0.0) return false;
    for (std::size_t i = 0; i < m; ++i)
      if (a + b * s[i] < g[i] * (1.0 - 1e-12)) return false;
    return true;
  };
  SupportLine best{*std::max_element(g.begin(), g.end()), 0.0};
  double best_obj = best.a;
  const auto consider = [&](double a, double b) {
    if (!feasible(a, b)) return;
    const double obj = a + b * s_mid;
    if (obj < best_obj * (1.0 - 1e-12)) {
      best = {a, b};
      best_obj = obj;
    }
  };
  double b_origin = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (s[i] > 0.0) b_origin = std::max(b_origin, g[i] / s[i]);
  consider(0.0, b_origin);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      if (s[j] == s[i]) continue;
      const double b = (g[j] - g[i]) / (s[j] - s[i]);
      consider(g[i] - b * s[i], b);
    }
  return best;
}

GrowthModel growth_probe(const MapSpec& m, std::span<const double> radii, std::size_t samples,
                         std::uint64_t seed) {
  GrowthModel gm;
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw Error(ErrorKind::InvalidArgument, "radii must be strictly increasing");
  const Vec origin(m.dim(), 0.0);
  for (double radius : radii) {
    if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "radii must be positive");
    double highest = 0.0;
    bool any = false;
    for (const Vec& x : sample_sphere(origin, radius, samples, seed)) {
      if (!m.domain().contains(x)) continue;
      try {
        highest = std::max(highest, inv_operator_norm(m, x));
        any = true;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularJacobian) throw;
        ++gm.singular_skipped;
      }
    }
    if (!any) continue;
    gm.radii.push_back(radius);
    gm.g.push_back(highest);
  }
  const std::size_t n = gm.radii.size();
  if (n == 0) return gm;
  const SupportLine line = fit_support_line(gm.radii, gm.g);
  gm.a = line.a;
  gm.b = line.b;
  for (std::size_t i = 0; i < n; ++i) {
    const double bound = gm.a + gm.b * gm.radii[i];
    if (bound > 0.0) gm.fit_quality = std::max(gm.fit_quality, (gm.g[i] - bound) / bound);
  }
  if (n >= 2) {
    // Least-squares slope of log g against log s over the upper half.
    const std::size_t first = std::min(n / 2, n - 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double cnt = 0;
    for (std::size_t i = first; i < n; ++i) {
      const double lx = std::log(gm.radii[i]);
      const double ly = std::log(std::max(gm.g[i], 1e-300));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      cnt += 1;
    }
    const double denom = cnt * sxx - sx * sx;
    gm.exponent = denom > 0.0 ? (cnt * sxy - sx * sy) / denom : 0.0;
    if (gm.exponent >= 1.5) {
      gm.verdict = GrowthVerdict::SuperlinearGrowth;
    } else if (gm.fit_quality <= 1e-6 && gm.exponent <= 1.1) {
      gm.verdict = GrowthVerdict::AffineBoundHolds;
    }
  }
  return gm;
}

BoxSupResult bounded_growth_on_box(const MapSpec& m, std::span<const double> lo, std::span<const double> hi,
                                   std::size_t samples, std::uint64_t seed) {
  const std::size_t n = m.dim();
  if (lo.size() != n || hi.size() != n) throw Error(ErrorKind::InvalidArgument, "box has wrong dimension");
  if (!m.domain().box_bounded_in(lo, hi)) {
    throw Error(ErrorKind::InvalidArgument, "box is not bounded in the domain");
  }
  std::vector<Vec> points;
  if (n <= 10) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      Vec c(n);
      for (std::size_t i = 0; i < n; ++i) c[i] = (mask >> i) & 1 ? hi[i] : lo[i];
      points.push_back(std::move(c));
    }
  }
  {
    Vec mid(n);
    for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (lo[i] + hi[i]);
    points.push_back(std::move(mid));
  }
  for (Vec& p : sample_box(lo, hi, samples, seed)) points.push_back(std::move(p));

  BoxSupResult r;
  for (const Vec& x : points) {
    try {
      const double v = inv_operator_norm(m, x);
      ++r.evaluated;
      if (v > r.sup || r.argmax.empty()) {
        r.sup = v;
        r.argmax = x;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularJacobian) throw;
      r.singular_points.push_back(x);
    }
  }
  return r;
}

CellCode classify_outcome(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::ConvergedToBase: return CellCode::InBasin;
    case OutcomeKind::FiniteLife:
    case OutcomeKind::LeftDomain:
    case OutcomeKind::ConvergedElsewhere: return CellCode::Out;
    default: return CellCode::Undetermined;
  }
}

Vec BasinGrid::center(std::size_t i, std::size_t j) const {
  const double res = static_cast<double>(resolution);
  return {lo[0] + (static_cast<double>(i) + 0.5) * (hi[0] - lo[0]) / res,
          lo[1] + (static_cast<double>(j) + 0.5) * (hi[1] - lo[1]) / res};
}

BasinCounts BasinGrid::counts() const {
  BasinCounts c;
  for (const BasinCell& cell : cells) {
    switch (cell.code) {
      case CellCode::InBasin: ++c.in_basin; break;
      case CellCode::Out: ++c.out; break;
      case CellCode::Undetermined: ++c.undetermined; break;
      case CellCode::OutsideDomain: ++c.outside_domain; break;
    }
  }
  return c;
}

namespace {

BasinCell classify_cell(const MapSpec& m, const Vec& x, const TrackOptions& opts) {
  BasinCell cell;
  try {
    const Trajectory tr = integrate_flow(m, x, kForever, opts);
    cell.code = classify_outcome(tr.outcome.kind);
    cell.outcome = tr.outcome.kind;
    cell.param = tr.outcome.param;
    cell.note = tr.outcome.note;
  } catch (const Error& e) {
    cell.code = CellCode::Undetermined;
    cell.note = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return cell;
}

}  // namespace

BasinGrid estimate_basin(const MapSpec& m, const BasinSpec& spec) {
  if (m.dim() != 2) throw Error(ErrorKind::InvalidArgument, "basin rasters need a planar (dim 2) map");
  if (spec.resolution == 0) throw Error(ErrorKind::InvalidArgument, "resolution must be positive");
  if (!(spec.lo[0] < spec.hi[0]) || !(spec.lo[1] < spec.hi[1])) {
    throw Error(ErrorKind::InvalidArgument, "grid bounds must satisfy lo < hi");
  }
  BasinGrid grid;
  grid.lo = spec.lo;
  grid.hi = spec.hi;
  grid.resolution = spec.resolution;
  grid.x0 = m.base_point();
  grid.cells.resize(spec.resolution * spec.resolution);

  TrackOptions tight = spec.track;
  tight.dt_min = spec.track.dt_min / 10.0;

  parallel_for(grid.cells.size(), spec.threads, [&](std::size_t idx) {
    const Vec x = grid.center(idx % spec.resolution, idx / spec.resolution);
    BasinCell& cell = grid.cells[idx];
    if (!m.domain().contains(x)) {
      cell.code = CellCode::OutsideDomain;
      return;
    }
    cell = classify_cell(m, x, spec.track);
    if (spec.flip_check && cell.code != CellCode::Undetermined) {
      const BasinCell again = classify_cell(m, x, tight);
      if (again.code != cell.code) {
        cell.code = CellCode::Undetermined;
        cell.note = "class flips under a tighter dt_min";
      }
    }
  });
  return grid;
}

std::string to_pgm(const BasinGrid& grid) {
  const std::size_t n = grid.resolution;
  std::string out = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
  out.reserve(out.size() + n * n);
  for (std::size_t row = 0; row < n; ++row) {
    const std::size_t j = n - 1 - row;
    for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<char>(grid.at(i, j).code));
  }
  return out;
}

std::string to_csv(const BasinGrid& grid) {
  std::string out = "x,y,code\n";
  for (std::size_t j = 0; j < grid.resolution; ++j)
    for (std::size_t i = 0; i < grid.resolution; ++i) {
      const Vec c = grid.center(i, j);
      out += format_double(c[0]) + "," + format_double(c[1]) + "," +
             std::to_string(static_cast<unsigned>(grid.at(i, j).code)) + "\n";
    }
  return out;
}

}  // namespace waz
