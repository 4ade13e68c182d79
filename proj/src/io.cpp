#include "waz/io.hpp"

#include <cmath>
#include <cstdio>

namespace waz {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string header(const char* param, std::size_t dim) {
  std::string h = param;
  for (std::size_t i = 0; i < dim; ++i) h += ",x" + std::to_string(i + 1);
  return h + ",residual\n";
}

std::string rows(const std::vector<PathSample>& samples) {
  std::string out;
  for (const PathSample& s : samples) {
    out += format_double(s.param);
    for (double v : s.x) out += "," + format_double(v);
    out += "," + format_double(s.residual) + "\n";
  }
  return out;
}

json samples_json(const std::vector<PathSample>& samples, const char* param) {
  json arr = json::array();
  for (const PathSample& s : samples) arr.push_back({{param, s.param}, {"x", s.x}, {"residual", s.residual}});
  return arr;
}

// JSON has no infinity; unbounded values become null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string to_csv(const Trajectory& traj) {
  const std::size_t dim = traj.x_start.size();
  return header("t", dim) + rows(traj.samples) + "# outcome=" + std::string(to_string(traj.outcome.kind)) +
         " t=" + format_double(traj.outcome.param) + "\n";
}

std::string to_csv(const LiftOutcome& lift) {
  const std::size_t dim = lift.x_a.size();
  std::string tail = "# complete=" + std::string(lift.complete ? "true" : "false") + " s_max=" + format_double(lift.s_max);
  if (lift.failure) tail += " failure=" + std::string(to_string(lift.failure->kind));
  return header("s", dim) + rows(lift.samples) + tail + "\n";
}

json to_json(const Outcome& o) {
  return {{"tag", std::string(to_string(o.kind))}, {"param", o.param}, {"point", o.point}, {"note", o.note}};
}

json to_json(const Trajectory& traj) {
  return {{"x_start", traj.x_start},
          {"samples", samples_json(traj.samples, "t")},
          {"outcome", to_json(traj.outcome)},
          {"accepted_steps", traj.accepted},
          {"rejected_steps", traj.rejected},
          {"eta_inv", traj.eta_inv}};
}

json to_json(const LiftOutcome& lift) {
  json j = {{"x_a", lift.x_a},
            {"y_b", lift.y_b},
            {"samples", samples_json(lift.samples, "s")},
            {"complete", lift.complete},
            {"s_max", lift.s_max},
            {"accepted_steps", lift.accepted},
            {"rejected_steps", lift.rejected},
            {"eta_inv", lift.eta_inv}};
  j["failure"] = lift.failure ? to_json(*lift.failure) : json(nullptr);
  return j;
}

json to_json(const StarCriterionResult& r) {
  json viol = json::array();
  for (const Violation& v : r.violations) viol.push_back({{"point", v.point}, {"value", v.value}});
  return {{"center", r.center},
          {"radius", r.radius},
          {"requested", r.requested},
          {"evaluated", r.evaluated},
          {"singular_skipped", r.singular_skipped},
          {"outside_skipped", r.outside_skipped},
          {"min_value", r.min_value},
          {"argmin", r.argmin},
          {"violations", viol}};
}

json to_json(const GrowthModel& g) {
  return {{"a", g.a},
          {"b", g.b},
          {"verdict", std::string(to_string(g.verdict))},
          {"fit_quality", g.fit_quality},
          {"exponent", g.exponent},
          {"radii", g.radii},
          {"g", g.g},
          {"singular_skipped", g.singular_skipped}};
}

json to_json(const CoercivityTrend& c) {
  json minima = json::array();
  for (double m : c.minima) minima.push_back(finite_or_null(m));
  return {{"radii", c.radii},
          {"minima", minima},
          {"argmins", c.argmins},
          {"skipped", c.skipped},
          {"verdict", std::string(to_string(c.verdict))}};
}

json to_json(const BoxSupResult& b) {
  return {{"sup", b.sup}, {"argmax", b.argmax}, {"evaluated", b.evaluated}, {"singular_points", b.singular_points}};
}

json to_json(const LyapunovCheck& l) {
  json j = {{"monotone", l.monotone}, {"max_increase", l.max_increase}, {"samples", l.samples}};
  if (l.first_violation) {
    j["first_violation"] = {{"index", *l.first_violation}, {"t", l.violation_param}};
  } else {
    j["first_violation"] = nullptr;
  }
  return j;
}

json to_json(const CertReport& r) {
  json j;
  j["map"] = r.map_label;
  j["x0"] = r.x0;
  j["seed"] = r.seed;
  j["certificate"] = "sampled";
  if (r.criterion) {
    json viol = json::array();
    for (const Violation& v : r.criterion->violations) viol.push_back({{"point", v.point}, {"value", v.value}});
    j["criterion_violations"] = viol;
    j["criterion"] = to_json(*r.criterion);
    j["criterion"].erase("violations");
  } else {
    j["criterion_violations"] = json::array();
    j["criterion"] = nullptr;
  }
  j["growth_fit"] = r.growth ? to_json(*r.growth) : json(nullptr);
  j["coercivity_trend"] = r.coercivity ? to_json(*r.coercivity) : json(nullptr);
  j["bounded_growth"] = r.box_sup ? to_json(*r.box_sup) : json(nullptr);
  json lyap = json::array();
  for (const auto& l : r.lyapunov) lyap.push_back(to_json(l));
  j["lyapunov"] = lyap;
  j["flags"] = r.flags;
  return j;
}

json summary_json(const BasinGrid& grid) {
  const BasinCounts c = grid.counts();
  return {{"resolution", grid.resolution},
          {"bounds", {grid.lo[0], grid.hi[0], grid.lo[1], grid.hi[1]}},
          {"x0", grid.x0},
          {"counts",
           {{"InBasin", c.in_basin}, {"Out", c.out}, {"Undetermined", c.undetermined}, {"OutsideDomain", c.outside_domain}}}};
}

}  // namespace waz
