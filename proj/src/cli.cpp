#include "waz/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "waz/certify.hpp"
#include "waz/error.hpp"
#include "waz/expr.hpp"
#include "waz/fixtures.hpp"
#include "waz/flow.hpp"
#include "waz/io.hpp"
#include "waz/parallel.hpp"
#include "waz/report.hpp"
#include "waz/sampling.hpp"

namespace waz::cli {

namespace {

using nlohmann::json;

/// Raised for anything the user got wrong on the command line (exit 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string fixture;
  std::string expression;
  std::size_t dim = 0;
  std::string x0;
  std::string matrix;
  std::string jacobian = "autodiff";
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  // Tolerance overrides.
  TrackOptions track;
};

Vec parse_vec(const std::string& text, const char* what) {
  Vec v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double d = std::stod(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(d)) throw std::invalid_argument(item);
      v.push_back(d);
    } catch (const std::exception&) {
      throw ConfigError(std::string("invalid number '") + item + "' in " + what);
    }
  }
  if (v.empty()) throw ConfigError(std::string("empty list for ") + what);
  return v;
}

Vec parse_vec_dim(const std::string& text, std::size_t dim, const char* what) {
  Vec v = parse_vec(text, what);
  if (v.size() != dim) {
    throw ConfigError(std::string(what) + " needs " + std::to_string(dim) + " components, got " +
                      std::to_string(v.size()));
  }
  return v;
}

MapSpec build_map(const RunConfig& cfg) {
  const bool have_fixture = !cfg.fixture.empty();
  const bool have_expr = !cfg.expression.empty();
  if (have_fixture == have_expr) throw ConfigError("give exactly one of --map or --expr");
  try {
    if (have_expr) {
      if (cfg.dim == 0) throw ConfigError("--expr needs --dim");
      Vec x0 = cfg.x0.empty() ? Vec(cfg.dim, 0.0) : parse_vec_dim(cfg.x0, cfg.dim, "--x0");
      MapSpec m = expr::make_map(cfg.expression, cfg.dim, std::move(x0), "expr");
      if (cfg.jacobian == "fd") return m.with_jacobian(FiniteDifference{});
      if (cfg.jacobian == "analytic") throw ConfigError("--jacobian analytic is only available for fixtures");
      return m;
    }
    if (!fixtures::exists(cfg.fixture)) throw ConfigError("unknown fixture '" + cfg.fixture + "'");
    fixtures::FixtureOptions opts;
    if (!cfg.matrix.empty()) {
      if (cfg.fixture != "linear") throw ConfigError("--matrix applies to the linear fixture only");
      const Vec entries = parse_vec(cfg.matrix, "--matrix");
      const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(entries.size()))));
      if (n * n != entries.size()) throw ConfigError("--matrix needs n*n entries");
      Matrix a(n, n);
      for (std::size_t i = 0; i < entries.size(); ++i) a(i / n, i % n) = entries[i];
      opts.matrix = a;
    }
    if (cfg.jacobian == "fd") {
      opts.jacobian = FiniteDifference{};
    } else if (cfg.jacobian == "analytic") {
      opts.jacobian = Analytic{};
    }
    std::size_t dim = 0;
    for (const auto& f : fixtures::list())
      if (f.name == cfg.fixture) dim = f.dim;
    if (opts.matrix) dim = opts.matrix->rows();
    if (!cfg.x0.empty()) opts.base_point = parse_vec_dim(cfg.x0, dim, "--x0");
    return fixtures::make(cfg.fixture, opts);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + cfg.out + "'");
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json error_json(const Error& e) {
  return {{"status", "error"}, {"reason", std::string(to_string(e.kind()))}, {"message", e.what()}};
}

int cmd_invert(const RunConfig& cfg, const std::string& target, std::ostream& out) {
  const MapSpec m = build_map(cfg);
  const Vec y = parse_vec_dim(target, m.dim(), "--target");
  json j = {{"command", "invert"}, {"map", m.label()}, {"x0", m.base_point()}, {"target", y}};
  try {
    const InvertResult r = invert_at(m, y, cfg.track);
    json lift = {{"complete", r.lift.complete},
                 {"s_max", r.lift.s_max},
                 {"accepted_steps", r.lift.accepted},
                 {"rejected_steps", r.lift.rejected},
                 {"samples", r.lift.samples.size()}};
    lift["failure"] = r.lift.failure ? to_json(*r.lift.failure) : json(nullptr);
    j["lift"] = lift;
    if (r.ok) {
      j["status"] = "ok";
      j["x"] = r.x;
      j["residual"] = r.residual;
      emit(cfg, dump(j), out);
      return kExitOk;
    }
    j["status"] = "failure";
    j["reason"] = std::string(to_string(r.lift.failure->kind));
    emit(cfg, dump(j), out);
    return kExitNumerical;
  } catch (const Error& e) {
    j.update(error_json(e));
    emit(cfg, dump(j), out);
    return kExitNumerical;
  }
}

int cmd_trace(const RunConfig& cfg, const std::string& start, double t_end, std::ostream& out) {
  const MapSpec m = build_map(cfg);
  const Vec xs = start.empty() ? m.base_point() : parse_vec_dim(start, m.dim(), "--start");
  if (!(t_end > 0.0)) throw ConfigError("--t-end must be positive");
  const std::string format = cfg.format.empty() ? "csv" : cfg.format;
  if (format != "csv" && format != "json") throw ConfigError("trace supports --format csv or json");
  if (!m.domain().contains(xs)) throw ConfigError("--start is outside the domain");
  try {
    const Trajectory tr = integrate_flow(m, xs, t_end, cfg.track);
    if (format == "csv") {
      emit(cfg, to_csv(tr), out);
    } else {
      json j = {{"command", "trace"}, {"map", m.label()}, {"x0", m.base_point()}, {"status", "ok"}};
      j["trajectory"] = to_json(tr);
      emit(cfg, dump(j), out);
    }
    return kExitOk;
  } catch (const Error& e) {
    json j = {{"command", "trace"}, {"map", m.label()}, {"x0", m.base_point()}};
    j.update(error_json(e));
    emit(cfg, dump(j), out);
    return kExitNumerical;
  }
}

int cmd_basin(const RunConfig& cfg, const std::string& bounds, std::size_t res, bool flip_check,
              std::ostream& out) {
  const MapSpec m = build_map(cfg);
  if (m.dim() != 2) throw ConfigError("basin needs a planar map (dim 2)");
  const Vec b = bounds.empty() ? Vec{-2.0, 2.0, -2.0, 2.0} : parse_vec_dim(bounds, 4, "--bounds");
  if (!(b[0] < b[1]) || !(b[2] < b[3])) throw ConfigError("--bounds must be x1lo,x1hi,x2lo,x2hi with lo < hi");
  if (res == 0) throw ConfigError("--res must be positive");
  const std::string format = cfg.format.empty() ? "both" : cfg.format;
  if (format != "both" && format != "pgm" && format != "csv") {
    throw ConfigError("basin supports --format pgm or csv (default: both)");
  }
  BasinSpec spec;
  spec.lo = {b[0], b[2]};
  spec.hi = {b[1], b[3]};
  spec.resolution = res;
  spec.track = cfg.track;
  spec.flip_check = flip_check;
  spec.threads = default_threads();
  const BasinGrid grid = estimate_basin(m, spec);

  const std::string prefix = cfg.out.empty() ? "basin" : cfg.out;
  const auto write = [](const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << text;
  };
  json files = json::array();
  if (format != "csv") {
    write(prefix + ".pgm", to_pgm(grid));
    files.push_back(prefix + ".pgm");
  }
  if (format != "pgm") {
    write(prefix + ".csv", to_csv(grid));
    files.push_back(prefix + ".csv");
  }
  json j = {{"command", "basin"}, {"map", m.label()}, {"status", "ok"}};
  j.update(summary_json(grid));
  j["files"] = files;
  out << dump(j);
  return kExitOk;
}

struct CertifyArgs {
  double r0 = 1.0;
  std::size_t samples = 10000;
  std::size_t sphere_samples = 720;
  std::size_t box_samples = 2000;
  std::string radii = "1,2,4,8,16";
  std::string box;
  std::size_t lyapunov = 0;
};

int cmd_certify(const RunConfig& cfg, const CertifyArgs& args, std::ostream& out) {
  const MapSpec m = build_map(cfg);
  if (!(args.r0 > 0.0)) throw ConfigError("--r0 must be positive");
  const Vec radii = parse_vec(args.radii, "--radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw ConfigError("--radii must be positive and strictly increasing");
    }
  }
  const std::size_t n = m.dim();
  Vec lo(n), hi(n);
  if (args.box.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = m.base_point()[i] - 0.5 * args.r0;
      hi[i] = m.base_point()[i] + 0.5 * args.r0;
    }
  } else {
    const Vec b = parse_vec_dim(args.box, 2 * n, "--box");
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = b[2 * i];
      hi[i] = b[2 * i + 1];
    }
  }
  if (!m.domain().box_bounded_in(lo, hi)) throw ConfigError("--box is not bounded in the domain");

  CertReport report;
  report.map_label = m.label();
  report.x0 = m.base_point();
  report.seed = cfg.seed;
  try {
    report.criterion = check_star_criterion(m, args.r0, args.samples, cfg.seed);
    report.growth = growth_probe(m, radii, args.sphere_samples, cfg.seed);
    report.coercivity = coercivity_probe(m, radii, args.sphere_samples, cfg.seed);
    report.box_sup = bounded_growth_on_box(m, lo, hi, args.box_samples, cfg.seed);
    if (args.lyapunov > 0) {
      std::vector<Trajectory> trajs;
      for (const Vec& x : sample_ball(m.base_point(), args.r0, args.lyapunov, cfg.seed + 1)) {
        if (m.domain().contains(x)) trajs.push_back(integrate_flow(m, x, kForever, cfg.track));
      }
      report.lyapunov = check_lyapunov(half_squared_distance(m.base_point()), trajs);
    }
  } catch (const Error& e) {
    json j = {{"command", "certify"}, {"map", m.label()},   {"x0", m.base_point()},
              {"seed", cfg.seed},      {"certificate", "sampled"}, {"flags", json::array()}};
    j.update(error_json(e));
    emit(cfg, dump(j), out);
    return kExitNumerical;
  }
  summarize(report);
  json j = to_json(report);
  j["command"] = "certify";
  j["status"] = "ok";
  emit(cfg, dump(j), out);
  return kExitOk;
}

int cmd_list_fixtures(std::ostream& out) {
  json arr = json::array();
  for (const auto& f : fixtures::list()) {
    const MapSpec m = fixtures::make(f.name);
    arr.push_back({{"name", f.name}, {"dim", f.dim}, {"x0", m.base_point()}, {"description", f.description}});
  }
  out << dump({{"command", "list-fixtures"}, {"status", "ok"}, {"fixtures", arr}});
  return kExitOk;
}

void add_map_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--map", cfg.fixture, "built-in fixture name (see list-fixtures)");
  sub->add_option("--expr", cfg.expression, "map components over x1..xn separated by ';'");
  sub->add_option("--dim", cfg.dim, "dimension for --expr");
  sub->add_option("--x0", cfg.x0, "base point, comma separated (use --x0=-1,0 for negatives)");
  sub->add_option("--matrix", cfg.matrix, "row-major entries for the linear fixture");
  sub->add_option("--jacobian", cfg.jacobian, "Jacobian source")
      ->check(CLI::IsMember({"autodiff", "analytic", "fd"}));
  sub->add_option("--seed", cfg.seed, "sampling seed (default 0)");
  sub->add_option("--out", cfg.out, "output path (basin: file prefix)");
  sub->add_option("--format", cfg.format, "output format: json, csv or pgm");
  sub->add_option("--dt-min", cfg.track.dt_min, "minimum time step (default 1e-12)")->check(CLI::PositiveNumber);
  sub->add_option("--eta-rel", cfg.track.eta_rel, "invariant residual scale (default 1e-9)")->check(CLI::PositiveNumber);
  sub->add_option("--tol-rel", cfg.track.tol_rel, "convergence tolerance scale (default 1e-8)")->check(CLI::PositiveNumber);
  sub->add_option("--max-steps", cfg.track.max_steps, "step budget (default 100000)")->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"waz: global inversion of local diffeomorphisms by auxiliary-flow tracking"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string target, start, bounds;
  double t_end = kForever;
  std::size_t res = 101;
  bool no_flip = false;
  CertifyArgs cert;

  auto* invert = app.add_subcommand("invert", "solve f(x) = y by lifting the segment [f(x0), y]");
  add_map_options(invert, cfg);
  invert->add_option("--target", target, "y, comma separated")->required();

  auto* trace = app.add_subcommand("trace", "track the auxiliary flow from a start point");
  add_map_options(trace, cfg);
  trace->add_option("--start", start, "start point (default x0)");
  trace->add_option("--t-end", t_end, "final time (default: until convergence or failure)");

  auto* basin = app.add_subcommand("basin", "rasterise the basin of x0 (planar maps)");
  add_map_options(basin, cfg);
  basin->add_option("--bounds", bounds, "x1lo,x1hi,x2lo,x2hi (default -2,2,-2,2)");
  basin->add_option("--res", res, "cells per axis (default 101)");
  basin->add_flag("--no-flip-check", no_flip, "skip the dt_min perturbation re-run");

  auto* certify = app.add_subcommand("certify", "sampled certification report (JSON)");
  add_map_options(certify, cfg);
  certify->add_option("--r0", cert.r0, "ball radius for the star criterion (default 1)");
  certify->add_option("--samples", cert.samples, "ball samples (default 10000)");
  certify->add_option("--sphere-samples", cert.sphere_samples, "samples per sphere (default 720)");
  certify->add_option("--box-samples", cert.box_samples, "samples in the growth box (default 2000)");
  certify->add_option("--radii", cert.radii, "sphere radii (default 1,2,4,8,16)");
  certify->add_option("--box", cert.box, "lo1,hi1,lo2,hi2,... (default x0 +- r0/2)");
  certify->add_option("--lyapunov", cert.lyapunov, "number of seeded trajectories for the Lyapunov check");

  app.add_subcommand("list-fixtures", "list built-in maps");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // Subcommand help also arrives here.
    if (e.get_exit_code() == 0) {
      for (auto* sub : app.get_subcommands()) {
        out << sub->help();
        return kExitOk;
      }
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (invert->parsed()) return cmd_invert(cfg, target, out);
    if (trace->parsed()) return cmd_trace(cfg, start, t_end, out);
    if (basin->parsed()) return cmd_basin(cfg, bounds, res, !no_flip, out);
    if (certify->parsed()) return cmd_certify(cfg, cert, out);
    return cmd_list_fixtures(out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace waz::cli
