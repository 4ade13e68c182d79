#include "waz/map.hpp"

#include <cstdio>

#include "waz/error.hpp"

namespace waz {

namespace {

std::string point_str(std::span<const double> x) {
  std::string s = "(";
  char buf[32];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.17g", i ? ", " : "", x[i]);
    s += buf;
  }
  return s + ")";
}

}  // namespace

MapSpec::MapSpec(std::string label, std::size_t dim, VecFn eval_fn, DualFn dual_fn,
                 JacobianSource source, DomainSpec domain, Vec base_point)
    : label_(std::move(label)),
      dim_(dim),
      evaluate_(std::move(eval_fn)),
      evaluate_dual_(std::move(dual_fn)),
      jacobian_(std::move(source)),
      domain_(std::move(domain)),
      x0_(std::move(base_point)) {
  if (dim_ == 0) throw Error(ErrorKind::InvalidArgument, "map dimension must be positive");
  if (!evaluate_) throw Error(ErrorKind::InvalidArgument, "map without an evaluator");
  if (std::holds_alternative<AutoDiff>(jacobian_) && !evaluate_dual_) {
    throw Error(ErrorKind::InvalidArgument, "AutoDiff Jacobian requested without a dual evaluator");
  }
  if (const auto* a = std::get_if<Analytic>(&jacobian_); a && !a->jacobian) {
    throw Error(ErrorKind::InvalidArgument, "Analytic Jacobian source without a function");
  }
  if (x0_.size() != dim_) throw Error(ErrorKind::InvalidArgument, "base point has wrong dimension");
  if (!domain_.contains(x0_)) {
    throw Error(ErrorKind::DomainViolation, "base point " + point_str(x0_) + " is not inside the domain");
  }
  y0_ = evaluate(x0_);
}

void MapSpec::check_point(std::span<const double> x) const {
  if (x.size() != dim_) throw Error(ErrorKind::InvalidArgument, "point has wrong dimension");
  if (!all_finite(x)) throw Error(ErrorKind::NonFinite, "non-finite point " + point_str(x));
  if (!domain_.contains(x)) {
    throw Error(ErrorKind::DomainViolation, "point " + point_str(x) + " outside the domain of " + label_);
  }
}

Vec MapSpec::evaluate_unchecked(std::span<const double> x) const {
  Vec y = evaluate_(x);
  if (y.size() != dim_) throw Error(ErrorKind::InvalidArgument, "evaluator returned wrong dimension");
  if (!all_finite(y)) throw Error(ErrorKind::NonFinite, "non-finite value of " + label_ + " at " + point_str(x));
  return y;
}

Vec MapSpec::evaluate(std::span<const double> x) const {
  check_point(x);
  return evaluate_unchecked(x);
}

Matrix MapSpec::jacobian(std::span<const double> x) const {
  check_point(x);
  Matrix j = std::visit(
      [&](const auto& src) -> Matrix {
        using S = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<S, AutoDiff>) {
          return jacobian_autodiff(x);
        } else if constexpr (std::is_same_v<S, Analytic>) {
          return src.jacobian(x);
        } else {
          return jacobian_fd(x, src.h0);
        }
      },
      jacobian_);
  if (j.rows() != dim_ || j.cols() != dim_) {
    throw Error(ErrorKind::InvalidArgument, "Jacobian has wrong shape");
  }
  if (!j.all_finite()) throw Error(ErrorKind::NonFinite, "non-finite Jacobian of " + label_ + " at " + point_str(x));
  return j;
}

Matrix MapSpec::jacobian_autodiff(std::span<const double> x) const {
  std::vector<Dual> xd;
  xd.reserve(dim_);
  for (std::size_t i = 0; i < dim_; ++i) xd.push_back(Dual::variable(x[i], i, dim_));
  const std::vector<Dual> yd = evaluate_dual_(xd);
  if (yd.size() != dim_) throw Error(ErrorKind::InvalidArgument, "dual evaluator returned wrong dimension");
  Matrix j(dim_, dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) j(r, c) = yd[r].partial(c);
  return j;
}

Matrix MapSpec::jacobian_fd(std::span<const double> x, double h0) const {
  const double h = h0 * (1.0 + norm(x));
  // The centre is never used by the stencil, but a pole there must not hide.
  (void)evaluate(x);
  Matrix j(dim_, dim_);
  Vec xp(x.begin(), x.end()), xm(x.begin(), x.end());
  for (std::size_t c = 0; c < dim_; ++c) {
    xp[c] = x[c] + h;
    xm[c] = x[c] - h;
    // Stencil points must stay in the domain too.
    const Vec fp = evaluate(xp);
    const Vec fm = evaluate(xm);
    const double width = xp[c] - xm[c];
    for (std::size_t r = 0; r < dim_; ++r) j(r, c) = (fp[r] - fm[r]) / width;
    xp[c] = xm[c] = x[c];
  }
  return j;
}

MapSpec MapSpec::with_jacobian(JacobianSource source) const {
  return MapSpec(label_, dim_, evaluate_, evaluate_dual_, std::move(source), domain_, x0_);
}

MapSpec MapSpec::with_base_point(Vec x0) const {
  return MapSpec(label_, dim_, evaluate_, evaluate_dual_, jacobian_, domain_, std::move(x0));
}

Matrix eval_jacobian(const MapSpec& m, std::span<const double> x) { return m.jacobian(x); }

double inv_operator_norm(const MapSpec& m, std::span<const double> x) {
  return inverse_spectral_norm(m.jacobian(x));
}

}  // namespace waz
