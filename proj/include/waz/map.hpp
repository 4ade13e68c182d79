#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "waz/domain.hpp"
#include "waz/dual.hpp"
#include "waz/linalg.hpp"

namespace waz {

using VecFn = std::function<Vec(std::span<const double>)>;
using DualFn = std::function<std::vector<Dual>(std::span<const Dual>)>;
using MatFn = std::function<Matrix(std::span<const double>)>;

struct AutoDiff {};
struct Analytic {
  MatFn jacobian;
};
struct FiniteDifference {
  /// Relative step scale; the actual step is h0 * (1 + ||x||).
  double h0 = std::sqrt(std::numeric_limits<double>::epsilon());
};
using JacobianSource = std::variant<AutoDiff, Analytic, FiniteDifference>;

/// An evaluatable map f: D -> R^n with its Jacobian source, domain and base
/// point x0. Immutable after construction and safe to share across threads.
class MapSpec {
 public:
  MapSpec(std::string label, std::size_t dim, VecFn evaluate, DualFn evaluate_dual,
          JacobianSource jacobian, DomainSpec domain, Vec base_point);

  /// Builds both the double and the dual evaluator from one generic callable
  /// `fn(std::span<const T>) -> std::vector<T>`.
  template <class F>
  static MapSpec from_generic(std::string label, std::size_t dim, F fn, DomainSpec domain,
                              Vec base_point, JacobianSource jacobian = AutoDiff{}) {
    VecFn ev = [fn](std::span<const double> x) { return fn(x); };
    DualFn dv = [fn](std::span<const Dual> x) { return fn(x); };
    return MapSpec(std::move(label), dim, std::move(ev), std::move(dv), std::move(jacobian),
                   std::move(domain), std::move(base_point));
  }

  const std::string& label() const noexcept { return label_; }
  std::size_t dim() const noexcept { return dim_; }
  const DomainSpec& domain() const noexcept { return domain_; }
  const Vec& base_point() const noexcept { return x0_; }
  /// y0 = f(x0).
  const Vec& base_image() const noexcept { return y0_; }
  const JacobianSource& jacobian_source() const noexcept { return jacobian_; }
  bool has_dual() const noexcept { return static_cast<bool>(evaluate_dual_); }

  /// Length scale 1 + ||x0|| used by the trackers' relative thresholds.
  double scale() const noexcept { return 1.0 + norm(x0_); }

  /// f(x). Throws DomainViolation outside the domain, NonFinite on NaN/Inf.
  Vec evaluate(std::span<const double> x) const;
  /// Jf(x) from the configured source; same errors as evaluate.
  Matrix jacobian(std::span<const double> x) const;

  /// Copy with another Jacobian source.
  MapSpec with_jacobian(JacobianSource source) const;
  /// Copy with another base point (must lie inside the domain).
  MapSpec with_base_point(Vec x0) const;

 private:
  void check_point(std::span<const double> x) const;
  Vec evaluate_unchecked(std::span<const double> x) const;
  Matrix jacobian_autodiff(std::span<const double> x) const;
  Matrix jacobian_fd(std::span<const double> x, double h0) const;

  std::string label_;
  std::size_t dim_;
  VecFn evaluate_;
  DualFn evaluate_dual_;
  JacobianSource jacobian_;
  DomainSpec domain_;
  Vec x0_;
  Vec y0_;
};

/// Jf(x) (alias of MapSpec::jacobian, kept as a free function for symmetry
/// with the other map-level operations).
Matrix eval_jacobian(const MapSpec& m, std::span<const double> x);

/// Spectral norm ||Jf(x)^{-1}||. Throws SingularJacobian.
double inv_operator_norm(const MapSpec& m, std::span<const double> x);

}  // namespace waz
