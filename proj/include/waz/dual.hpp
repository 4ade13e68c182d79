#pragma once

// Forward-mode dual numbers carrying a full gradient vector. One evaluation
// of a map over seeded duals yields its whole Jacobian.

#include <cmath>
#include <cstddef>
#include <vector>

#include "waz/error.hpp"

namespace waz {

class Dual {
 public:
  Dual() = default;
  Dual(double value) : value_(value) {}  // NOLINT: implicit from constants
  Dual(double value, std::vector<double> grad) : value_(value), grad_(std::move(grad)) {}

  /// Independent variable `index` of `dim`: gradient is the unit vector e_index.
  static Dual variable(double value, std::size_t index, std::size_t dim) {
    std::vector<double> g(dim, 0.0);
    g[index] = 1.0;
    return {value, std::move(g)};
  }

  double value() const noexcept { return value_; }
  /// Empty for constants.
  const std::vector<double>& grad() const noexcept { return grad_; }
  double partial(std::size_t i) const noexcept { return i < grad_.size() ? grad_[i] : 0.0; }

  Dual& operator+=(const Dual& o) {
    value_ += o.value_;
    combine(1.0, o, 1.0);
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value_ -= o.value_;
    combine(1.0, o, -1.0);
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    const double a = value_, b = o.value_;
    value_ = a * b;
    combine(b, o, a);
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double a = value_, b = o.value_;
    value_ = a / b;
    combine(1.0 / b, o, -a / (b * b));
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }
  friend Dual operator-(Dual a) {
    a.value_ = -a.value_;
    for (double& g : a.grad_) g = -g;
    return a;
  }

  /// f(value) with derivative `df` applied through the chain rule.
  Dual chain(double f, double df) const {
    Dual r(f, grad_);
    for (double& g : r.grad_) g *= df;
    return r;
  }

 private:
  // grad <- sa*grad + sb*o.grad, growing to the longer of the two.
  void combine(double sa, const Dual& o, double sb) {
    if (grad_.size() < o.grad_.size()) grad_.resize(o.grad_.size(), 0.0);
    for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] *= sa;
    for (std::size_t i = 0; i < o.grad_.size(); ++i) grad_[i] += sb * o.grad_[i];
  }

  double value_ = 0.0;
  std::vector<double> grad_;
};

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.value(); }

inline Dual sin(const Dual& x) { return x.chain(std::sin(x.value()), std::cos(x.value())); }
inline Dual cos(const Dual& x) { return x.chain(std::cos(x.value()), -std::sin(x.value())); }
inline Dual exp(const Dual& x) {
  const double e = std::exp(x.value());
  return x.chain(e, e);
}
inline Dual log(const Dual& x) { return x.chain(std::log(x.value()), 1.0 / x.value()); }
inline Dual sqrt(const Dual& x) {
  const double s = std::sqrt(x.value());
  return x.chain(s, 0.5 / s);
}
/// |x|; throws NotDifferentiable at 0 rather than picking a subgradient.
inline Dual abs(const Dual& x) {
  if (x.value() == 0.0) throw Error(ErrorKind::NotDifferentiable, "abs is not differentiable at 0");
  return x.chain(std::abs(x.value()), x.value() > 0 ? 1.0 : -1.0);
}
/// x^k for integer k.
inline Dual ipow(const Dual& x, int k) {
  if (k == 0) return Dual(1.0);
  const double v = x.value();
  return x.chain(std::pow(v, k), k * std::pow(v, k - 1));
}
inline double ipow(double x, int k) { return k == 0 ? 1.0 : std::pow(x, k); }

}  // namespace waz
