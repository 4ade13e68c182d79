#include "waz/sampling.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "waz/error.hpp"

namespace waz {

namespace {

constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Gaussian vector of dimension n from 2*ceil(n/2) uniforms (Box-Muller).
Vec gaussian(const Vec& u, std::size_t n) {
  Vec g(n);
  for (std::size_t i = 0; i < n; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(1.0 - u[i]));
    const double th = 2.0 * std::numbers::pi * u[i + 1];
    g[i] = r * std::cos(th);
    if (i + 1 < n) g[i + 1] = r * std::sin(th);
  }
  return g;
}

Vec direction(Halton& h, std::size_t n) {
  while (true) {
    const Vec g = gaussian(h.next(), n);
    const double gn = norm(g);
    if (gn > 1e-12) return scaled(1.0 / gn, g);
  }
}

}  // namespace

Halton::Halton(std::size_t dims, std::uint64_t seed) : dims_(dims), shift_(dims) {
  if (dims == 0 || dims > std::size(kPrimes)) {
    throw Error(ErrorKind::InvalidArgument, "Halton dimension out of range");
  }
  std::mt19937_64 rng(seed);
  for (double& s : shift_) s = unit_double(rng);
}

Vec Halton::next() {
  ++index_;
  Vec u(dims_);
  for (std::size_t d = 0; d < dims_; ++d) {
    double v = radical_inverse(index_, kPrimes[d]) + shift_[d];
    u[d] = v >= 1.0 ? v - 1.0 : v;
  }
  return u;
}

std::vector<Vec> sample_ball(std::span<const double> center, double radius, std::size_t count,
                             std::uint64_t seed) {
  const std::size_t n = center.size();
  std::vector<Vec> out;
  out.reserve(count);
  if (n == 1) {
    Halton h(1, seed);
    for (std::size_t k = 0; k < count; ++k) out.push_back({center[0] + radius * (2.0 * h.next()[0] - 1.0)});
  } else if (n == 2) {
    Halton h(2, seed);
    for (std::size_t k = 0; k < count; ++k) {
      const Vec u = h.next();
      const double r = radius * std::sqrt(u[0]);
      const double th = 2.0 * std::numbers::pi * u[1];
      out.push_back({center[0] + r * std::cos(th), center[1] + r * std::sin(th)});
    }
  } else {
    Halton dir(2 * ((n + 1) / 2), seed);
    Halton rad(1, seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t k = 0; k < count; ++k) {
      const Vec d = direction(dir, n);
      const double r = radius * std::pow(rad.next()[0], 1.0 / static_cast<double>(n));
      out.push_back(axpy(center, r, d));
    }
  }
  return out;
}

std::vector<Vec> sample_sphere(std::span<const double> center, double radius, std::size_t count,
                               std::uint64_t seed) {
  const std::size_t n = center.size();
  std::vector<Vec> out;
  if (n == 1) {
    out.push_back({center[0] - radius});
    out.push_back({center[0] + radius});
    return out;
  }
  out.reserve(count);
  if (n == 2) {
    Halton h(1, seed);
    for (std::size_t k = 0; k < count; ++k) {
      const double th = 2.0 * std::numbers::pi * h.next()[0];
      out.push_back({center[0] + radius * std::cos(th), center[1] + radius * std::sin(th)});
    }
  } else {
    Halton h(2 * ((n + 1) / 2), seed);
    for (std::size_t k = 0; k < count; ++k) out.push_back(axpy(center, radius, direction(h, n)));
  }
  return out;
}

std::vector<Vec> sample_box(std::span<const double> lo, std::span<const double> hi, std::size_t count,
                            std::uint64_t seed) {
  const std::size_t n = lo.size();
  Halton h(n, seed);
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Vec u = h.next();
    for (std::size_t i = 0; i < n; ++i) u[i] = lo[i] + u[i] * (hi[i] - lo[i]);
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace waz
