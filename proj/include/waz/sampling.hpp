#pragma once

// Seeded low-discrepancy point sets: a Halton sequence with a Cranley-Patterson
// rotation drawn from mt19937_64(seed). Output is bit-reproducible for a
// given seed, count and dimension.

#include <cstdint>
#include <vector>

#include "waz/linalg.hpp"

namespace waz {

class Halton {
 public:
  Halton(std::size_t dims, std::uint64_t seed);
  /// Next point of [0,1)^dims.
  Vec next();

 private:
  std::size_t dims_;
  std::uint64_t index_ = 0;
  Vec shift_;
};

/// `count` quasi-uniform points in the open ball B(center; radius).
std::vector<Vec> sample_ball(std::span<const double> center, double radius, std::size_t count,
                             std::uint64_t seed);
/// Quasi-uniform directions on the sphere ||x - center|| = radius. In 1-D the
/// sphere is the two points center +- radius regardless of `count`.
std::vector<Vec> sample_sphere(std::span<const double> center, double radius, std::size_t count,
                               std::uint64_t seed);
/// Quasi-uniform points in the box [lo, hi].
std::vector<Vec> sample_box(std::span<const double> lo, std::span<const double> hi, std::size_t count,
                            std::uint64_t seed);

}  // namespace waz
