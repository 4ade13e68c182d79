#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "waz/linalg.hpp"

namespace waz {

/// Axis-aligned box; infinite bounds are allowed (the all-infinite box is R^n).
struct Box {
  Vec lo, hi;
};

struct Ball {
  Vec center;
  double radius = 1.0;
};

/// Box with closed discs of radius `exclusion_radius` removed around each
/// excluded point (e.g. the punctured plane).
struct PuncturedBox {
  Vec lo, hi;
  std::vector<Vec> excluded;
  double exclusion_radius = 1e-6;
};

/// User-supplied membership test plus a signed distance-like interior margin.
struct Predicate {
  std::function<bool(std::span<const double>)> contains;
  std::function<double(std::span<const double>)> margin;
};

using DomainShape = std::variant<Box, Ball, PuncturedBox, Predicate>;

/// Which part of the boundary a point is closest to. Outer box faces are an
/// artificial truncation; everything else (excluded points, ball spheres,
/// predicate boundaries) is the natural boundary of the open set.
enum class BoundaryPiece { None, OuterBox, Natural };

class DomainSpec {
 public:
  DomainSpec() : DomainSpec(whole_space(1)) {}
  /// `margin` < 0 selects the default 1e-9*(1+diameter), using `scale` in
  /// place of the diameter for unbounded shapes.
  explicit DomainSpec(DomainShape shape, double margin = -1.0, double scale = 1.0);

  static DomainShape whole_space(std::size_t dim);
  static DomainShape punctured_plane(std::vector<Vec> excluded, double exclusion_radius);

  const DomainShape& shape() const noexcept { return shape_; }
  double margin() const noexcept { return margin_; }

  /// Distance from x to the boundary (negative outside). +inf for R^n.
  double boundary_distance(std::span<const double> x) const;
  /// Inside with at least `margin()` clearance.
  bool contains(std::span<const double> x) const;
  BoundaryPiece nearest_piece(std::span<const double> x) const;
  /// The straight segment [a, b] stays inside (holes are not jumped over).
  /// Exact for boxes, balls and punctured boxes; sampled for predicates.
  bool segment_inside(std::span<const double> a, std::span<const double> b) const;

  /// Euclidean diameter of the shape; +inf when unbounded.
  double diameter() const;

  /// Box [lo, hi] inflated by margin() still lies inside the domain.
  bool box_bounded_in(std::span<const double> lo, std::span<const double> hi) const;

  /// Points removed from the domain (PuncturedBox only).
  std::span<const Vec> excluded_points() const;
  double exclusion_radius() const;

 private:
  DomainShape shape_;
  double margin_;
};

}  // namespace waz
