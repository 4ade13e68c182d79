#include "waz/domain.hpp"

#include <algorithm>
#include <cmath>

#include "waz/error.hpp"

namespace waz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double box_distance(std::span<const double> lo, std::span<const double> hi,
                    std::span<const double> x) {
  double d = kInf;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::min({d, x[i] - lo[i], hi[i] - x[i]});
  return d;
}

double box_diameter(std::span<const double> lo, std::span<const double> hi) {
  return distance(lo, hi);
}

double hole_distance(const PuncturedBox& p, std::span<const double> x) {
  double d = kInf;
  for (const Vec& e : p.excluded) d = std::min(d, distance(x, e) - p.exclusion_radius);
  return d;
}

}  // namespace

DomainSpec::DomainSpec(DomainShape shape, double margin, double scale)
    : shape_(std::move(shape)), margin_(margin) {
  if (margin_ < 0.0) {
    const double diam = diameter();
    margin_ = 1e-9 * (1.0 + (std::isfinite(diam) ? diam : scale));
  }
}

DomainShape DomainSpec::whole_space(std::size_t dim) {
  return Box{Vec(dim, -kInf), Vec(dim, kInf)};
}

DomainShape DomainSpec::punctured_plane(std::vector<Vec> excluded, double exclusion_radius) {
  return PuncturedBox{Vec(2, -kInf), Vec(2, kInf), std::move(excluded), exclusion_radius};
}

double DomainSpec::boundary_distance(std::span<const double> x) const {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Box>) {
          return box_distance(s.lo, s.hi, x);
        } else if constexpr (std::is_same_v<S, Ball>) {
          return s.radius - distance(x, s.center);
        } else if constexpr (std::is_same_v<S, PuncturedBox>) {
          return std::min(box_distance(s.lo, s.hi, x), hole_distance(s, x));
        } else {
          if (!s.contains(x)) return -1.0;
          return s.margin ? s.margin(x) : kInf;
        }
      },
      shape_);
}

bool DomainSpec::contains(std::span<const double> x) const {
  if (!all_finite(x)) return false;
  return boundary_distance(x) >= margin_;
}

BoundaryPiece DomainSpec::nearest_piece(std::span<const double> x) const {
  return std::visit(
      [&](const auto& s) -> BoundaryPiece {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Box>) {
          return std::isfinite(box_distance(s.lo, s.hi, x)) ? BoundaryPiece::OuterBox
                                                             : BoundaryPiece::None;
        } else if constexpr (std::is_same_v<S, PuncturedBox>) {
          const double outer = box_distance(s.lo, s.hi, x);
          const double hole = hole_distance(s, x);
          if (!std::isfinite(outer) && !std::isfinite(hole)) return BoundaryPiece::None;
          return hole <= outer ? BoundaryPiece::Natural : BoundaryPiece::OuterBox;
        } else {
          return BoundaryPiece::Natural;
        }
      },
      shape_);
}

bool DomainSpec::segment_inside(std::span<const double> a, std::span<const double> b) const {
  if (!contains(a) || !contains(b)) return false;
  if (const auto* p = std::get_if<PuncturedBox>(&shape_)) {
    const Vec ab = sub(b, a);
    const double len2 = dot(ab, ab);
    for (const Vec& e : p->excluded) {
      const Vec ae = sub(e, a);
      const double u = len2 > 0.0 ? std::clamp(dot(ae, ab) / len2, 0.0, 1.0) : 0.0;
      if (distance(axpy(a, u, ab), e) - p->exclusion_radius < margin_) return false;
    }
  } else if (std::holds_alternative<Predicate>(shape_)) {
    const Vec ab = sub(b, a);
    for (int k = 1; k < 8; ++k)
      if (!contains(axpy(a, k / 8.0, ab))) return false;
  }
  return true;
}

double DomainSpec::diameter() const {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Box> || std::is_same_v<S, PuncturedBox>) {
          return box_diameter(s.lo, s.hi);
        } else if constexpr (std::is_same_v<S, Ball>) {
          return 2.0 * s.radius;
        } else {
          return kInf;
        }
      },
      shape_);
}

bool DomainSpec::box_bounded_in(std::span<const double> lo, std::span<const double> hi) const {
  const std::size_t n = lo.size();
  Vec ilo(n), ihi(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lo[i] <= hi[i])) throw Error(ErrorKind::InvalidArgument, "box with lo > hi");
    ilo[i] = lo[i] - margin_;
    ihi[i] = hi[i] + margin_;
  }
  // Nearest point of the inflated box to p.
  const auto clamp_to = [&](std::span<const double> p) {
    Vec c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = std::clamp(p[i], ilo[i], ihi[i]);
    return c;
  };
  return std::visit(
      [&](const auto& s) -> bool {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Box> || std::is_same_v<S, PuncturedBox>) {
          for (std::size_t i = 0; i < n; ++i)
            if (ilo[i] < s.lo[i] || ihi[i] > s.hi[i]) return false;
          if constexpr (std::is_same_v<S, PuncturedBox>) {
            for (const Vec& e : s.excluded)
              if (distance(clamp_to(e), e) <= s.exclusion_radius) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<S, Ball>) {
          // Farthest corner of the inflated box from the centre.
          double sq = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            const double d = std::max(std::abs(ilo[i] - s.center[i]), std::abs(ihi[i] - s.center[i]));
            sq += d * d;
          }
          return std::sqrt(sq) < s.radius;
        } else {
          // Sampled: every point of a 9^n lattice (n <= 3) or the corners.
          const std::size_t per_axis = n <= 3 ? 9 : 2;
          std::size_t total = 1;
          for (std::size_t i = 0; i < n; ++i) total *= per_axis;
          Vec p(n);
          for (std::size_t k = 0; k < total; ++k) {
            std::size_t rem = k;
            for (std::size_t i = 0; i < n; ++i) {
              const double u = static_cast<double>(rem % per_axis) / static_cast<double>(per_axis - 1);
              rem /= per_axis;
              p[i] = ilo[i] + u * (ihi[i] - ilo[i]);
            }
            if (!s.contains(p)) return false;
          }
          return true;
        }
      },
      shape_);
}

std::span<const Vec> DomainSpec::excluded_points() const {
  if (const auto* p = std::get_if<PuncturedBox>(&shape_)) return p->excluded;
  return {};
}

double DomainSpec::exclusion_radius() const {
  if (const auto* p = std::get_if<PuncturedBox>(&shape_)) return p->exclusion_radius;
  return 0.0;
}

}  // namespace waz
