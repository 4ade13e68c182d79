#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "waz/map.hpp"

namespace waz::fixtures {

struct FixtureInfo {
  std::string name;
  std::size_t dim;
  std::string description;
};

struct FixtureOptions {
  std::optional<Vec> base_point;
  /// Matrix for the "linear" fixture (defaults to diag(2, 4)).
  std::optional<Matrix> matrix;
  /// Jacobian source override; the fixtures default to AutoDiff.
  std::optional<JacobianSource> jacobian;
};

const std::vector<FixtureInfo>& list();
bool exists(std::string_view name);

/// Builds a built-in fixture. Throws InvalidArgument for unknown names.
MapSpec make(std::string_view name, const FixtureOptions& opts = {});

/// Hand-derived Jacobian of a fixture, independent of the dual-number path.
MatFn analytic_jacobian(std::string_view name, const FixtureOptions& opts = {});

}  // namespace waz::fixtures
