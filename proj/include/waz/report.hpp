#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "waz/certify.hpp"

namespace waz {

/// Aggregated certification verdicts for one map.
struct CertReport {
  std::string map_label;
  Vec x0;
  std::uint64_t seed = 0;
  std::optional<StarCriterionResult> criterion;
  std::optional<GrowthModel> growth;
  std::optional<CoercivityTrend> coercivity;
  std::optional<BoxSupResult> box_sup;
  std::vector<LyapunovCheck> lyapunov;
  /// Human-readable flags, e.g. "criterion violated on ball (sampled)".
  std::vector<std::string> flags;
};

/// Derives the narrative flags from the filled-in fragments.
void summarize(CertReport& report);

}  // namespace waz
