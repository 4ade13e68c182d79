#pragma once

// Text serialisation: CSV for sampled paths, JSON (nlohmann) for paths and
// reports. Doubles are printed with 17 significant digits so that equal
// inputs give byte-identical files.

#include <string>

#include "json.hpp"

#include "waz/certify.hpp"
#include "waz/flow.hpp"
#include "waz/report.hpp"

namespace waz {

std::string format_double(double v);

/// Columns: t, x1..xn, residual; a trailing "# outcome=..." comment line.
std::string to_csv(const Trajectory& traj);
/// Columns: s, x1..xn, residual; a trailing "# complete=..." comment line.
std::string to_csv(const LiftOutcome& lift);

nlohmann::json to_json(const Outcome& o);
nlohmann::json to_json(const Trajectory& traj);
nlohmann::json to_json(const LiftOutcome& lift);
nlohmann::json to_json(const StarCriterionResult& r);
nlohmann::json to_json(const GrowthModel& g);
nlohmann::json to_json(const CoercivityTrend& c);
nlohmann::json to_json(const BoxSupResult& b);
nlohmann::json to_json(const LyapunovCheck& l);
nlohmann::json to_json(const CertReport& report);
nlohmann::json summary_json(const BasinGrid& grid);

}  // namespace waz
