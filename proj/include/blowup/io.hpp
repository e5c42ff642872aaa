#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "blowup/bound_engine.hpp"
#include "blowup/experiments.hpp"
#include "blowup/exponents.hpp"
#include "blowup/solver.hpp"

namespace blowup {

/// File-system failure while writing artifacts.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shortest round-trip decimal form ("%.17g").
std::string format_number(double x);

nlohmann::ordered_json to_json(const ModelParams& params);
nlohmann::ordered_json to_json(const GridSpec& grid);
nlohmann::ordered_json to_json(const RegionVerdict& verdict);
nlohmann::ordered_json bound_json(const BoundConfig& cfg, const LifespanBound& bound);
nlohmann::ordered_json run_summary_json(const SolverRun& run);
nlohmann::ordered_json to_json(const TransformReport& rep);
nlohmann::ordered_json sweep_summary_json(const SweepResult& result);
nlohmann::ordered_json to_json(const UpperBoundReport& rep);
nlohmann::ordered_json to_json(const ConvergenceReport& rep);

/// Columns kbar,p,verdict,alpha_or_blank; one row per node, p outer, kbar inner.
void write_atlas_csv(std::ostream& os, const Atlas& atlas);
/// Columns curve,kbar,p for the Fujita curve samples, the Strauss line and the crossing point.
void write_atlas_curves_csv(std::ostream& os, const Atlas& atlas);
/// Region diagram: blow-up shaded red below, literature existence blue above, boundary curves drawn.
void write_atlas_svg(std::ostream& os, const Atlas& atlas);

/// Rows t,r,u for every stored snapshot.
void write_snapshots_csv(std::ostream& os, const SolverRun& run);
/// Rows eps,T_num,refinement_agreement.
void write_sweep_csv(std::ostream& os, const SweepResult& result);
/// Rows eps,T_num,T_upper,status.
void write_bound_check_csv(std::ostream& os, const UpperBoundReport& rep);

/// Writes `content` to dir/name, creating dir. Throws IoError.
void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content);

}  // namespace blowup
