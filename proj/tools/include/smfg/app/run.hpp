#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "smfg/app/config.hpp"
#include "smfg/diagnostics.hpp"
#include "smfg/exact.hpp"
#include "smfg/flows.hpp"

namespace smfg::app {

PeriodicGrid grid_for(const RunSpec& spec, int n);

/// Samples the configured potential and drift on the grid.
ProblemData build_problem(const RunSpec& spec, const PeriodicGrid& grid);

/// The closed-form solution matching the config, or nothing when
/// compare_exact is off.
std::optional<ExactSolution> build_exact(const RunSpec& spec,
                                         const PeriodicGrid& grid);

/// Runs the configured flow from the sampled initial data.
FlowResult solve(const RunSpec& spec, const ProblemData& data,
                 const FlowConfig& cfg);

struct RunOutcome {
  FlowResult result;
  std::optional<ErrorReport> errors;
  double wall_seconds = 0.0;
  std::vector<std::filesystem::path> files;
};

/// Solves the configured problem and writes trajectory.csv, final_state.csv, report.json
/// and snapshots.dat into `output`. Progress lines go to `log` when given.
RunOutcome run(const RunSpec& spec, const std::filesystem::path& output,
               std::ostream* log = nullptr);

/// Refinement study of the configured family over `sizes`; writes study.csv and
/// study.json into `output`. Throws ConfigError without compare_exact.
StudyResult run_study(const RunSpec& spec, const std::vector<int>& sizes,
                      const std::filesystem::path& output,
                      std::ostream* log = nullptr);

/// Writes `text` to `path`, throwing IoError on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

/// Creates the directory (and parents), throwing IoError on failure.
void ensure_directory(const std::filesystem::path& dir);

/// Shortest decimal form with 17 significant digits.
std::string fmt17(double v);

}  // namespace smfg::app
