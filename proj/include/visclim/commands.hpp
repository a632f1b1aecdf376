#pragma once

#include "visclim/config.hpp"
#include "visclim/mollify.hpp"
#include "visclim/solver.hpp"

#include <optional>

/// CLI entry points: each builds what it needs from a parsed config, writes
/// its artifacts atomically under the output directory, and reports pass/fail
/// through the exit code.
namespace visclim {

struct CommandResult {
  int exit_code = 0;     // 0: all enabled checks pass
  std::string summary;   // human-readable text, also printed by the CLI
};

/// Model + optional smoothing family as configured.
struct PreparedRun {
  ModelSpec model;
  std::optional<MollifiedFamily> family;
  SolveOptions opts;
  const MollifiedFamily* family_ptr() const { return family ? &*family : nullptr; }
};

PreparedRun prepare_run(const RunConfig& cfg);

CommandResult command_validate(const RunConfig& cfg);
CommandResult command_run(const RunConfig& cfg);
CommandResult command_reference(const RunConfig& cfg);
CommandResult command_verify(const RunConfig& cfg, int jobs = 1);
CommandResult command_sweep(const RunConfig& cfg, int jobs = 1);
CommandResult command_report(const RunConfig& cfg);

/// Trajectory CSV ("t,x[,y],u", 17 significant digits).
std::string trajectory_csv(const Trajectory& traj, const std::string& config_hash);

}  // namespace visclim
