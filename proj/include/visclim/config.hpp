#pragma once

#include "visclim/grid.hpp"
#include "visclim/model.hpp"

#include <filesystem>

/// Sectioned key-value run configuration with typed keys, exhaustive
/// validation and lossless round-tripping. Unknown keys are fatal.
namespace visclim {

struct RunConfig {
  // [scenario]
  std::string scenario = "greenshields_lwr";
  Params scenario_params;  // u0_*, source_rate, ramp_*, flux_ratio
  std::string table_csv;   // custom_table source; empty selects the embedded table

  // [grid]
  GridSpec grid{1, 1.5, 800, Boundary::outflow};

  // [time]
  Real horizon = 1.0;
  int snapshots = 10;  // output times, uniformly spaced, the last lands on the horizon
  Real cfl = 0.33;

  // [viscosity]
  Real eps = 0.01;
  enum class MuMode { auto_rule, fixed, none };
  MuMode mu_mode = MuMode::auto_rule;
  Real mu_value = 0.0;

  // [mollification]
  std::vector<Real> mu_ladder = {0.04, 0.02, 0.01};

  // [sweep]
  std::vector<Real> eps_ladder = {0.04, 0.02, 0.01, 0.005};
  Real window_lo = -0.5, window_hi = 0.5;
  std::vector<Real> p_list = {1.0, 2.0};
  int refine = 4;

  // [entropy]
  std::vector<Real> k_list = {0.1, 0.3, 0.5, 0.7, 0.9};
  Real delta = 0.01;
  Real c_tol = 2.0;  // residual tolerance coefficient, frozen by calibration

  // [slack]
  Real c_s = 0.1;            // additive slack coefficient, slack = c_s dx (1+T)
  Real l1_slack_rate = 0.01; // L1 growth slack per unit time, x dx
  Real grad_growth = 3.0;    // allowed grad A(u) growth per ladder rung

  // [output]
  std::string out_dir = "out";

  /// Canonical text form; parse(serialize()) reproduces the config exactly.
  std::string serialize() const;
  std::string hash() const;
  std::vector<Real> output_times() const;
};

/// Parse and validate; errors carry file:line and the offending key/value.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

}  // namespace visclim
