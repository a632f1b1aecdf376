#pragma once

#include "visclim/diagnostics.hpp"
#include "visclim/entropy.hpp"
#include "visclim/solver.hpp"

/// The vanishing-viscosity experiment: solve the regularized problem along a
/// decreasing eps ladder, compare against a fine-grid Godunov reference, and
/// track the entropy-balance decomposition norms.
namespace visclim {

struct SweepPlan {
  std::vector<Real> eps_ladder;        // strictly decreasing, >= 3 entries
  std::function<Real(Real)> mu_rule;   // default eps/10
  enum class DataRule { mollified_at_eps, mollified_at_mu, raw };
  DataRule data_rule = DataRule::mollified_at_eps;
  Point window_lo = Point(-0.5, -0.5);  // compact window K
  Point window_hi = Point(0.5, 0.5);
  std::vector<Real> p_list = {1.0, 2.0};
  int refine = 4;  // reference grid refinement factor
  int jobs = 1;
  SolveOptions solve_opts;

  Real mu_of(Real eps) const { return mu_rule ? mu_rule(eps) : eps / 10.0; }
  void validate(const GridSpec& grid) const;
};

struct SweepEntry {
  Real eps = 0, mu = 0;
  bool aborted = false;
  std::string abort_reason;
  std::vector<Real> times;                // snapshot times (t = 0 excluded)
  std::vector<std::vector<Real>> errors;  // errors[p_index][time_index] on K
  DecompositionNorms decomposition;
  Real l2_bound = 0;            // production bound with the unmollified datum
  Real datum_l2_margin = 0;     // ||u0||_2 - ||u0_eps||_2
  Real datum_l1_distance = 0;   // ||u0_eps - u0||_1, convergence evidence
  Real runtime_s = 0;
};

struct ConvergenceTable {
  std::vector<SweepEntry> rows;  // ladder order
  std::vector<Real> p_list;
  std::vector<Real> times;
  bool h5_warning = false;  // nonlinearity hypothesis not certified

  /// Errors at the final time strictly decrease along the ladder.
  bool errors_monotone(int p_index) const;
  bool l1_decreasing() const;
  bool l2_within_bound(Real slack = 0.0) const;
  bool l3_within_bound(Real slack = 0.0) const;
  std::string verdict_text() const;
};

/// Solve per ladder entry against one fine-grid reference. Ladder entries may
/// run concurrently (plan.jobs); the table is assembled by ladder index.
ConvergenceTable run_sweep(const ModelSpec& model, const SweepPlan& plan, const GridSpec& grid,
                           Real T, const std::vector<Real>& output_times);

struct MuStudyRow {
  Real mu = 0;
  Real distance_to_next = 0;  // L1 gap to the next (smaller-mu) solution at T
};

struct MuStudyTable {
  Real eps = 0;
  std::vector<MuStudyRow> rows;  // last row's distance is 0 by convention
  bool cauchy() const;           // successive distances nonincreasing
};

/// Inner-limit study: fixed eps, decreasing mu ladder, gaps between
/// successive solutions as Cauchy evidence.
MuStudyTable run_mu_study(const ModelSpec& model, Real eps, const std::vector<Real>& mu_ladder,
                          const GridSpec& grid, Real T, SolveOptions opts = {});

}  // namespace visclim
