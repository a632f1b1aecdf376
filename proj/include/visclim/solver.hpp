#pragma once

#include "visclim/grid.hpp"
#include "visclim/mollify.hpp"
#include "visclim/model.hpp"

/// Explicit monotone finite-volume integrators: Engquist-Osher for the
/// regularized parabolic problem, Godunov for the inviscid reference.
namespace visclim {

struct SolveOptions {
  Real cfl = 0.33;  // stays monotone with advection, diffusion and source active
  bool abort_on_instability = true;
  /// Floor in the kappa guard of stable_dt.
  Real kappa_floor = 1e-12;
};

struct StepperLog {
  long steps = 0;
  Real min_value = kInf, max_value = -kInf;  // over every step, initial state included
  Real last_dt = 0.0;
  std::vector<Real> dts;
  /// Exact summation-by-parts accumulator of the dissipation integral
  /// int int (a_mu(u)+mu) |grad_h u|^2 dx dt; together with the 2*eps factor
  /// this closes the discrete L2 energy balance to rounding.
  long double dissipation_raw = 0.0L;
  /// Per-cell time-integrated (a_mu(u)+mu)|grad_h u|^2, interface-attributed
  /// with the state at the start of the step; nonnegative by construction.
  Array dissipation_cells;
  bool boundary_warning = false;
};

struct Trajectory {
  GridSpec grid;
  Real eps = 0.0;
  Real mu = 0.0;
  std::vector<GridFunction> snapshots;  // strictly increasing times, front is t=0
  /// Running value of log.dissipation_raw when each snapshot was taken.
  std::vector<Real> dissipation_at_snapshot;
  StepperLog log;

  const GridFunction& at_time(Real t, Real tol = 1e-9) const;
  /// 2*eps * dissipation_raw scaled by the cell volume: the dissipation term
  /// of the discrete L2 energy balance.
  Real energy_dissipation() const;
};

/// Largest stable explicit step:
///   cfl * min( dx/(2N L_f), dx^2/(2N eps (a_max + mu)), 1/max(kappa, floor) )
/// with a_max the sampled sup of the effective diffusivity. Terms with a zero
/// denominator drop out.
Real stable_dt(const ModelSpec& model, const MollifiedFamily* family, Real eps,
               const GridSpec& grid, Real cfl, Real kappa_floor = 1e-12);

enum class FluxScheme { engquist_osher, godunov };

/// Precomputed update context: flux splitting tables, diffusion table,
/// source profile. Build once, step many times.
class Stepper {
 public:
  Stepper(const ModelSpec& model, const MollifiedFamily* family, Real eps, const GridSpec& grid,
          FluxScheme scheme, SolveOptions opts = {});

  /// One explicit update u -> u + dt * (advection + diffusion + source).
  GridFunction step(const GridFunction& state, Real dt, StepperLog* log = nullptr) const;

  Real stable_dt() const { return stable_dt_; }
  Real eps() const { return eps_; }
  Real mu() const { return mu_; }
  /// Effective diffusion primitive B(u) = A_mu(u) + mu u evaluated through the
  /// solver's own table (the value the update actually uses).
  Real diffusion_primitive(Real u) const;

 private:
  void apply_flux(const Array& u, Real lambda, Array& out) const;
  void apply_diffusion(const Array& u, Real eta, Array& lap) const;

  GridSpec grid_;
  Real eps_ = 0, mu_ = 0, stable_dt_ = 0;
  FluxScheme scheme_;
  SolveOptions opts_;
  // per-axis Engquist-Osher splitting tables and Godunov data
  struct AxisFlux {
    LinearTable fplus, fminus, f;
    std::vector<Real> crit_u, crit_f;  // interior extrema for Godunov
    Real godunov(Real ul, Real ur) const;
  };
  std::vector<AxisFlux> flux_;
  LinearTable bprimitive_;  // B(u) = A_mu(u) + mu u
  bool has_diffusion_ = false;
  // source
  SourceStructure source_structure_ = SourceStructure::zero;
  std::function<Real(Real, Real)> source_h_;
  Array chi_cells_;
  SourceFn source_eval_;
  bool split_source_ = false;  // reference path: apply source after the flux step
};

/// Single spec-level step (builds a context; prefer Stepper in loops).
GridFunction step(const GridFunction& state, const ModelSpec& model,
                  const MollifiedFamily* family, Real eps, Real dt);

/// March the regularized problem to T, landing exactly on each output time.
/// output_times must be increasing and end at T; a t=0 snapshot is prepended.
Trajectory solve(const ModelSpec& model, const MollifiedFamily* family, Real eps,
                 const GridSpec& grid, Real T, const std::vector<Real>& output_times,
                 SolveOptions opts = {});

/// Godunov scheme with first-order source splitting for the eps = 0 balance
/// law; the entropy-solution reference of the convergence experiments.
Trajectory solve_reference(const ModelSpec& model, const GridSpec& grid_fine, Real T,
                           const std::vector<Real>& output_times, SolveOptions opts = {});

}  // namespace visclim
