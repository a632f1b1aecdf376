#pragma once

#include "visclim/solver.hpp"

/// Convex entropy pairs, weak-form / entropy-inequality residuals over solver
/// trajectories, and the discrete entropy-production measure.
namespace visclim {

/// (eta, q, calA): convex eta with compatible flux q' = eta' f' and diffusion
/// calA' = eta' A', both normalized to vanish at 0 and built by cumulative
/// quadrature onto Hermite tables.
struct EntropyPair {
  std::string name;
  Fn1 eta, eta_prime, eta_second;
  std::vector<HermiteTable> q;  // one per flux component; empty when f = 0
  HermiteTable calA;            // zero-size when A = 0
  bool has_calA = false;
  Real C2 = 0.0;          // sup of eta'' on [0,1]
  Real sup_eta_prime = 0; // sup of |eta'| on [0,1]

  Real q_eval(int axis, Real u) const { return q.empty() ? 0.0 : q[axis](u); }
  Real calA_eval(Real u) const { return has_calA ? calA(u) : 0.0; }
};

/// Smoothed Kruzhkov entropy eta(u) = sqrt((u-k)^2 + delta^2) - delta with
/// C2 = 1/delta; requires 0 < delta <= 0.1.
EntropyPair kruzhkov_pair(Real k, Real delta, const ModelSpec& model);

/// Quadratic entropy eta(u) = u^2/2.
EntropyPair quadratic_pair(const ModelSpec& model);

/// Affine entropy eta(u) = u (q = f, calA = A); the entropy residual of an
/// affine pair coincides with the weak residual.
EntropyPair affine_pair(const ModelSpec& model);

/// Smooth nonnegative space-time bump, compactly supported strictly before
/// the horizon; evaluable with first derivatives and Laplacian.
class TestFunction {
 public:
  TestFunction(std::string id, Real t_center, Real t_radius, Point x_center, Real x_radius,
               int dimension);

  Real value(Real t, const Point& x) const;
  Real dt(Real t, const Point& x) const;
  Point grad(Real t, const Point& x) const;
  Real laplacian(Real t, const Point& x) const;

  const std::string& id() const { return id_; }
  Real t_center() const { return t0_; }
  Real t_radius() const { return rt_; }
  Point x_center() const { return x0_; }
  Real x_radius() const { return rx_; }

 private:
  std::string id_;
  Real t0_, rt_, rx_;
  Point x0_;
  int dim_;
};

/// Deterministic battery: 3 centers x 2 radii x 2 time windows.
std::vector<TestFunction> bump_battery(const GridSpec& grid, Real T);

/// Space-time quadrature of the weak form
///   u dphi/dt + f(u).grad phi + eps A(u) lap phi + g phi   (+ initial term)
/// over the trajectory snapshots. Exact solutions give O(dx + dt) values.
Real weak_residual(const Trajectory& traj, const ModelSpec& model, const TestFunction& phi,
                   Real eps);

/// Same with (eta, q, calA, eta' g); entropy solutions give values >= -tol.
Real entropy_residual(const Trajectory& traj, const ModelSpec& model, const EntropyPair& pair,
                      const TestFunction& phi, Real eps);

struct EntropyProduction {
  Array density;        // per-cell time-integrated eps eta''(u)(a_mu(u)+mu)|grad_h u|^2, >= 0
  Real total_mass = 0;  // its space-time integral
  Real bound = 0;       // C2 (||u0||_2^2 + 2 kappa T)
  bool within_bound(Real slack = 0.0) const { return total_mass <= bound + slack; }
};

/// Discrete entropy-production measure of a solver trajectory. For entropies
/// with constant eta'' the total comes from the stepper's exact dissipation
/// accumulator (and then matches the L2 energy balance to rounding); otherwise
/// it is assembled from snapshots.
EntropyProduction production_measure(const Trajectory& traj, const MollifiedFamily* family,
                                     const EntropyPair& pair, Real eps);

struct DecompositionNorms {
  Real l1 = 0;  // ||eps grad calA(u)||_{L2(R_T)}
  Real l2 = 0;  // production measure total mass
  Real l3 = 0;  // ||eta'(u) g||_{L1(R_T)}
  Real l1_bound = 0;  // sqrt(eps ||eta'||^2 ||a|| (||u0||_2^2 + kappa T))
  Real l3_bound = 0;  // ||eta'|| kappa T
};

/// The three forcing components of the entropy balance and their a priori
/// bounds; the first vanishes with eps, the second is bounded by the
/// production bound, the third by the source budget.
DecompositionNorms decomposition_norms(const Trajectory& traj, const ModelSpec& model,
                                       const MollifiedFamily* family, const EntropyPair& pair,
                                       Real eps);

struct ResidualRecord {
  Real entropy_k = 0, delta = 0;
  std::string phi_id;
  Real residual = 0, tolerance = 0;
  bool pass = false;
};

/// Kruzhkov battery across k values and test functions; pass means
/// residual >= -c_tol * dx.
std::vector<ResidualRecord> entropy_battery(const Trajectory& traj, const ModelSpec& model,
                                            const std::vector<Real>& k_list, Real delta,
                                            const std::vector<TestFunction>& battery, Real eps,
                                            Real c_tol);

}  // namespace visclim
