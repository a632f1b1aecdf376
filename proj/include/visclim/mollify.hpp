#pragma once

#include "visclim/model.hpp"

/// Smooth approximation families (f_mu, A_mu, g_mu, u0_mu) built by kernel
/// smoothing, and verification of the approximation conditions they must
/// satisfy uniformly in the smoothing width.
namespace visclim {

/// The standard compactly supported bump exp(-1/(1-s^2)) on (-1,1), realized
/// as a fixed symmetric quadrature rule normalized to unit mass. Symmetry
/// makes affine functions exact fixed points of the convolution.
class MollifierKernel {
 public:
  explicit MollifierKernel(Real width);

  Real width() const { return width_; }
  /// Convolve fn (defined on all of R) against the kernel at point x.
  Real convolve(const Fn1& fn, Real x) const;
  /// Smoothed Heaviside step with transition band [-width, width].
  Real smooth_step(Real x) const;
  /// Nodes/weights on [-1,1]; weights sum to exactly 1.
  const Array& nodes() const { return nodes_; }
  const Array& weights() const { return weights_; }
  /// Kernel density value (unit-mass normalized, width-scaled).
  Real density(Real s) const;

 private:
  Real width_;
  Array nodes_, weights_;
  LinearTable step_;  // cumulative kernel mass
};

struct MollifiedFamily {
  Real mu = 0.0;
  FluxSpec f_mu;
  DiffusionSpec A_mu;
  SourceSpec g_mu;
  InitialDatum u0_mu;
  Real kappa0 = 0.0;       // max over the ladder of mu * ||u0_mu''||_L1
  Real a_mu_lipschitz = 0; // sampled sup of a_mu (for time-step control)
};

inline const std::vector<Real> kDefaultMuLadder = {0.04, 0.02, 0.01};

/// Build the smooth family at width mu:
///  - f_mu, A_mu: convolution of the first-order-Taylor-extended f, A with the
///    bump kernel; f_mu shifted so f_mu(0) = 0 exactly. Lipschitz constants
///    are not increased.
///  - g_mu: ramp indicators replaced by a smooth step of transition width mu;
///    the sign conditions at u = 0, 1 are preserved.
///  - u0_mu: discrete kernel smoothing of the datum on the working grid,
///    clamped to [0,1]; mass, L2 norm and variation do not increase.
///  - kappa0: frozen as the max of mu_k * ||u0_(mu_k)''||_L1 over the ladder.
/// Requires 0 < mu <= 0.25 and a model whose required hypotheses passed.
MollifiedFamily mollify_model(const ModelSpec& model, Real mu, const GridSpec& grid,
                              const std::vector<Real>& ladder = kDefaultMuLadder);

struct FamilyConditionRow {
  Real mu = 0;
  Real sup_f_err = 0, sup_A_err = 0;
  Real g_l1_err = 0;                  // sup_u of the space-time L1 distance
  Real u0_l1_err = 0, u0_l2_err = 0;  // datum convergence
  Real lip_margin = 0;                // L_f - max sampled |f_mu'|
  Real range_margin = 0;              // min(u0_mu, 1 - u0_mu)
  Real mass_margin = 0;               // ||u0||_1 - ||u0_mu||_1
  Real l2_margin = 0;                 // ||u0||_2 - ||u0_mu||_2
  Real tv_margin = 0;                 // |Du0| - ||u0_mu'||_1
  Real curv_margin = 0;               // |D(A(u0)')| - ||A_mu(u0_mu)''||_1
  Real kappa0_margin = 0;             // kappa0 - mu ||u0_mu''||_1
  Real sign_margin = 0;               // min over grid of (g_mu(.,.,0), -g_mu(.,.,1))
  bool pass = false;
};

struct FamilyConvergenceReport {
  std::vector<FamilyConditionRow> rows;  // ladder order (decreasing mu)
  bool f_errors_monotone = false;
  bool A_errors_monotone = false;
  bool g_errors_monotone = false;
  std::vector<Real> f_error_ratios;  // successive sup-error ratios
  bool all_conditions_pass() const;
};

/// Check the whole family over a decreasing mu ladder (>= 3 entries).
FamilyConvergenceReport verify_family(const ModelSpec& model, const std::vector<Real>& ladder,
                                      const GridSpec& grid);

}  // namespace visclim
