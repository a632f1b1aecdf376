#pragma once

#include "visclim/grid.hpp"
#include "visclim/types.hpp"

#include <map>
#include <optional>

/// Problem data for the balance law du/dt + div f(u) = eps*Lap A(u) + g(t,x,u)
/// on states u in [0,1]: flux, diffusion, source and initial datum, together
/// with validation of the standing structural hypotheses.
namespace visclim {

/// Flux f : [0,1] -> R^N with f(0) = 0 componentwise.
struct FluxSpec {
  int dimension = 1;
  Real lipschitz = 0.0;  // declared bound on |f'|
  std::vector<Fn1> component;
  std::vector<Fn1> derivative;  // same size as component, or empty (finite differences)

  Real eval(int axis, Real u) const { return component[axis](u); }
  /// f_i'(u); analytic when supplied, central difference otherwise.
  Real deriv(int axis, Real u) const;
  bool is_zero() const { return component.empty(); }
};

/// Construction validates f(0)=0 to 1e-12 and rejects otherwise.
FluxSpec make_flux(int dimension, Real lipschitz, std::vector<Fn1> component,
                   std::vector<Fn1> derivative = {});

/// Diffusion primitive A and diffusivity a = A'.
struct DiffusionSpec {
  Fn1 A;
  Fn1 a;
  Real lipschitz = 0.0;  // declared bound on a = A'
  bool is_zero = false;  // A identically 0 (pure balance law)
};

enum class SourceStructure { zero, indicator_ramp, general };

/// Ramp profile chi_I(x) * h(t,u) on a 1D interval I.
struct RampSource {
  Real lo = 0.0, hi = 0.0;
  std::function<Real(Real, Real)> h;  // h(t,u)
  Real sup_h = 0.0;                   // sup |h| over [0,T]x[0,1], declared
};

struct SourceSpec {
  SourceStructure structure = SourceStructure::zero;
  Real kappa = 0.0;  // joint constant bounding |g_u|, int|g|dx, |Dg(t,.,u)|, int|g_t|dx
  SourceFn eval;     // empty for structure == zero
  std::optional<RampSource> ramp;
  /// For indicator_ramp only: spatial factor so eval = chi_profile(x) * h(t,u);
  /// sharp for raw models, smoothed for mollified ones.
  Fn1 chi_profile;

  Real operator()(Real t, const Point& x, Real u) const {
    return structure == SourceStructure::zero ? 0.0 : eval(t, x, u);
  }
  bool is_zero() const { return structure == SourceStructure::zero; }
};

/// Initial datum with norms cached on the grid it was sampled on.
struct InitialDatum {
  std::function<Real(const Point&)> sample;
  Real support_radius = 0.0;  // 0 means "fills the whole box" (constant states)
  GridSpec norm_grid;
  Real l1_norm = 0.0, l2_norm = 0.0;
  std::vector<Real> tv;  // per axis

  /// Sample onto a grid and (re)compute the cached norms.
  void bind_grid(const GridSpec& grid);
  GridFunction realize(const GridSpec& grid) const;
};

struct HypothesisRecord {
  std::string id;        // flux_lipschitz, diffusion_monotone, source_bounds, datum_range,
                         // genuine_nonlinearity
  bool pass = false;
  bool verified = true;  // false: declared but not numerically checkable
  std::string detail;    // margins or the offending witness
};

struct HypothesisReport {
  std::vector<HypothesisRecord> records;
  bool all_required_pass() const;            // everything except genuine_nonlinearity
  bool genuinely_nonlinear() const;
  const HypothesisRecord* find(const std::string& id) const;
};

struct ModelSpec {
  std::string name;
  FluxSpec flux;
  DiffusionSpec diffusion;
  SourceSpec source;
  InitialDatum initial;
  Real horizon = 1.0;  // T used when validating time-dependent source bounds
  HypothesisReport hypothesis_report;
};

/// Check the structural hypotheses on a sample of the state/space/time box:
///   flux_lipschitz        f Lipschitz on [0,1], f(0) = 0
///   diffusion_monotone    a >= 0, A nondecreasing, A consistent with int a
///   source_bounds         g(.,.,1) <= 0 <= g(.,.,0), |g_u| <= kappa,
///                         int|g| dx <= kappa, x-variation and t-derivative bounds
///   datum_range           0 <= u0 <= 1, cached norms match the grid
///   genuine_nonlinearity  u -> f(u).xi not affine on any dyadic subinterval
///                         (depth 4) for a fixed direction sample
/// Throws InvalidModel if a callable returns a non-finite value on [0,1].
HypothesisReport validate_hypotheses(const ModelSpec& model, int samples = 257);

/// Scenario parameter map; unknown keys are rejected by builtin_model.
using Params = std::map<std::string, Real>;

/// Built-in scenario library. Names:
///   greenshields_lwr, burgers, heat, porous_medium, lwr_entry, lwr_exit,
///   custom_table.
/// Parameters (all optional, with documented defaults): u0_* datum controls,
/// source_rate, ramp_lo, ramp_hi, flux_ratio (2D second component scale).
/// custom_table reads its flux from a two-column CSV (u, f(u)) via
/// set_custom_table_path, or falls back to a built-in sample table.
ModelSpec builtin_model(const std::string& name, const Params& params, const GridSpec& grid);

extern const std::vector<std::string> kBuiltinScenarios;

/// Path used by the custom_table scenario; empty selects the embedded table.
void set_custom_table_path(const std::string& path);

/// Piecewise-linear flux through monotone-in-u breakpoints; u must start at 0
/// with f(0)=0 and cover [0,1].
FluxSpec tabulated_flux(const std::vector<Real>& u, const std::vector<Real>& f);

}  // namespace visclim
