#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

/// Core scalar/array aliases and the small numerics toolbox (quadrature,
/// interpolation tables) shared by every component.
namespace visclim {

using Real = double;
using Array = Eigen::ArrayXd;

/// Spatial point; the second coordinate is ignored on 1D grids.
using Point = Eigen::Vector2d;

using Fn1 = std::function<Real(Real)>;
/// Source callable g(t, x, u).
using SourceFn = std::function<Real(Real, const Point&, Real)>;

inline constexpr Real kInf = std::numeric_limits<Real>::infinity();

struct InvalidModel : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Expression-friendly reductions over Eigen arrays.

template <typename Derived>
Real sum_abs(const Eigen::ArrayBase<Derived>& v) {
  return v.abs().sum();
}

template <typename Derived>
Real sum_sq(const Eigen::ArrayBase<Derived>& v) {
  return v.square().sum();
}

template <typename Derived>
Real max_abs(const Eigen::ArrayBase<Derived>& v) {
  return v.size() == 0 ? 0.0 : v.abs().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::ArrayBase<Derived>& v) {
  return v.isFinite().all();
}

// ---------------------------------------------------------------------------
// Quadrature.

struct QuadRule {
  Array nodes;    // on [-1,1]
  Array weights;  // sum to 2
};

/// Gauss-Legendre rule with n points, computed by Newton iteration on the
/// Legendre recurrence. Deterministic; nodes come out symmetric.
QuadRule gauss_legendre(int n);

/// Integrate fn over [a,b] with a fixed Gauss rule.
Real gauss_integrate(const Fn1& fn, Real a, Real b, const QuadRule& rule);

/// Adaptive Simpson quadrature.
Real adaptive_simpson(const Fn1& fn, Real a, Real b, Real tol, int max_depth = 32);

// ---------------------------------------------------------------------------
// Interpolation tables on a uniform abscissa grid.

/// Piecewise-linear table. Linear interpolation preserves monotonicity of the
/// node values, which the solver relies on for its flux/diffusion tables.
class LinearTable {
 public:
  LinearTable() = default;
  LinearTable(Real lo, Real hi, Array values);

  Real operator()(Real x) const;
  /// Largest |slope| over all intervals.
  Real max_slope() const;
  /// Slope of the interval containing x.
  Real slope_at(Real x) const;

  Real lo() const { return lo_; }
  Real hi() const { return hi_; }
  const Array& values() const { return values_; }
  bool empty() const { return values_.size() == 0; }

 private:
  Real lo_ = 0, hi_ = 1, inv_h_ = 0;
  Array values_;
};

/// Cubic Hermite table with prescribed node derivatives; used where linear
/// interpolation would dominate the error budget (entropy flux tables).
class HermiteTable {
 public:
  HermiteTable() = default;
  HermiteTable(Real lo, Real hi, Array values, Array derivs);

  Real operator()(Real x) const;
  Real derivative(Real x) const;

  Real lo() const { return lo_; }
  Real hi() const { return hi_; }

 private:
  Real lo_ = 0, hi_ = 1, h_ = 1, inv_h_ = 0;
  Array values_, derivs_;
};

// ---------------------------------------------------------------------------

/// Evaluate a central difference quotient of fn at x, clamped to [lo,hi].
Real central_difference(const Fn1& fn, Real x, Real h, Real lo, Real hi);

/// strictly decreasing positive ladder check
bool is_strictly_decreasing(const std::vector<Real>& v);

}  // namespace visclim
