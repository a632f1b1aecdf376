#include "visclim/types.hpp"

#include <algorithm>

namespace visclim {

QuadRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  QuadRule rule;
  rule.nodes = Array::Zero(n);
  rule.weights = Array::Zero(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    Real x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    Real pp = 0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const Real p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const Real dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const Real w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;  // exact symmetry
  return rule;
}

Real gauss_integrate(const Fn1& fn, Real a, Real b, const QuadRule& rule) {
  const Real mid = 0.5 * (a + b), half = 0.5 * (b - a);
  Real acc = 0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * fn(mid + half * rule.nodes[i]);
  return acc * half;
}

namespace {

Real simpson(Real a, Real fa, Real b, Real fb, Real fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

Real adaptive_simpson_rec(const Fn1& f, Real a, Real fa, Real b, Real fb, Real m, Real fm,
                          Real whole, Real tol, int depth) {
  const Real lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const Real flm = f(lm), frm = f(rm);
  const Real left = simpson(a, fa, m, fm, flm);
  const Real right = simpson(m, fm, b, fb, frm);
  const Real delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

Real adaptive_simpson(const Fn1& fn, Real a, Real b, Real tol, int max_depth) {
  if (a == b) return 0.0;
  const Real m = 0.5 * (a + b);
  const Real fa = fn(a), fb = fn(b), fm = fn(m);
  const Real whole = simpson(a, fa, b, fb, fm);
  return adaptive_simpson_rec(fn, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

LinearTable::LinearTable(Real lo, Real hi, Array values)
    : lo_(lo), hi_(hi), values_(std::move(values)) {
  if (values_.size() < 2 || !(hi > lo)) throw std::invalid_argument("LinearTable: bad nodes");
  inv_h_ = (values_.size() - 1) / (hi_ - lo_);
}

Real LinearTable::operator()(Real x) const {
  const Eigen::Index n = values_.size() - 1;
  Real s = (x - lo_) * inv_h_;
  if (s <= 0) return values_[0];
  if (s >= static_cast<Real>(n)) return values_[n];
  const auto i = static_cast<Eigen::Index>(s);
  const Real t = s - static_cast<Real>(i);
  return values_[i] + t * (values_[i + 1] - values_[i]);
}

Real LinearTable::max_slope() const {
  const Eigen::Index n = values_.size() - 1;
  Real m = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    m = std::max(m, std::abs(values_[i + 1] - values_[i]) * inv_h_);
  return m;
}

Real LinearTable::slope_at(Real x) const {
  const Eigen::Index n = values_.size() - 1;
  Real s = (x - lo_) * inv_h_;
  auto i = static_cast<Eigen::Index>(std::clamp<Real>(s, 0, static_cast<Real>(n - 1)));
  i = std::min(i, n - 1);
  return (values_[i + 1] - values_[i]) * inv_h_;
}

HermiteTable::HermiteTable(Real lo, Real hi, Array values, Array derivs)
    : lo_(lo), hi_(hi), values_(std::move(values)), derivs_(std::move(derivs)) {
  if (values_.size() < 2 || values_.size() != derivs_.size() || !(hi > lo))
    throw std::invalid_argument("HermiteTable: bad nodes");
  h_ = (hi_ - lo_) / (values_.size() - 1);
  inv_h_ = 1.0 / h_;
}

Real HermiteTable::operator()(Real x) const {
  const Eigen::Index n = values_.size() - 1;
  Real s = (x - lo_) * inv_h_;
  if (s <= 0) return values_[0] + (x - lo_) * derivs_[0];
  if (s >= static_cast<Real>(n)) return values_[n] + (x - hi_) * derivs_[n];
  const auto i = static_cast<Eigen::Index>(s);
  const Real t = s - static_cast<Real>(i);
  const Real t2 = t * t, t3 = t2 * t;
  const Real h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const Real h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * values_[i] + h10 * h_ * derivs_[i] + h01 * values_[i + 1] + h11 * h_ * derivs_[i + 1];
}

Real HermiteTable::derivative(Real x) const {
  const Eigen::Index n = values_.size() - 1;
  Real s = (x - lo_) * inv_h_;
  if (s <= 0) return derivs_[0];
  if (s >= static_cast<Real>(n)) return derivs_[n];
  const auto i = static_cast<Eigen::Index>(s);
  const Real t = s - static_cast<Real>(i);
  const Real dh00 = (6 * t * t - 6 * t) * inv_h_, dh10 = 3 * t * t - 4 * t + 1;
  const Real dh01 = (-6 * t * t + 6 * t) * inv_h_, dh11 = 3 * t * t - 2 * t;
  return dh00 * values_[i] + dh10 * derivs_[i] + dh01 * values_[i + 1] + dh11 * derivs_[i + 1];
}

Real central_difference(const Fn1& fn, Real x, Real h, Real lo, Real hi) {
  const Real a = std::max(lo, x - h), b = std::min(hi, x + h);
  if (b <= a) throw std::invalid_argument("central_difference: empty stencil");
  return (fn(b) - fn(a)) / (b - a);
}

bool is_strictly_decreasing(const std::vector<Real>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace visclim
