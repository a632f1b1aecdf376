#include "visclim/entropy.hpp"

#include <algorithm>
#include <sstream>

namespace visclim {

namespace {

constexpr int kPairTableNodes = 8193;

/// Cumulative integral of integrand over [0,1] onto a Hermite table with the
/// integrand itself as node derivative; 5-point Gauss per interval.
HermiteTable cumulative_table(const Fn1& integrand) {
  static const QuadRule rule = gauss_legendre(5);
  const int M = kPairTableNodes;
  Array vals = Array::Zero(M), ders = Array::Zero(M);
  const Real h = 1.0 / (M - 1);
  ders[0] = integrand(0.0);
  for (int i = 1; i < M; ++i) {
    const Real a = (i - 1) * h, b = i * h;
    vals[i] = vals[i - 1] + gauss_integrate(integrand, a, b, rule);
    ders[i] = integrand(b);
  }
  return HermiteTable(0.0, 1.0, std::move(vals), std::move(ders));
}

Real sampled_sup_unit(const Fn1& fn, int n = 1025) {
  Real m = 0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(fn(static_cast<Real>(i) / (n - 1))));
  return m;
}

EntropyPair build_pair(std::string name, Fn1 eta, Fn1 etap, Fn1 etapp, const ModelSpec& model) {
  EntropyPair pair;
  pair.name = std::move(name);
  pair.eta = std::move(eta);
  pair.eta_prime = std::move(etap);
  pair.eta_second = std::move(etapp);
  pair.C2 = sampled_sup_unit(pair.eta_second);
  pair.sup_eta_prime = sampled_sup_unit(pair.eta_prime);
  for (int ax = 0; ax < model.flux.dimension && !model.flux.is_zero(); ++ax) {
    auto integrand = [&pair, &model, ax](Real u) {
      return pair.eta_prime(u) * model.flux.deriv(ax, u);
    };
    pair.q.push_back(cumulative_table(integrand));
  }
  if (!model.diffusion.is_zero) {
    auto integrand = [&pair, &model](Real u) {
      return pair.eta_prime(u) * model.diffusion.a(u);
    };
    pair.calA = cumulative_table(integrand);
    pair.has_calA = true;
  }
  return pair;
}

}  // namespace

EntropyPair kruzhkov_pair(Real k, Real delta, const ModelSpec& model) {
  if (!(delta > 0.0)) throw std::invalid_argument("kruzhkov_pair: delta must be positive");
  if (delta > 0.1) throw std::invalid_argument("kruzhkov_pair: delta <= 0.1 required");
  std::ostringstream name;
  name << "kruzhkov_k" << k;
  auto eta = [k, delta](Real u) { return std::sqrt((u - k) * (u - k) + delta * delta) - delta; };
  auto etap = [k, delta](Real u) {
    return (u - k) / std::sqrt((u - k) * (u - k) + delta * delta);
  };
  auto etapp = [k, delta](Real u) {
    const Real r2 = (u - k) * (u - k) + delta * delta;
    return delta * delta / (r2 * std::sqrt(r2));
  };
  EntropyPair pair = build_pair(name.str(), eta, etap, etapp, model);
  if (k >= 0.0 && k <= 1.0) pair.C2 = 1.0 / delta;  // attained at u = k
  return pair;
}

EntropyPair quadratic_pair(const ModelSpec& model) {
  return build_pair(
      "quadratic", [](Real u) { return 0.5 * u * u; }, [](Real u) { return u; },
      [](Real) { return 1.0; }, model);
}

EntropyPair affine_pair(const ModelSpec& model) {
  return build_pair(
      "affine", [](Real u) { return u; }, [](Real) { return 1.0; }, [](Real) { return 0.0; },
      model);
}

// ---------------------------------------------------------------------------

namespace {

/// Peak-normalized bump factor and its log-derivative pieces.
struct BumpFactor {
  static Real value(Real s) {
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
  }
  static Real d1(Real s) {  // d/ds
    if (std::abs(s) >= 1.0) return 0.0;
    const Real w = 1.0 - s * s;
    return value(s) * (-2.0 * s / (w * w));
  }
  static Real d2(Real s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const Real w = 1.0 - s * s;
    const Real gp = -2.0 * s / (w * w);
    const Real gpp = -2.0 / (w * w) - 8.0 * s * s / (w * w * w);
    return value(s) * (gpp + gp * gp);
  }
};

}  // namespace

TestFunction::TestFunction(std::string id, Real t_center, Real t_radius, Point x_center,
                           Real x_radius, int dimension)
    : id_(std::move(id)), t0_(t_center), rt_(t_radius), rx_(x_radius), x0_(x_center),
      dim_(dimension) {
  if (!(t_radius > 0) || !(x_radius > 0))
    throw std::invalid_argument("TestFunction: radii must be positive");
}

Real TestFunction::value(Real t, const Point& x) const {
  Real v = BumpFactor::value((t - t0_) / rt_) * BumpFactor::value((x.x() - x0_.x()) / rx_);
  if (dim_ == 2) v *= BumpFactor::value((x.y() - x0_.y()) / rx_);
  return v;
}

Real TestFunction::dt(Real t, const Point& x) const {
  Real v = BumpFactor::d1((t - t0_) / rt_) / rt_ * BumpFactor::value((x.x() - x0_.x()) / rx_);
  if (dim_ == 2) v *= BumpFactor::value((x.y() - x0_.y()) / rx_);
  return v;
}

Point TestFunction::grad(Real t, const Point& x) const {
  const Real ft = BumpFactor::value((t - t0_) / rt_);
  const Real fx = BumpFactor::value((x.x() - x0_.x()) / rx_);
  const Real dfx = BumpFactor::d1((x.x() - x0_.x()) / rx_) / rx_;
  if (dim_ == 1) return Point(ft * dfx, 0.0);
  const Real fy = BumpFactor::value((x.y() - x0_.y()) / rx_);
  const Real dfy = BumpFactor::d1((x.y() - x0_.y()) / rx_) / rx_;
  return Point(ft * dfx * fy, ft * fx * dfy);
}

Real TestFunction::laplacian(Real t, const Point& x) const {
  const Real ft = BumpFactor::value((t - t0_) / rt_);
  const Real fx = BumpFactor::value((x.x() - x0_.x()) / rx_);
  const Real d2x = BumpFactor::d2((x.x() - x0_.x()) / rx_) / (rx_ * rx_);
  if (dim_ == 1) return ft * d2x;
  const Real fy = BumpFactor::value((x.y() - x0_.y()) / rx_);
  const Real d2y = BumpFactor::d2((x.y() - x0_.y()) / rx_) / (rx_ * rx_);
  return ft * (d2x * fy + fx * d2y);
}

std::vector<TestFunction> bump_battery(const GridSpec& grid, Real T) {
  const Real L = grid.half_width;
  std::vector<TestFunction> battery;
  int ci = 0;
  for (Real c : {-L / 3.0, 0.0, L / 3.0}) {
    int ri = 0;
    for (Real r : {L / 4.0, L / 2.0}) {
      int ti = 0;
      for (Real tc : {0.3 * T, 0.7 * T}) {
        std::ostringstream id;
        id << "c" << ci << "_r" << ri << "_t" << ti;
        battery.emplace_back(id.str(), tc, 0.3 * T, Point(c, c), r, grid.dimension);
        ++ti;
      }
      ++ri;
    }
    ++ci;
  }
  return battery;
}

// ---------------------------------------------------------------------------
// Residuals.

namespace {

struct ResidualTerms {
  // value(u) coefficients of the weak form; eta-composed for entropy pairs
  std::function<Real(Real)> density;             // eta(u)
  std::function<Real(int, Real)> flux;           // q_i(u)
  std::function<Real(Real)> diffusion;           // calA(u)
  std::function<Real(Real, const Point&, Real)> source;  // eta'(u) g(t,x,u)
};

void check_support(const Trajectory& traj, const TestFunction& phi) {
  const GridSpec& g = traj.grid;
  const Real T = traj.snapshots.back().time;
  if (phi.t_center() + phi.t_radius() > T + 1e-12)
    throw std::invalid_argument("residual: test function support exceeds the horizon");
  if (std::abs(phi.x_center().x()) + phi.x_radius() > g.half_width + 1e-12 ||
      (g.dimension == 2 &&
       std::abs(phi.x_center().y()) + phi.x_radius() > g.half_width + 1e-12))
    throw std::invalid_argument("residual: test function support exceeds the box");
}

/// Time rule: u is frozen at the interval average while the time factor of
/// phi is integrated exactly (its increment); all other terms use the
/// interval midpoint. Constants in time then telescope against the initial
/// term exactly.
Real residual_quadrature(const Trajectory& traj, const ResidualTerms& terms,
                         const TestFunction& phi, Real eps, int dimension) {
  const GridSpec& grid = traj.grid;
  const Real vol = grid.cell_volume();
  const long n = grid.total_cells();
  Real acc = 0;

  for (size_t m = 0; m + 1 < traj.snapshots.size(); ++m) {
    const GridFunction& s0 = traj.snapshots[m];
    const GridFunction& s1 = traj.snapshots[m + 1];
    const Real t0 = s0.time, t1 = s1.time, tm = 0.5 * (t0 + t1), dt = t1 - t0;
    if (dt <= 0) continue;
    for (long c = 0; c < n; ++c) {
      const Point x = grid.cell_center(c);
      const Real ubar = 0.5 * (s0.values[c] + s1.values[c]);
      Real cell = terms.density(ubar) * (phi.value(t1, x) - phi.value(t0, x));
      const Point gp = phi.grad(tm, x);
      for (int ax = 0; ax < dimension; ++ax) cell += dt * terms.flux(ax, ubar) * gp[ax];
      if (eps > 0) cell += dt * eps * terms.diffusion(ubar) * phi.laplacian(tm, x);
      cell += dt * terms.source(tm, x, ubar) * phi.value(tm, x);
      acc += cell;
    }
  }
  // initial term
  const GridFunction& init = traj.snapshots.front();
  for (long c = 0; c < n; ++c)
    acc += terms.density(init.values[c]) * phi.value(init.time, grid.cell_center(c));
  return acc * vol;
}

}  // namespace

Real weak_residual(const Trajectory& traj, const ModelSpec& model, const TestFunction& phi,
                   Real eps) {
  check_support(traj, phi);
  ResidualTerms terms;
  terms.density = [](Real u) { return u; };
  terms.flux = [&model](int ax, Real u) {
    return model.flux.is_zero() ? 0.0 : model.flux.eval(ax, u);
  };
  terms.diffusion = [&model](Real u) { return model.diffusion.is_zero ? 0.0 : model.diffusion.A(u); };
  terms.source = [&model](Real t, const Point& x, Real u) { return model.source(t, x, u); };
  return residual_quadrature(traj, terms, phi, eps, model.flux.dimension);
}

Real entropy_residual(const Trajectory& traj, const ModelSpec& model, const EntropyPair& pair,
                      const TestFunction& phi, Real eps) {
  check_support(traj, phi);
  ResidualTerms terms;
  terms.density = pair.eta;
  terms.flux = [&pair](int ax, Real u) { return pair.q_eval(ax, u); };
  terms.diffusion = [&pair](Real u) { return pair.calA_eval(u); };
  terms.source = [&model, &pair](Real t, const Point& x, Real u) {
    return pair.eta_prime(u) * model.source(t, x, u);
  };
  return residual_quadrature(traj, terms, phi, eps, model.flux.dimension);
}

// ---------------------------------------------------------------------------
// Production measure and decomposition.

namespace {

bool constant_second_derivative(const EntropyPair& pair, Real* value) {
  Real lo = kInf, hi = -kInf;
  for (int i = 0; i <= 32; ++i) {
    const Real v = pair.eta_second(i / 32.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
    *value = 0.5 * (lo + hi);
    return true;
  }
  return false;
}

}  // namespace

EntropyProduction production_measure(const Trajectory& traj, const MollifiedFamily* family,
                                     const EntropyPair& pair, Real eps) {
  const GridSpec& grid = traj.grid;
  if (traj.log.dissipation_cells.size() != 0 &&
      traj.log.dissipation_cells.size() != grid.total_cells())
    throw std::invalid_argument("production_measure: trajectory grid mismatch");
  const Real mu = family ? family->mu : traj.mu;
  const Real kappa = family ? family->g_mu.kappa : 0.0;
  const Real T = traj.snapshots.back().time;
  const Real u0_l2 = traj.snapshots.front().l2();

  EntropyProduction out;
  out.bound = pair.C2 * (u0_l2 * u0_l2 + 2.0 * kappa * T);

  Real etapp_const = 0;
  if (constant_second_derivative(pair, &etapp_const) &&
      traj.log.dissipation_cells.size() == grid.total_cells()) {
    out.density = (eps * etapp_const) * traj.log.dissipation_cells;
    out.total_mass = eps * etapp_const * static_cast<Real>(traj.log.dissipation_raw);
    return out;
  }

  // Snapshot-based assembly with interface divided differences of the
  // effective primitive B = A_mu + mu id.
  auto B = [&](Real u) {
    Real v = mu * u;
    if (family && !family->A_mu.is_zero) v += family->A_mu.A(u);
    return v;
  };
  out.density = Array::Zero(grid.total_cells());
  const Real dx = grid.dx();
  const long nax = grid.cells_per_axis;
  for (size_t m = 0; m + 1 < traj.snapshots.size(); ++m) {
    const Array ubar = 0.5 * (traj.snapshots[m].values + traj.snapshots[m + 1].values);
    const Real dt = traj.snapshots[m + 1].time - traj.snapshots[m].time;
    for (int ax = 0; ax < grid.dimension; ++ax) {
      const long stride = ax == 0 ? 1 : nax;
      const long lines = grid.dimension == 1 ? 1 : nax;
      const long line_stride = ax == 0 ? (grid.dimension == 1 ? 0 : nax) : 1;
      for (long line = 0; line < lines; ++line) {
        const long base = line * line_stride;
        for (long i = 0; i + 1 < nax; ++i) {
          const long j0 = base + i * stride, j1 = j0 + stride;
          const Real du = ubar[j1] - ubar[j0];
          const Real s = du * (B(ubar[j1]) - B(ubar[j0])) / (dx * dx);
          const Real w0 = pair.eta_second(ubar[j0]), w1 = pair.eta_second(ubar[j1]);
          out.density[j0] += 0.5 * dt * eps * w0 * s;
          out.density[j1] += 0.5 * dt * eps * w1 * s;
        }
      }
    }
  }
  out.total_mass = out.density.sum() * grid.cell_volume();
  return out;
}

DecompositionNorms decomposition_norms(const Trajectory& traj, const ModelSpec& model,
                                       const MollifiedFamily* family, const EntropyPair& pair,
                                       Real eps) {
  const GridSpec& grid = traj.grid;
  const Real dx = grid.dx(), vol = grid.cell_volume();
  const Real T = traj.snapshots.back().time;
  const Real kappa = family ? family->g_mu.kappa : model.source.kappa;
  const SourceSpec& g = family ? family->g_mu : model.source;

  DecompositionNorms out;
  Real l1_sq = 0, l3 = 0;
  const long nax = grid.cells_per_axis;
  for (size_t m = 0; m + 1 < traj.snapshots.size(); ++m) {
    const Array ubar = 0.5 * (traj.snapshots[m].values + traj.snapshots[m + 1].values);
    const Real dt = traj.snapshots[m + 1].time - traj.snapshots[m].time;
    const Real tm = 0.5 * (traj.snapshots[m].time + traj.snapshots[m + 1].time);
    if (pair.has_calA) {
      for (int ax = 0; ax < grid.dimension; ++ax) {
        const long stride = ax == 0 ? 1 : nax;
        const long lines = grid.dimension == 1 ? 1 : nax;
        const long line_stride = ax == 0 ? (grid.dimension == 1 ? 0 : nax) : 1;
        for (long line = 0; line < lines; ++line) {
          const long base = line * line_stride;
          for (long i = 0; i + 1 < nax; ++i) {
            const long j0 = base + i * stride, j1 = j0 + stride;
            const Real dA = (pair.calA(ubar[j1]) - pair.calA(ubar[j0])) / dx;
            l1_sq += dt * (eps * dA) * (eps * dA) * vol;
          }
        }
      }
    }
    if (!g.is_zero()) {
      for (long c = 0; c < grid.total_cells(); ++c)
        l3 += dt * std::abs(pair.eta_prime(ubar[c]) * g(tm, grid.cell_center(c), ubar[c])) * vol;
    }
  }
  out.l1 = std::sqrt(l1_sq);
  out.l2 = production_measure(traj, family, pair, eps).total_mass;
  out.l3 = l3;

  const Real u0_l2 = traj.snapshots.front().l2();
  const Real a_sup =
      model.diffusion.is_zero
          ? 0.0
          : [&] {
              Real s = 0;
              for (int i = 0; i <= 1024; ++i)
                s = std::max(s, std::abs(model.diffusion.a(i / 1024.0)));
              return s;
            }();
  out.l1_bound = std::sqrt(std::max(0.0, eps * pair.sup_eta_prime * pair.sup_eta_prime * a_sup *
                                             (u0_l2 * u0_l2 + kappa * T)));
  out.l3_bound = pair.sup_eta_prime * kappa * T;
  return out;
}

std::vector<ResidualRecord> entropy_battery(const Trajectory& traj, const ModelSpec& model,
                                            const std::vector<Real>& k_list, Real delta,
                                            const std::vector<TestFunction>& battery, Real eps,
                                            Real c_tol) {
  std::vector<ResidualRecord> records;
  const Real tol = c_tol * traj.grid.dx();
  for (Real k : k_list) {
    const EntropyPair pair = kruzhkov_pair(k, delta, model);
    for (const auto& phi : battery) {
      ResidualRecord rec;
      rec.entropy_k = k;
      rec.delta = delta;
      rec.phi_id = phi.id();
      rec.residual = entropy_residual(traj, model, pair, phi, eps);
      rec.tolerance = tol;
      rec.pass = rec.residual >= -tol;
      records.push_back(rec);
    }
  }
  return records;
}

}  // namespace visclim
