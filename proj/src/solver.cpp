#include "visclim/solver.hpp"

#include <algorithm>
#include <sstream>

namespace visclim {

namespace {

constexpr int kFluxTableSize = 4097;

Real sampled_sup(const Fn1& fn, int n = 1025) {
  Real m = 0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(fn(static_cast<Real>(i) / (n - 1))));
  return m;
}

}  // namespace

const GridFunction& Trajectory::at_time(Real t, Real tol) const {
  for (const auto& s : snapshots)
    if (std::abs(s.time - t) <= tol) return s;
  std::ostringstream os;
  os << "Trajectory: no snapshot at t = " << t;
  throw std::invalid_argument(os.str());
}

Real Trajectory::energy_dissipation() const {
  return 2.0 * eps * static_cast<Real>(log.dissipation_raw);
}

Real stable_dt(const ModelSpec& model, const MollifiedFamily* family, Real eps,
               const GridSpec& grid, Real cfl, Real kappa_floor) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("stable_dt: cfl in (0,1] required");
  const Real dx = grid.dx();
  if (!(dx > 0)) throw std::invalid_argument("stable_dt: zero dx");
  const int N = grid.dimension;
  const Real mu = family ? family->mu : 0.0;
  const FluxSpec& f = family ? family->f_mu : model.flux;
  const DiffusionSpec& d = family ? family->A_mu : model.diffusion;
  const Real kappa = family ? family->g_mu.kappa : model.source.kappa;

  Real dt = cfl / std::max(kappa, kappa_floor);
  if (!f.is_zero() && f.lipschitz > 0) dt = std::min(dt, cfl * dx / (2.0 * N * f.lipschitz));
  if (eps > 0 && (!d.is_zero || mu > 0)) {
    const Real a_max = d.is_zero ? 0.0 : sampled_sup(d.a);
    if (a_max + mu > 0) dt = std::min(dt, cfl * dx * dx / (2.0 * N * eps * (a_max + mu)));
  }
  return dt;
}

// ---------------------------------------------------------------------------
// Stepper construction.

Real Stepper::AxisFlux::godunov(Real ul, Real ur) const {
  if (ul == ur) return f(ul);
  const Real lo = std::min(ul, ur), hi = std::max(ul, ur);
  Real best = ul < ur ? std::min(f(ul), f(ur)) : std::max(f(ul), f(ur));
  for (size_t k = 0; k < crit_u.size(); ++k) {
    if (crit_u[k] <= lo || crit_u[k] >= hi) continue;
    best = ul < ur ? std::min(best, crit_f[k]) : std::max(best, crit_f[k]);
  }
  return best;
}

Stepper::Stepper(const ModelSpec& model, const MollifiedFamily* family, Real eps,
                 const GridSpec& grid, FluxScheme scheme, SolveOptions opts)
    : grid_(grid), eps_(eps), mu_(family ? family->mu : 0.0), scheme_(scheme), opts_(opts) {
  grid.validate();
  const FluxSpec& f = family ? family->f_mu : model.flux;
  const DiffusionSpec& d = family ? family->A_mu : model.diffusion;
  const SourceSpec& g = family ? family->g_mu : model.source;

  const int M = kFluxTableSize;
  for (int ax = 0; ax < grid.dimension && !f.is_zero(); ++ax) {
    AxisFlux axf;
    Array fv = Array::Zero(M), fp = Array::Zero(M), fm = Array::Zero(M), dv = Array::Zero(M);
    for (int i = 0; i < M; ++i) {
      const Real u = static_cast<Real>(i) / (M - 1);
      fv[i] = f.eval(ax, u);
      dv[i] = f.deriv(ax, u);
    }
    const Real h = 1.0 / (M - 1);
    for (int i = 1; i < M; ++i) {
      fp[i] = fp[i - 1] + 0.5 * h * (std::max(dv[i - 1], 0.0) + std::max(dv[i], 0.0));
      fm[i] = fm[i - 1] + 0.5 * h * (std::min(dv[i - 1], 0.0) + std::min(dv[i], 0.0));
    }
    // Interior extrema (sonic states) for the Godunov flux.
    for (int i = 0; i + 1 < M; ++i) {
      if (dv[i] == 0.0 || dv[i] * dv[i + 1] < 0.0) {
        Real a = static_cast<Real>(i) * h, b = a + h;
        for (int it = 0; it < 60; ++it) {
          const Real mid = 0.5 * (a + b);
          if (f.deriv(ax, a) * f.deriv(ax, mid) <= 0.0)
            b = mid;
          else
            a = mid;
        }
        const Real uc = 0.5 * (a + b);
        if (axf.crit_u.empty() || std::abs(axf.crit_u.back() - uc) > 2 * h) {
          axf.crit_u.push_back(uc);
          axf.crit_f.push_back(f.eval(ax, uc));
        }
      }
    }
    axf.f = LinearTable(0.0, 1.0, std::move(fv));
    axf.fplus = LinearTable(0.0, 1.0, std::move(fp));
    axf.fminus = LinearTable(0.0, 1.0, std::move(fm));
    flux_.push_back(std::move(axf));
  }

  has_diffusion_ = eps > 0 && (!d.is_zero || mu_ > 0);
  if (has_diffusion_) {
    Array bv = Array::Zero(M);
    for (int i = 0; i < M; ++i) {
      const Real u = static_cast<Real>(i) / (M - 1);
      bv[i] = (d.is_zero ? 0.0 : d.A(u)) + mu_ * u;
    }
    bprimitive_ = LinearTable(0.0, 1.0, std::move(bv));
  }

  source_structure_ = g.structure;
  split_source_ = scheme == FluxScheme::godunov;
  if (g.structure == SourceStructure::indicator_ramp && g.ramp && g.chi_profile) {
    source_h_ = g.ramp->h;
    chi_cells_ = Array::Zero(grid.total_cells());
    for (long c = 0; c < grid.total_cells(); ++c)
      chi_cells_[c] = g.chi_profile(grid.cell_center(c).x());
  } else if (g.structure != SourceStructure::zero) {
    source_eval_ = g.eval;
  }

  stable_dt_ = visclim::stable_dt(model, family, eps, grid, opts.cfl, opts.kappa_floor);
}

Real Stepper::diffusion_primitive(Real u) const {
  return has_diffusion_ ? bprimitive_(u) : 0.0;
}

namespace {

struct AxisView {
  long n, stride, lines, line_stride;
};

AxisView axis_view(const GridSpec& g, int axis) {
  const long n = g.cells_per_axis;
  if (g.dimension == 1) return {n, 1, 1, 0};
  return axis == 0 ? AxisView{n, 1, n, n} : AxisView{n, n, n, 1};
}

}  // namespace

void Stepper::apply_flux(const Array& u, Real lambda, Array& out) const {
  const bool periodic = grid_.boundary == Boundary::periodic;
  for (int ax = 0; ax < static_cast<int>(flux_.size()); ++ax) {
    const AxisFlux& axf = flux_[ax];
    const AxisView v = axis_view(grid_, ax);
    for (long line = 0; line < v.lines; ++line) {
      const long base = line * v.line_stride;
      auto cell = [&](long i) -> Real {
        if (i < 0) return periodic ? u[base + (v.n - 1) * v.stride] : u[base];
        if (i >= v.n) return periodic ? u[base] : u[base + (v.n - 1) * v.stride];
        return u[base + i * v.stride];
      };
      if (scheme_ == FluxScheme::engquist_osher) {
        Real fl = axf.fplus(cell(-1)) + axf.fminus(cell(0));
        for (long i = 0; i < v.n; ++i) {
          const Real fr = axf.fplus(cell(i)) + axf.fminus(cell(i + 1));
          out[base + i * v.stride] -= lambda * (fr - fl);
          fl = fr;
        }
      } else {
        Real fl = axf.godunov(cell(-1), cell(0));
        for (long i = 0; i < v.n; ++i) {
          const Real fr = axf.godunov(cell(i), cell(i + 1));
          out[base + i * v.stride] -= lambda * (fr - fl);
          fl = fr;
        }
      }
    }
  }
}

void Stepper::apply_diffusion(const Array& u, Real eta, Array& lap) const {
  const bool periodic = grid_.boundary == Boundary::periodic;
  Array b = Array::Zero(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) b[i] = bprimitive_(u[i]);
  for (int ax = 0; ax < grid_.dimension; ++ax) {
    const AxisView v = axis_view(grid_, ax);
    for (long line = 0; line < v.lines; ++line) {
      const long base = line * v.line_stride;
      auto cellb = [&](long i) -> Real {
        if (i < 0) return periodic ? b[base + (v.n - 1) * v.stride] : b[base];
        if (i >= v.n) return periodic ? b[base] : b[base + (v.n - 1) * v.stride];
        return b[base + i * v.stride];
      };
      for (long i = 0; i < v.n; ++i)
        lap[base + i * v.stride] +=
            eta * (cellb(i + 1) - 2.0 * cellb(i) + cellb(i - 1));
    }
  }
}

GridFunction Stepper::step(const GridFunction& state, Real dt, StepperLog* log) const {
  const Array& u = state.values;
  const Real dx = grid_.dx();
  GridFunction next;
  next.grid = state.grid;
  next.time = state.time + dt;
  next.values = u;

  if (!flux_.empty()) apply_flux(u, dt / dx, next.values);

  if (has_diffusion_) {
    Array lap = Array::Zero(u.size());
    apply_diffusion(u, 1.0 / (dx * dx), lap);
    next.values += (eps_ * dt) * lap;

    if (log) {
      // Exact energy bookkeeping: the diffusion part of the step removes
      // 2*eps*dt * sum_ifaces D(ubar) D(B) / dx^2 from the squared L2 norm,
      // with ubar the diffusion-midpoint state.
      if (log->dissipation_cells.size() != u.size())
        log->dissipation_cells = Array::Zero(u.size());
      Array b = Array::Zero(u.size());
      for (Eigen::Index i = 0; i < u.size(); ++i) b[i] = bprimitive_(u[i]);
      Array ubar = u + (0.5 * eps_ * dt) * lap;
      const bool periodic = grid_.boundary == Boundary::periodic;
      const Real vol = grid_.cell_volume();
      long double exact = 0.0L;
      for (int ax = 0; ax < grid_.dimension; ++ax) {
        const AxisView v = axis_view(grid_, ax);
        for (long line = 0; line < v.lines; ++line) {
          const long base = line * v.line_stride;
          const long last = base + (v.n - 1) * v.stride;
          for (long i = 0; i + 1 < v.n; ++i) {
            const long j0 = base + i * v.stride, j1 = j0 + v.stride;
            const Real wb = b[j1] - b[j0];
            exact += static_cast<long double>(ubar[j1] - ubar[j0]) * wb;
            const Real s = (u[j1] - u[j0]) * wb;
            log->dissipation_cells[j0] += 0.5 * dt * s / (dx * dx);
            log->dissipation_cells[j1] += 0.5 * dt * s / (dx * dx);
          }
          if (periodic) {
            const Real wb = b[base] - b[last];
            exact += static_cast<long double>(ubar[base] - ubar[last]) * wb;
            const Real s = (u[base] - u[last]) * wb;
            log->dissipation_cells[last] += 0.5 * dt * s / (dx * dx);
            log->dissipation_cells[base] += 0.5 * dt * s / (dx * dx);
          }
        }
      }
      log->dissipation_raw += exact * static_cast<long double>(dt * vol / (dx * dx));
    }
  }

  if (source_structure_ != SourceStructure::zero) {
    const Real t0 = state.time;
    // Pointwise explicit coupling in the viscous path; first-order splitting
    // (source applied to the post-flux state) in the Godunov reference.
    const Array& base_state = split_source_ ? next.values : u;
    if (chi_cells_.size() > 0) {
      for (Eigen::Index c = 0; c < u.size(); ++c)
        if (chi_cells_[c] != 0.0)
          next.values[c] += dt * chi_cells_[c] * source_h_(t0, base_state[c]);
    } else if (source_eval_) {
      for (long c = 0; c < grid_.total_cells(); ++c)
        next.values[c] += dt * source_eval_(t0, grid_.cell_center(c), base_state[c]);
    }
  }

  if (log) {
    ++log->steps;
    log->last_dt = dt;
    log->min_value = std::min(log->min_value, next.values.minCoeff());
    log->max_value = std::max(log->max_value, next.values.maxCoeff());
  }
  if (opts_.abort_on_instability) {
    const Real amax = next.values.abs().maxCoeff();
    if (amax > 1.0 + 1e-6 || !all_finite(next.values)) {
      std::ostringstream os;
      os << "instability detected at step " << (log ? log->steps : -1) << ": |u| reaches "
         << amax;
      throw std::runtime_error(os.str());
    }
  }
  return next;
}

GridFunction step(const GridFunction& state, const ModelSpec& model,
                  const MollifiedFamily* family, Real eps, Real dt) {
  Stepper stepper(model, family, eps, state.grid, FluxScheme::engquist_osher);
  if (dt > stepper.stable_dt() * (1.0 + 1e-12))
    throw std::invalid_argument("step: dt exceeds stable_dt");
  return stepper.step(state, dt);
}

namespace {

Trajectory march(const Stepper& stepper, const ModelSpec& model, const MollifiedFamily* family,
                 Real eps, const GridSpec& grid, Real T, const std::vector<Real>& output_times,
                 bool record_dts) {
  if (!(T > 0)) throw std::invalid_argument("solve: T must be positive");
  std::vector<Real> times = output_times;
  std::sort(times.begin(), times.end());
  if (!times.empty() && times.back() > T + 1e-12)
    throw std::invalid_argument("solve: output time beyond horizon");

  Trajectory traj;
  traj.grid = grid;
  traj.eps = eps;
  traj.mu = family ? family->mu : 0.0;

  const InitialDatum& datum = family ? family->u0_mu : model.initial;
  GridFunction state = datum.realize(grid);
  traj.log.dissipation_cells = Array::Zero(grid.total_cells());
  traj.log.min_value = state.values.minCoeff();
  traj.log.max_value = state.values.maxCoeff();
  traj.snapshots.push_back(state);
  traj.dissipation_at_snapshot.push_back(0.0);

  const Real base_dt = stepper.stable_dt();
  for (Real target : times) {
    if (target <= 1e-15) continue;
    while (state.time < target - 1e-14) {
      const Real dt = std::min(base_dt, target - state.time);
      state = stepper.step(state, dt, &traj.log);
      if (record_dts) traj.log.dts.push_back(dt);
    }
    state.time = target;  // land exactly
    traj.snapshots.push_back(state);
    traj.dissipation_at_snapshot.push_back(static_cast<Real>(traj.log.dissipation_raw));
  }

  // Support monitoring: warn when an outflow boundary sees the solution.
  if (grid.boundary == Boundary::outflow) {
    const long n = grid.cells_per_axis, margin = 5;
    for (const auto& snap : traj.snapshots) {
      for (int ax = 0; ax < grid.dimension && !traj.log.boundary_warning; ++ax) {
        const AxisView v = axis_view(grid, ax);
        for (long line = 0; line < v.lines && !traj.log.boundary_warning; ++line) {
          const long base = line * v.line_stride;
          for (long i = 0; i < margin; ++i) {
            if (std::abs(snap.values[base + i * v.stride]) > 1e-12 ||
                std::abs(snap.values[base + (n - 1 - i) * v.stride]) > 1e-12) {
              traj.log.boundary_warning = true;
              break;
            }
          }
        }
      }
    }
  }
  return traj;
}

}  // namespace

Trajectory solve(const ModelSpec& model, const MollifiedFamily* family, Real eps,
                 const GridSpec& grid, Real T, const std::vector<Real>& output_times,
                 SolveOptions opts) {
  Stepper stepper(model, family, eps, grid, FluxScheme::engquist_osher, opts);
  return march(stepper, model, family, eps, grid, T, output_times, false);
}

Trajectory solve_reference(const ModelSpec& model, const GridSpec& grid_fine, Real T,
                           const std::vector<Real>& output_times, SolveOptions opts) {
  Stepper stepper(model, nullptr, 0.0, grid_fine, FluxScheme::godunov, opts);
  return march(stepper, model, nullptr, 0.0, grid_fine, T, output_times, false);
}

}  // namespace visclim
