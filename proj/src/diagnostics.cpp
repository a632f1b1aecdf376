#include "visclim/diagnostics.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace visclim {

namespace {

Real second_difference_l1_axis(const Array& v, const GridSpec& g, int axis) {
  const long n = g.cells_per_axis;
  const long stride = axis == 0 ? 1 : n;
  const long lines = g.dimension == 1 ? 1 : n;
  const long line_stride = axis == 0 ? (g.dimension == 1 ? 0 : n) : 1;
  const Real transverse = g.dimension == 1 ? 1.0 : g.dx();
  Real acc = 0;
  for (long line = 0; line < lines; ++line) {
    const long base = line * line_stride;
    for (long i = 1; i + 1 < n; ++i) {
      const long j = base + i * stride;
      acc += std::abs(v[j + stride] - 2.0 * v[j] + v[j - stride]);
    }
  }
  return acc / g.dx() * transverse;
}

VerificationRecord make_record(std::string id, Real bound, Real observed, Real slack,
                               std::string anchor) {
  VerificationRecord rec;
  rec.estimate_id = std::move(id);
  rec.bound = bound;
  rec.observed = observed;
  rec.slack = slack;
  rec.pass = observed <= bound + slack;
  rec.anchor = std::move(anchor);
  return rec;
}

}  // namespace

Real EstimateConstants::time_lipschitz() const {
  const Real growth = std::exp(kappa * horizon);
  return (lip_f * tv0_total + eps * kappa0 + eps * tvA0 + kappa) * growth + growth - 1.0;
}

EstimateConstants EstimateConstants::compute(const ModelSpec& model,
                                             const MollifiedFamily* family, Real eps, Real T,
                                             const GridSpec& grid) {
  EstimateConstants c;
  c.kappa = family ? family->g_mu.kappa : model.source.kappa;
  c.lip_f = model.flux.is_zero() ? 0.0 : model.flux.lipschitz;
  c.kappa0 = family ? family->kappa0 : 0.0;
  c.eps = eps;
  c.horizon = T;
  const GridFunction u0 = model.initial.realize(grid);
  c.tv0.assign(grid.dimension, 0.0);
  for (int ax = 0; ax < grid.dimension; ++ax) {
    c.tv0[ax] = u0.tv(ax);
    c.tv0_total += c.tv0[ax];
  }
  if (!model.diffusion.is_zero) {
    Array Au0 = Array::Zero(u0.values.size());
    for (Eigen::Index i = 0; i < u0.values.size(); ++i) Au0[i] = model.diffusion.A(u0.values[i]);
    for (int ax = 0; ax < grid.dimension; ++ax)
      c.tvA0 += second_difference_l1_axis(Au0, grid, ax);
  }
  return c;
}

bool VerificationReport::all_pass() const {
  for (const auto& r : records)
    if (!r.pass) return false;
  return !records.empty();
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  for (const auto& r : records) {
    os << (r.pass ? "[PASS] " : "[FAIL] ") << std::left << std::setw(22) << r.estimate_id
       << " observed " << std::scientific << std::setprecision(6) << r.observed << "  bound "
       << r.bound << "  slack " << r.slack << "  (" << r.anchor << ")\n";
  }
  return os.str();
}

Real default_slack(const GridSpec& grid, Real T, Real c_s) {
  return c_s * grid.dx() * (1.0 + T);
}

VerificationRecord check_maximum_principle(const Trajectory& traj, Real tol) {
  const Real excess =
      std::max({0.0, -traj.log.min_value, traj.log.max_value - 1.0});
  return make_record("invariant_region", 0.0, excess, tol, "0 <= u <= 1 at every step");
}

VerificationRecord check_l1_growth(const Trajectory& traj, Real kappa, Real slack_rate) {
  const Real base = traj.snapshots.front().l1();
  const Real dx = traj.grid.dx();
  Real worst = -kInf;
  bool pass = true;
  for (const auto& s : traj.snapshots) {
    const Real margin = s.l1() - base - kappa * s.time;
    worst = std::max(worst, margin);
    if (margin > slack_rate * dx * s.time + 1e-14) pass = false;
  }
  VerificationRecord rec = make_record("l1_growth", 0.0, worst,
                                       slack_rate * dx * traj.snapshots.back().time,
                                       "||u(t)||_1 <= ||u0||_1 + kappa t");
  rec.pass = pass;
  return rec;
}

VerificationRecord check_l2_energy(const Trajectory& traj, Real kappa, Real slack) {
  const Real e0 = traj.snapshots.front().l2();
  Real worst = -kInf;
  for (size_t m = 0; m < traj.snapshots.size(); ++m) {
    const GridFunction& s = traj.snapshots[m];
    const Real diss = 2.0 * traj.eps * traj.dissipation_at_snapshot[m];
    worst = std::max(worst, s.l2() * s.l2() + diss - e0 * e0 - 2.0 * kappa * s.time);
  }
  return make_record("l2_energy", 0.0, worst, slack,
                     "||u(t)||_2^2 + 2 eps dissipation <= ||u0||_2^2 + 2 kappa t");
}

VerificationRecord check_bv_space(const Trajectory& traj, Real kappa,
                                  const std::vector<Real>& tv0, Real slack) {
  Real worst = -kInf;
  for (const auto& s : traj.snapshots) {
    const Real growth = std::exp(kappa * s.time);
    for (int ax = 0; ax < traj.grid.dimension; ++ax) {
      const Real bound = tv0[ax] * growth + growth - 1.0;
      worst = std::max(worst, s.tv(ax) - bound);
    }
  }
  return make_record("bv_envelope", 0.0, worst, slack,
                     "TV(u(t)) <= TV(u0) e^{kappa t} + e^{kappa t} - 1 per axis");
}

VerificationRecord check_time_lipschitz(const Trajectory& traj,
                                        const EstimateConstants& constants, Real slack) {
  const Real L = constants.time_lipschitz();
  Real worst = -kInf;
  for (size_t i = 0; i < traj.snapshots.size(); ++i)
    for (size_t j = i + 1; j < traj.snapshots.size(); ++j) {
      const Real dt = traj.snapshots[j].time - traj.snapshots[i].time;
      worst = std::max(worst, l1_distance(traj.snapshots[j], traj.snapshots[i]) - L * dt);
    }
  VerificationRecord rec = make_record("time_lipschitz", 0.0, worst, slack,
                                       "||u(t) - u(s)||_1 <= L |t - s|");
  std::ostringstream os;
  os << rec.anchor << ", L = " << L;
  rec.anchor = os.str();
  return rec;
}

VerificationRecord check_contraction(const Trajectory& traj_u, const Trajectory& traj_v,
                                     Real kappa, Real slack) {
  if (!(traj_u.grid == traj_v.grid) || traj_u.snapshots.size() != traj_v.snapshots.size())
    throw std::invalid_argument("check_contraction: trajectories must share grid and times");
  const Real d0 = l1_distance(traj_u.snapshots.front(), traj_v.snapshots.front());
  Real worst = -kInf;
  for (size_t m = 0; m < traj_u.snapshots.size(); ++m) {
    const Real t = traj_u.snapshots[m].time;
    if (std::abs(t - traj_v.snapshots[m].time) > 1e-12)
      throw std::invalid_argument("check_contraction: snapshot times differ");
    worst = std::max(worst, l1_distance(traj_u.snapshots[m], traj_v.snapshots[m]) -
                                std::exp(kappa * t) * d0);
  }
  return make_record("l1_contraction", 0.0, worst, slack,
                     "||u(t) - v(t)||_1 <= e^{kappa t} ||u0 - v0||_1");
}

VerificationRecord check_gradient_A_bounded(const Trajectory& traj, const ModelSpec& model,
                                            Real eps, Real window_lo, Real window_hi) {
  (void)eps;
  const GridSpec& g = traj.grid;
  const Real dx = g.dx();
  Real sup = 0;
  if (!model.diffusion.is_zero) {
    for (const auto& s : traj.snapshots) {
      for (long c = 0; c + 1 < g.total_cells(); ++c) {
        // windowed x-direction differences; rows are contiguous in x
        if ((c + 1) % g.cells_per_axis == 0) continue;
        const Real x = g.cell_center(c).x();
        if (x < window_lo || x > window_hi) continue;
        sup = std::max(sup, std::abs(model.diffusion.A(s.values[c + 1]) -
                                     model.diffusion.A(s.values[c])) /
                                dx);
      }
    }
  }
  VerificationRecord rec =
      make_record("gradient_A", kInf, sup, 0.0, "sup |grad A(u)| on interior window (recorded)");
  rec.pass = true;
  return rec;
}

VerificationRecord check_gradient_ladder(const std::vector<std::pair<Real, Real>>& eps_values,
                                         Real growth_factor, Real floor) {
  Real worst_ratio = 0;
  bool pass = true;
  for (size_t i = 1; i < eps_values.size(); ++i) {
    const Real prev = std::max(eps_values[i - 1].second, floor);
    const Real ratio = eps_values[i].second / prev;
    worst_ratio = std::max(worst_ratio, ratio);
    if (ratio > growth_factor) pass = false;
  }
  VerificationRecord rec =
      make_record("gradient_A_ladder", growth_factor, worst_ratio, 0.0,
                  "sup |grad A(u)| grows by at most the configured factor per rung");
  rec.pass = pass;
  return rec;
}

VerificationReport run_estimate_battery(const Trajectory& traj, const ModelSpec& model,
                                        const MollifiedFamily* family, Real eps, Real c_s) {
  const Real T = traj.snapshots.back().time;
  const EstimateConstants constants =
      EstimateConstants::compute(model, family, eps, T, traj.grid);
  const Real slack = default_slack(traj.grid, T, c_s);

  VerificationReport report;
  report.records.push_back(check_maximum_principle(traj));
  report.records.push_back(check_l1_growth(traj, constants.kappa));
  report.records.push_back(check_l2_energy(traj, constants.kappa, slack));
  report.records.push_back(check_bv_space(traj, constants.kappa, constants.tv0, slack));
  report.records.push_back(check_time_lipschitz(traj, constants, slack));
  report.records.push_back(check_gradient_A_bounded(traj, model, eps,
                                                    -0.5 * traj.grid.half_width,
                                                    0.5 * traj.grid.half_width));
  return report;
}

}  // namespace visclim
