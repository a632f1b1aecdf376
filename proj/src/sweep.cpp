#include "visclim/sweep.hpp"

#include <chrono>
#include <sstream>
#include <thread>

namespace visclim {

namespace {

Real lp_window_distance(const GridFunction& a, const GridFunction& b, Real p, const Point& lo,
                        const Point& hi) {
  const GridSpec& g = a.grid;
  Real acc = 0;
  for (long c = 0; c < g.total_cells(); ++c) {
    const Point x = g.cell_center(c);
    bool inside = x.x() >= lo.x() && x.x() <= hi.x();
    if (g.dimension == 2) inside = inside && x.y() >= lo.y() && x.y() <= hi.y();
    if (inside) acc += std::pow(std::abs(a.values[c] - b.values[c]), p);
  }
  return std::pow(acc * g.cell_volume(), 1.0 / p);
}

InitialDatum datum_for_eps(const ModelSpec& model, const SweepPlan& plan, Real eps, Real mu,
                           const GridSpec& grid) {
  switch (plan.data_rule) {
    case SweepPlan::DataRule::raw:
      return model.initial;
    case SweepPlan::DataRule::mollified_at_mu:
      return mollify_model(model, mu, grid).u0_mu;
    case SweepPlan::DataRule::mollified_at_eps:
    default:
      return mollify_model(model, std::min(eps, 0.25), grid).u0_mu;
  }
}

}  // namespace

void SweepPlan::validate(const GridSpec& grid) const {
  if (eps_ladder.size() < 3 || !is_strictly_decreasing(eps_ladder))
    throw std::invalid_argument("SweepPlan: eps ladder must be >= 3 strictly decreasing values");
  for (Real e : eps_ladder)
    if (!(e > 0)) throw std::invalid_argument("SweepPlan: eps values must be positive");
  if (window_lo.x() < -grid.half_width || window_hi.x() > grid.half_width ||
      !(window_lo.x() < window_hi.x()))
    throw std::invalid_argument("SweepPlan: window K must sit strictly inside the domain");
  for (Real p : p_list)
    if (!(p >= 1.0)) throw std::invalid_argument("SweepPlan: exponents must be >= 1");
  if (refine < 2) throw std::invalid_argument("SweepPlan: refine >= 2 required");
}

bool ConvergenceTable::errors_monotone(int p_index) const {
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].aborted || rows[i - 1].aborted) return false;
    const Real prev = rows[i - 1].errors[p_index].back();
    const Real cur = rows[i].errors[p_index].back();
    if (!(cur < prev)) return false;
  }
  return rows.size() >= 2;
}

bool ConvergenceTable::l1_decreasing() const {
  for (size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].decomposition.l1 < rows[i - 1].decomposition.l1)) return false;
  return rows.size() >= 2;
}

bool ConvergenceTable::l2_within_bound(Real slack) const {
  for (const auto& r : rows)
    if (r.decomposition.l2 > r.l2_bound + slack) return false;
  return !rows.empty();
}

bool ConvergenceTable::l3_within_bound(Real slack) const {
  for (const auto& r : rows)
    if (r.decomposition.l3 > r.decomposition.l3_bound + slack) return false;
  return !rows.empty();
}

std::string ConvergenceTable::verdict_text() const {
  std::ostringstream os;
  for (size_t pi = 0; pi < p_list.size(); ++pi)
    os << "L^" << p_list[pi] << "(K) error monotone decrease: "
       << (errors_monotone(static_cast<int>(pi)) ? "PASS" : "FAIL") << "\n";
  os << "forcing norm l1 decreasing: " << (l1_decreasing() ? "PASS" : "FAIL") << "\n";
  os << "production l2 within bound: " << (l2_within_bound() ? "PASS" : "FAIL") << "\n";
  os << "source norm l3 within bound: " << (l3_within_bound(1e-12) ? "PASS" : "FAIL") << "\n";
  if (h5_warning)
    os << "warning: nonlinearity hypothesis not certified; compactness premise unmet\n";
  return os.str();
}

ConvergenceTable run_sweep(const ModelSpec& model, const SweepPlan& plan, const GridSpec& grid,
                           Real T, const std::vector<Real>& output_times) {
  plan.validate(grid);
  if (!model.hypothesis_report.all_required_pass())
    throw InvalidModel("run_sweep: model failed a required hypothesis");

  ConvergenceTable table;
  table.p_list = plan.p_list;
  table.times = output_times;
  table.h5_warning = !model.hypothesis_report.genuinely_nonlinear();

  // One fine-grid entropy reference, restricted to the study grid.
  GridSpec fine = grid;
  fine.cells_per_axis = grid.cells_per_axis * plan.refine;
  const Trajectory ref = solve_reference(model, fine, T, output_times, plan.solve_opts);
  std::vector<GridFunction> ref_coarse;
  for (size_t m = 1; m < ref.snapshots.size(); ++m)
    ref_coarse.push_back(restrict_to(ref.snapshots[m], grid));

  const GridFunction u0_raw = model.initial.realize(grid);
  const Real u0_l2 = u0_raw.l2();

  table.rows.resize(plan.eps_ladder.size());
  auto run_entry = [&](size_t k) {
    const auto start = std::chrono::steady_clock::now();
    SweepEntry& entry = table.rows[k];
    entry.eps = plan.eps_ladder[k];
    entry.mu = plan.mu_of(entry.eps);
    entry.times = output_times;
    try {
      MollifiedFamily family = mollify_model(model, entry.mu, grid);
      family.u0_mu = datum_for_eps(model, plan, entry.eps, entry.mu, grid);
      const GridFunction u0_eps = family.u0_mu.realize(grid);
      entry.datum_l2_margin = u0_l2 - u0_eps.l2();
      entry.datum_l1_distance = l1_distance(u0_eps, u0_raw);

      const Trajectory traj =
          solve(model, &family, entry.eps, grid, T, output_times, plan.solve_opts);

      entry.errors.assign(plan.p_list.size(), std::vector<Real>(output_times.size(), 0.0));
      for (size_t m = 0; m < ref_coarse.size(); ++m)
        for (size_t pi = 0; pi < plan.p_list.size(); ++pi)
          entry.errors[pi][m] = lp_window_distance(traj.snapshots[m + 1], ref_coarse[m],
                                                   plan.p_list[pi], plan.window_lo,
                                                   plan.window_hi);

      const EntropyPair pair = quadratic_pair(model);
      entry.decomposition = decomposition_norms(traj, model, &family, pair, entry.eps);
      const Real kappa = family.g_mu.kappa;
      entry.l2_bound = pair.C2 * (u0_l2 * u0_l2 + 2.0 * kappa * T);
    } catch (const std::exception& e) {
      entry.aborted = true;
      entry.abort_reason = e.what();
    }
    entry.runtime_s =
        std::chrono::duration<Real>(std::chrono::steady_clock::now() - start).count();
  };

  if (plan.jobs <= 1) {
    for (size_t k = 0; k < plan.eps_ladder.size(); ++k) run_entry(k);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int j = 0; j < plan.jobs; ++j)
      pool.emplace_back([&] {
        for (size_t k = next.fetch_add(1); k < plan.eps_ladder.size(); k = next.fetch_add(1))
          run_entry(k);
      });
    for (auto& t : pool) t.join();
  }
  return table;
}

bool MuStudyTable::cauchy() const {
  for (size_t i = 1; i + 1 < rows.size(); ++i)
    if (rows[i].distance_to_next > rows[i - 1].distance_to_next + 1e-14) return false;
  return rows.size() >= 2;
}

MuStudyTable run_mu_study(const ModelSpec& model, Real eps, const std::vector<Real>& mu_ladder,
                          const GridSpec& grid, Real T, SolveOptions opts) {
  if (!(eps > 0)) throw std::invalid_argument("run_mu_study: eps must be positive");
  if (mu_ladder.size() < 2 || !is_strictly_decreasing(mu_ladder))
    throw std::invalid_argument("run_mu_study: need a decreasing mu ladder");

  MuStudyTable table;
  table.eps = eps;
  std::vector<GridFunction> finals;
  for (Real mu : mu_ladder) {
    MollifiedFamily family = mollify_model(model, mu, grid, mu_ladder);
    const Trajectory traj = solve(model, &family, eps, grid, T, {T}, opts);
    finals.push_back(traj.snapshots.back());
  }
  for (size_t i = 0; i < mu_ladder.size(); ++i) {
    MuStudyRow row;
    row.mu = mu_ladder[i];
    row.distance_to_next = i + 1 < finals.size() ? l1_distance(finals[i], finals[i + 1]) : 0.0;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace visclim
