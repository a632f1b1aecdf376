#include "visclim/commands.hpp"

#include "visclim/csv.hpp"
#include "visclim/diagnostics.hpp"
#include "visclim/entropy.hpp"
#include "visclim/sweep.hpp"

#include <fstream>
#include <sstream>

namespace visclim {

namespace {

namespace fs = std::filesystem;

const char* kEstimateLegend =
    "invariant_region: 0<=u<=1 | l1_growth: ||u(t)||_1<=||u0||_1+kappa*t | "
    "l2_energy: ||u(t)||_2^2+2*eps*D<=||u0||_2^2+2*kappa*t | "
    "bv_envelope: TV(u(t))<=TV(u0)*e^(kappa*t)+e^(kappa*t)-1 | "
    "time_lipschitz: ||u(t)-u(s)||_1<=L|t-s| | "
    "l1_contraction: ||u(t)-v(t)||_1<=e^(kappa*t)||u0-v0||_1 | "
    "entropy_production: mass(nu)<=C2*(||u0||_2^2+2*kappa*T) | "
    "gradient_A: sup|grad A(u)| recorded on the interior window";

fs::path out_path(const RunConfig& cfg, const std::string& name) {
  return fs::path(cfg.out_dir) / name;
}

std::string bool_str(bool b) { return b ? "1" : "0"; }

std::string report_csv(const VerificationReport& report, const std::string& hash) {
  std::ostringstream os;
  os << file_header(hash, kEstimateLegend);
  os << "estimate_id,bound,observed,slack,pass,anchor\n";
  for (const auto& r : report.records) {
    std::string anchor = r.anchor;
    std::replace(anchor.begin(), anchor.end(), ',', ';');
    os << r.estimate_id << "," << fmt17(r.bound) << "," << fmt17(r.observed) << ","
       << fmt17(r.slack) << "," << bool_str(r.pass) << "," << anchor << "\n";
  }
  return os.str();
}

std::string residuals_csv(const std::vector<ResidualRecord>& records, const std::string& hash) {
  std::ostringstream os;
  os << file_header(hash, "entropy residual >= -tolerance for admissible fields");
  os << "entropy_k,delta,phi_id,residual,tolerance,pass\n";
  for (const auto& r : records)
    os << fmt17(r.entropy_k) << "," << fmt17(r.delta) << "," << r.phi_id << ","
       << fmt17(r.residual) << "," << fmt17(r.tolerance) << "," << bool_str(r.pass) << "\n";
  return os.str();
}

std::string validation_csv(const HypothesisReport& report, const std::string& hash) {
  std::ostringstream os;
  os << file_header(hash,
                    "flux_lipschitz | diffusion_monotone | source_bounds | datum_range | "
                    "genuine_nonlinearity");
  os << "hypothesis,pass,verified,detail\n";
  for (const auto& r : report.records) {
    std::string detail = r.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    os << r.id << "," << bool_str(r.pass) << "," << bool_str(r.verified) << "," << detail << "\n";
  }
  return os.str();
}

std::string sweep_csv(const ConvergenceTable& table, const std::string& hash) {
  std::ostringstream os;
  os << file_header(hash, "L^p(K) distance to the fine-grid entropy reference per eps");
  os << "eps,mu,p,time,error,l1_norm,l2_bound_margin,l3_norm,runtime_s\n";
  for (const auto& row : table.rows) {
    if (row.aborted) {
      os << fmt17(row.eps) << "," << fmt17(row.mu) << ",,,aborted: " << row.abort_reason
         << ",,,," << fmt17(row.runtime_s) << "\n";
      continue;
    }
    for (size_t pi = 0; pi < table.p_list.size(); ++pi)
      for (size_t ti = 0; ti < row.times.size(); ++ti)
        os << fmt17(row.eps) << "," << fmt17(row.mu) << "," << fmt17(table.p_list[pi]) << ","
           << fmt17(row.times[ti]) << "," << fmt17(row.errors[pi][ti]) << ","
           << fmt17(row.decomposition.l1) << "," << fmt17(row.l2_bound - row.decomposition.l2)
           << "," << fmt17(row.decomposition.l3) << "," << fmt17(row.runtime_s) << "\n";
  }
  return os.str();
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj, const std::string& config_hash) {
  std::ostringstream os;
  os << file_header(config_hash, "cell-average snapshots");
  os << (traj.grid.dimension == 1 ? "t,x,u\n" : "t,x,y,u\n");
  for (const auto& snap : traj.snapshots) {
    for (long c = 0; c < traj.grid.total_cells(); ++c) {
      const Point x = traj.grid.cell_center(c);
      os << fmt17(snap.time) << "," << fmt17(x.x());
      if (traj.grid.dimension == 2) os << "," << fmt17(x.y());
      os << "," << fmt17(snap.values[c]) << "\n";
    }
  }
  return os.str();
}

PreparedRun prepare_run(const RunConfig& cfg) {
  set_custom_table_path(cfg.table_csv);
  PreparedRun run;
  Params params = cfg.scenario_params;
  params["horizon"] = cfg.horizon;
  run.model = builtin_model(cfg.scenario, params, cfg.grid);
  run.opts.cfl = cfg.cfl;
  switch (cfg.mu_mode) {
    case RunConfig::MuMode::none:
      break;
    case RunConfig::MuMode::fixed:
      run.family = mollify_model(run.model, cfg.mu_value, cfg.grid, cfg.mu_ladder);
      break;
    case RunConfig::MuMode::auto_rule:
      if (cfg.eps > 0)
        run.family =
            mollify_model(run.model, std::min(cfg.eps / 10.0, 0.25), cfg.grid, cfg.mu_ladder);
      break;
  }
  return run;
}

CommandResult command_validate(const RunConfig& cfg) {
  PreparedRun run = prepare_run(cfg);
  const HypothesisReport report = validate_hypotheses(run.model);
  atomic_write(out_path(cfg, "validation.csv"), validation_csv(report, cfg.hash()));

  std::ostringstream os;
  os << "scenario " << cfg.scenario << ": hypothesis validation\n";
  for (const auto& r : report.records) {
    const bool warn_only = r.id == "genuine_nonlinearity";
    os << (r.pass ? "[PASS] " : (warn_only ? "[WARN] " : "[FAIL] ")) << r.id << ": " << r.detail
       << "\n";
  }
  os << "effective configuration:\n" << cfg.serialize();
  CommandResult res;
  res.summary = os.str();
  res.exit_code = report.all_required_pass() ? 0 : 1;
  return res;
}

CommandResult command_run(const RunConfig& cfg) {
  PreparedRun run = prepare_run(cfg);
  const Trajectory traj = solve(run.model, run.family_ptr(), cfg.eps, cfg.grid, cfg.horizon,
                                cfg.output_times(), run.opts);
  atomic_write(out_path(cfg, "trajectory.csv"), trajectory_csv(traj, cfg.hash()));
  std::ostringstream os;
  os << "solved " << cfg.scenario << " to t = " << cfg.horizon << " in " << traj.log.steps
     << " steps; range [" << fmt17(traj.log.min_value) << ", " << fmt17(traj.log.max_value)
     << "]\n";
  if (traj.log.boundary_warning)
    os << "warning: solution support reached within 5 cells of an outflow boundary\n";
  os << "wrote " << out_path(cfg, "trajectory.csv").string() << "\n";
  return {0, os.str()};
}

CommandResult command_reference(const RunConfig& cfg) {
  PreparedRun run = prepare_run(cfg);
  GridSpec fine = cfg.grid;
  fine.cells_per_axis = cfg.grid.cells_per_axis * cfg.refine;
  const Trajectory traj =
      solve_reference(run.model, fine, cfg.horizon, cfg.output_times(), run.opts);
  atomic_write(out_path(cfg, "reference.csv"), trajectory_csv(traj, cfg.hash()));
  std::ostringstream os;
  os << "reference (" << fine.cells_per_axis << " cells) solved in " << traj.log.steps
     << " steps; wrote " << out_path(cfg, "reference.csv").string() << "\n";
  return {0, os.str()};
}

CommandResult command_verify(const RunConfig& cfg, int jobs) {
  (void)jobs;
  PreparedRun run = prepare_run(cfg);
  const std::vector<Real> times = cfg.output_times();
  const Trajectory traj =
      solve(run.model, run.family_ptr(), cfg.eps, cfg.grid, cfg.horizon, times, run.opts);

  VerificationReport report =
      run_estimate_battery(traj, run.model, run.family_ptr(), cfg.eps, cfg.c_s);

  // Contraction against a deterministically shifted datum.
  {
    const Real shift = 0.1 * cfg.grid.half_width;
    ModelSpec shifted = run.model;
    auto base = run.model.initial.sample;
    shifted.initial.sample = [base, shift](const Point& x) {
      return base(Point(x.x() - shift, x.y()));
    };
    shifted.initial.bind_grid(cfg.grid);
    std::optional<MollifiedFamily> shifted_family;
    if (run.family) {
      shifted_family = mollify_model(shifted, run.family->mu, cfg.grid, cfg.mu_ladder);
    }
    const Trajectory traj_v =
        solve(shifted, shifted_family ? &*shifted_family : nullptr, cfg.eps, cfg.grid,
              cfg.horizon, times, run.opts);
    const Real kappa = run.family ? run.family->g_mu.kappa : run.model.source.kappa;
    report.records.push_back(check_contraction(
        traj, traj_v, kappa, default_slack(cfg.grid, cfg.horizon, cfg.c_s)));
  }

  // Entropy production bound.
  if (cfg.eps > 0) {
    const EntropyPair qpair = quadratic_pair(run.model);
    const EntropyProduction prod = production_measure(traj, run.family_ptr(), qpair, cfg.eps);
    VerificationRecord rec;
    rec.estimate_id = "entropy_production";
    rec.bound = prod.bound;
    rec.observed = prod.total_mass;
    rec.slack = default_slack(cfg.grid, cfg.horizon, cfg.c_s);
    rec.pass = prod.within_bound(rec.slack);
    rec.anchor = "mass(nu) <= C2 (||u0||_2^2 + 2 kappa T)";
    report.records.push_back(rec);
  }

  // Kruzhkov residual battery.
  const std::vector<TestFunction> battery = bump_battery(cfg.grid, cfg.horizon);
  const std::vector<ResidualRecord> residuals =
      entropy_battery(traj, run.model, cfg.k_list, cfg.delta, battery, cfg.eps, cfg.c_tol);
  bool residuals_pass = true;
  for (const auto& r : residuals) residuals_pass = residuals_pass && r.pass;

  atomic_write(out_path(cfg, "report.csv"), report_csv(report, cfg.hash()));
  atomic_write(out_path(cfg, "residuals.csv"), residuals_csv(residuals, cfg.hash()));

  std::ostringstream os;
  os << "estimate battery on " << cfg.scenario << " (eps = " << fmt17(cfg.eps) << "):\n";
  os << report.to_text();
  os << "entropy battery: " << residuals.size() << " residuals, "
     << (residuals_pass ? "all above -tolerance" : "FAILURES present") << "\n";
  if (traj.log.boundary_warning)
    os << "warning: solution support reached within 5 cells of an outflow boundary\n";
  CommandResult res;
  res.summary = os.str();
  res.exit_code = report.all_pass() && residuals_pass ? 0 : 1;
  if (res.exit_code != 0) {
    for (const auto& r : report.records)
      if (!r.pass) {
        res.summary += "first failing record: " + r.estimate_id + "\n";
        break;
      }
  }
  atomic_write(out_path(cfg, "verify_summary.txt"), res.summary);
  return res;
}

CommandResult command_sweep(const RunConfig& cfg, int jobs) {
  PreparedRun run = prepare_run(cfg);
  SweepPlan plan;
  plan.eps_ladder = cfg.eps_ladder;
  plan.window_lo = Point(cfg.window_lo, cfg.window_lo);
  plan.window_hi = Point(cfg.window_hi, cfg.window_hi);
  plan.p_list = cfg.p_list;
  plan.refine = cfg.refine;
  plan.jobs = jobs;
  plan.solve_opts = run.opts;
  const ConvergenceTable table =
      run_sweep(run.model, plan, cfg.grid, cfg.horizon, cfg.output_times());

  atomic_write(out_path(cfg, "sweep.csv"), sweep_csv(table, cfg.hash()));
  std::string verdict = table.verdict_text();
  atomic_write(out_path(cfg, "sweep_summary.txt"), verdict);

  bool pass = table.l1_decreasing() && table.l2_within_bound() && table.l3_within_bound(1e-12);
  for (size_t pi = 0; pi < table.p_list.size(); ++pi)
    pass = pass && table.errors_monotone(static_cast<int>(pi));
  for (const auto& row : table.rows) pass = pass && !row.aborted;

  CommandResult res;
  res.summary = "viscosity sweep on " + cfg.scenario + ":\n" + verdict;
  res.exit_code = pass ? 0 : 1;
  return res;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

CommandResult command_report(const RunConfig& cfg) {
  // pass-flag column index per artifact (-1: no pass column)
  const std::vector<std::pair<std::string, int>> artifacts = {
      {"validation.csv", 1}, {"report.csv", 4}, {"residuals.csv", 5}, {"sweep.csv", -1}};
  std::ostringstream os;
  int found = 0;
  long failures = 0;
  for (const auto& [name, pass_col] : artifacts) {
    std::ifstream in(out_path(cfg, name));
    if (!in) continue;
    ++found;
    std::string line;
    long rows = 0, fails = 0;
    bool past_header = false;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!past_header) {  // column header line
        past_header = true;
        continue;
      }
      ++rows;
      if (pass_col >= 0) {
        const auto fields = split_csv_line(line);
        // nonlinearity is advisory for the limit theorem, not a model failure
        const bool warn_only = !fields.empty() && fields[0] == "genuine_nonlinearity";
        if (!warn_only && pass_col < static_cast<int>(fields.size()) && fields[pass_col] == "0")
          ++fails;
      }
    }
    os << name << ": " << rows << " rows";
    if (pass_col >= 0) os << ", " << fails << " failures";
    os << "\n";
    failures += fails;
  }
  CommandResult res;
  if (found == 0) {
    res.summary = "no artifacts found under " + cfg.out_dir + "; run verify/sweep first\n";
    res.exit_code = 1;
    return res;
  }
  os << (failures == 0 ? "bundle: all recorded checks pass\n"
                       : "bundle: failures recorded, inspect the CSVs\n");
  res.summary = os.str();
  res.exit_code = failures == 0 ? 0 : 1;
  atomic_write(out_path(cfg, "summary.txt"), res.summary);
  return res;
}

}  // namespace visclim
