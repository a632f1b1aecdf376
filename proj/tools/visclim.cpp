#include "visclim/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"degenerate convection-diffusion solver and estimate verifier"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  int jobs = 1;
  bool seedless = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file")->required();
    cmd->add_option("--out", out_override, "output directory override");
    cmd->add_option("--jobs", jobs, "worker threads for ladder runs")->check(CLI::Range(1, 64));
    cmd->add_flag("--seedless", seedless, "assert that no randomness is used (always true)");
  };

  CLI::App* validate = app.add_subcommand("validate", "check the model hypotheses");
  CLI::App* run = app.add_subcommand("run", "solve the regularized problem");
  CLI::App* reference = app.add_subcommand("reference", "solve the fine-grid entropy reference");
  CLI::App* verify = app.add_subcommand("verify", "certify the a priori estimates");
  CLI::App* sweep = app.add_subcommand("sweep", "vanishing-viscosity convergence table");
  CLI::App* report = app.add_subcommand("report", "bundle existing artifacts");
  for (CLI::App* cmd : {validate, run, reference, verify, sweep, report}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    visclim::RunConfig cfg = visclim::parse_config(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (seedless) std::cout << "seedless: no random number generator is linked into this tool\n";

    visclim::CommandResult result;
    if (validate->parsed()) result = visclim::command_validate(cfg);
    if (run->parsed()) result = visclim::command_run(cfg);
    if (reference->parsed()) result = visclim::command_reference(cfg);
    if (verify->parsed()) result = visclim::command_verify(cfg, jobs);
    if (sweep->parsed()) result = visclim::command_sweep(cfg, jobs);
    if (report->parsed()) result = visclim::command_report(cfg);

    std::cout << result.summary;
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
