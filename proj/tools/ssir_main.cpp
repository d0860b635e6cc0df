// Command-line front end: threshold, simulate, classify, replicate, validate-model.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ssir/analysis.hpp"
#include "ssir/experiments.hpp"

namespace {

using ssir::ExitCode;

int code(ExitCode c) { return static_cast<int>(c); }

struct FlagValues {
  std::uint64_t seed = 0;
  double dt = 0.0;
  double horizon = 0.0;
  std::size_t paths = 0;
  std::string out;
};

void add_override_flags(CLI::App& cmd, FlagValues& v) {
  cmd.add_option("--seed", v.seed, "master seed");
  cmd.add_option("--dt", v.dt, "time step");
  cmd.add_option("--horizon", v.horizon, "simulated time span");
  cmd.add_option("--paths", v.paths, "ensemble size");
  cmd.add_option("--out", v.out, "output directory");
}

ssir::Overrides collect(const CLI::App& cmd, const FlagValues& v) {
  ssir::Overrides o;
  if (cmd.count("--seed")) o.seed = v.seed;
  if (cmd.count("--dt")) o.dt = v.dt;
  if (cmd.count("--horizon")) o.horizon = v.horizon;
  if (cmd.count("--paths")) o.paths = v.paths;
  if (cmd.count("--out")) o.out = v.out;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic SIR threshold and simulation tool"};
  app.require_subcommand(1);

  std::string config_path;
  std::string example_id;
  FlagValues flags;

  auto* threshold = app.add_subcommand("threshold", "compute lambda and R, classify");
  auto* simulate = app.add_subcommand("simulate", "simulate a coupled ensemble and write trajectories");
  auto* classify = app.add_subcommand("classify", "threshold plus the matching empirical suite");
  auto* replicate = app.add_subcommand("replicate", "figures and tables for a built-in example");
  auto* validate = app.add_subcommand("validate-model", "check the incidence against the standing assumptions");
  for (auto* cmd : {threshold, simulate, classify, validate}) {
    cmd->add_option("config", config_path, "experiment file")->required();
    add_override_flags(*cmd, flags);
  }
  replicate->add_option("example", example_id, "ex1 or ex2")->required();
  add_override_flags(*replicate, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return code(ExitCode::config_error);
  }

  try {
    if (replicate->parsed()) {
      ssir::run_replicate(example_id, collect(*replicate, flags), std::cout);
      return code(ExitCode::success);
    }
    CLI::App* cmd = app.get_subcommands().front();
    auto config = ssir::load_config(config_path);
    ssir::apply_overrides(config, collect(*cmd, flags));

    if (cmd == threshold) {
      const auto report = ssir::run_threshold(config, std::cout);
      return code(report.classification == ssir::Classification::Indeterminate ? ExitCode::indeterminate
                                                                               : ExitCode::success);
    }
    if (cmd == simulate) {
      ssir::run_simulate(config, std::cout);
      return code(ExitCode::success);
    }
    if (cmd == classify) {
      const auto outcome = ssir::run_classify(config, std::cout);
      return code(outcome.verdict == "NEAR-CRITICAL" ? ExitCode::indeterminate : ExitCode::success);
    }
    ssir::run_validate_model(config, std::cout);
    return code(ExitCode::success);
  } catch (const ssir::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return code(ExitCode::config_error);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return code(ExitCode::config_error);
  } catch (const ssir::StepError& e) {
    std::cerr << "numeric failure at step " << e.step() << ": " << e.what() << '\n';
    return code(ExitCode::numeric_failure);
  } catch (const ssir::EstimationError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return code(ExitCode::numeric_failure);
  } catch (const std::domain_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return code(ExitCode::numeric_failure);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
