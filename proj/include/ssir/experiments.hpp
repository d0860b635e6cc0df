#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ssir/analysis.hpp"
#include "ssir/config.hpp"
#include "ssir/sde.hpp"
#include "ssir/threshold.hpp"

namespace ssir {

/// Process exit codes of the command-line tool.
enum class ExitCode : int { success = 0, config_error = 2, numeric_failure = 3, indeterminate = 4 };

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
  bool counts_toward_verdict = true;
};

bool all_verdict_checks_pass(const std::vector<Check>& checks);
void write_checks(std::ostream& os, const std::vector<Check>& checks);

struct ExtinctionTolerances {
  double lyapunov_band = 0.15;  ///< |median slope − λ| bound
  double rate_slack = 0.2;      ///< added to max(λ, −c1)
  double rate_quantile = 0.9;
};

/// Coupled ensemble checks: I decays at rate λ, S approaches φ no slower
/// than max(λ, −c1).
struct ExtinctionSuite {
  std::vector<TrajectoryPath> paths;
  Eigen::VectorXd lyapunov_slopes;
  std::vector<bool> lyapunov_floored;
  Eigen::VectorXd gap_slopes;
  double median_lyapunov = 0.0;
  double gap_slope_quantile = 0.0;
  double gap_slope_bound = 0.0;
  std::vector<Check> checks;
};

ExtinctionSuite run_extinction_suite(const ModelParams& params, const IncidenceModel& model, double lambda,
                                     const State& initial, const SimulationSpec& spec, std::size_t n_paths,
                                     double window = 0.5, unsigned threads = 0,
                                     const ExtinctionTolerances& tol = {});

struct PermanenceTolerances {
  double tv_limit = 0.05;
  double slope_band = 0.05;
  double se_multiple = 3.0;
  Eigen::Index grid_bins = 100;
  double moment_growth = 1.2;
  double moment_p = 0.5;
  double moment_p_bar = 1.0;
  double moment_mid_begin = 20.0;
  double moment_mid_end = 50.0;
  double moment_late_end = 200.0;
};

/// Full-system ensemble checks: occupation measure stable between the two
/// halves after burn-in, ln I(t)/t → 0, time averages independent of the
/// start (when `second` is given), bounded moments.
struct PermanenceSuite {
  std::vector<TrajectoryPath> paths;
  std::vector<TrajectoryPath> second_paths;
  Eigen::VectorXd lyapunov_slopes;
  double median_lyapunov = 0.0;
  Histogram2D early;
  Histogram2D late;
  double tv = 0.0;
  std::optional<ErgodicAverages> averages;
  std::optional<ErgodicAverages> second_averages;
  MomentSeries moments;
  double moment_mid_max = 0.0;
  double moment_late_max = 0.0;
  std::vector<Check> checks;
};

PermanenceSuite run_permanence_suite(const ModelParams& params, const IncidenceModel& model,
                                     const State& initial, const std::optional<State>& second,
                                     const SimulationSpec& spec, std::size_t n_paths, double burn_in,
                                     double window = 0.5, unsigned threads = 0,
                                     const PermanenceTolerances& tol = {});

/// Command-line flag overrides.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<std::size_t> paths;
  std::optional<std::string> out;
};

void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

ThresholdOptions threshold_options(const ExperimentConfig& config);

/// Threshold report to `out` and report.csv / report.txt under output_dir.
ThresholdReport run_threshold(const ExperimentConfig& config, std::ostream& out);

/// Coupled ensemble; one CSV per path plus slopes.csv.
void run_simulate(const ExperimentConfig& config, std::ostream& out);

struct ClassifyOutcome {
  ThresholdReport threshold;
  std::string verdict;  ///< AGREE, DISAGREE or NEAR-CRITICAL
  std::optional<ExtinctionSuite> extinction;
  std::optional<PermanenceSuite> permanence;
};

/// Threshold, then the empirical suite matching its classification; the
/// suite is skipped for an Indeterminate λ.
ClassifyOutcome run_classify(const ExperimentConfig& config, std::ostream& out);

/// Figures and tables for a built-in example; returns the files written.
std::vector<std::filesystem::path> run_replicate(const std::string& example_id, const Overrides& overrides,
                                                 std::ostream& out);

ValidationReport run_validate_model(const ExperimentConfig& config, std::ostream& out);

}  // namespace ssir
