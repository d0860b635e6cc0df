#include "ssir/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "ssir/svg.hpp"
#include "ssir/util.hpp"

namespace ssir {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

SimulationSpec make_spec(const ExperimentConfig& cfg, double horizon) {
  SimulationSpec spec;
  spec.horizon = horizon;
  spec.dt = cfg.dt;
  spec.master_seed = cfg.master_seed;
  spec.store_stride = cfg.store_stride;
  return spec;
}

double default_horizon(Classification c) { return c == Classification::Permanence ? 500.0 : 200.0; }

std::string describe(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "a1=" << format_double(cfg.params.a1) << " b1=" << format_double(cfg.params.b1)
     << " b2=" << format_double(cfg.params.b2) << " sigma1=" << format_double(cfg.params.sigma1)
     << " sigma2=" << format_double(cfg.params.sigma2) << " incidence=" << to_string(cfg.incidence_kind);
  for (const auto& [key, value] : cfg.coefficients) os << ' ' << key << '=' << format_double(value);
  return os.str();
}

std::string provenance(const ExperimentConfig& cfg, const std::string& what, double horizon, std::size_t paths) {
  std::ostringstream os;
  os << what << "; " << describe(cfg) << "; master_seed=" << cfg.master_seed << " dt=" << format_double(cfg.dt)
     << " horizon=" << format_double(horizon) << " paths=" << paths << " store_stride=" << cfg.store_stride;
  return os.str();
}

// Non-finite gap slopes (S ≡ φ) sort below everything.
std::vector<double> finite_for_ranking(const Eigen::VectorXd& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  for (double& x : out) {
    if (std::isinf(x) && x < 0) x = std::numeric_limits<double>::lowest();
  }
  return out;
}

double window_max(const MomentSeries& m, double t0, double t1) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < m.times.size(); ++k) {
    if (m.times[k] >= t0 && m.times[k] <= t1) best = std::max(best, m.values[k]);
  }
  return best;
}

void write_threshold_files(const fs::path& dir, const ThresholdReport& report) {
  auto csv = open_output(dir / "report.csv");
  csv << threshold_csv_header() << '\n' << threshold_csv_row(report) << '\n';
  auto txt = open_output(dir / "report.txt");
  write_key_value(txt, report);
}

void print_threshold(std::ostream& out, const ThresholdReport& report) {
  out << "lambda         = " << format_double(report.lambda) << '\n'
      << "quad_error     = " << format_double(report.quad_error) << '\n'
      << "R              = " << format_double(report.r) << '\n';
  if (report.mc_samples > 0) {
    out << "mc_lambda      = " << format_double(report.mc_lambda) << " +/- " << format_double(report.mc_halfwidth)
        << " (" << report.mc_samples << " samples)\n";
  }
  out << "classification = " << to_string(report.classification) << '\n';
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
}

}  // namespace

bool all_verdict_checks_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.passed || !c.counts_toward_verdict; });
}

void write_checks(std::ostream& os, const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << ": value=" << format_double(c.value)
       << " limit=" << format_double(c.limit);
    if (!c.detail.empty()) os << " (" << c.detail << ')';
    if (!c.counts_toward_verdict) os << " [informational]";
    os << '\n';
  }
}

ExtinctionSuite run_extinction_suite(const ModelParams& params, const IncidenceModel& model, double lambda,
                                     const State& initial, const SimulationSpec& spec, std::size_t n_paths,
                                     double window, unsigned threads, const ExtinctionTolerances& tol) {
  ExtinctionSuite suite;
  suite.paths = simulate_ensemble(params, model, initial, spec, n_paths, SimulationKind::coupled, 0, threads);
  const auto n = static_cast<Eigen::Index>(suite.paths.size());
  suite.lyapunov_slopes.resize(n);
  suite.gap_slopes.resize(n);
  suite.lyapunov_floored.resize(suite.paths.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto est = lyapunov_estimate(suite.paths[static_cast<std::size_t>(k)], window);
    suite.lyapunov_slopes[k] = est.slope;
    suite.lyapunov_floored[static_cast<std::size_t>(k)] = est.floored;
    suite.gap_slopes[k] = extinction_rate_estimate(suite.paths[static_cast<std::size_t>(k)], window);
  }
  const auto c = derive_constants(params);
  suite.median_lyapunov = median(std::vector<double>(suite.lyapunov_slopes.data(), suite.lyapunov_slopes.data() + n));
  suite.gap_slope_quantile = quantile(finite_for_ranking(suite.gap_slopes), tol.rate_quantile);
  suite.gap_slope_bound = std::max(lambda, -c.c1) + tol.rate_slack;

  const double dev = std::abs(suite.median_lyapunov - lambda);
  suite.checks.push_back({"median_lyapunov_slope", dev <= tol.lyapunov_band, dev, tol.lyapunov_band,
                          "median " + format_double(suite.median_lyapunov) + " vs lambda " + format_double(lambda)});
  suite.checks.push_back({"gap_slope_quantile", suite.gap_slope_quantile <= suite.gap_slope_bound,
                          suite.gap_slope_quantile, suite.gap_slope_bound,
                          "q" + format_double(tol.rate_quantile) + " of ln|S-phi| slopes"});
  return suite;
}

PermanenceSuite run_permanence_suite(const ModelParams& params, const IncidenceModel& model,
                                     const State& initial, const std::optional<State>& second,
                                     const SimulationSpec& spec, std::size_t n_paths, double burn_in,
                                     double window, unsigned threads, const PermanenceTolerances& tol) {
  if (!(burn_in < spec.horizon / 2)) throw std::invalid_argument("burn-in must end before half the horizon");
  PermanenceSuite suite;
  suite.paths = simulate_ensemble(params, model, initial, spec, n_paths, SimulationKind::full, 0, threads);

  const auto n = static_cast<Eigen::Index>(suite.paths.size());
  suite.lyapunov_slopes.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    suite.lyapunov_slopes[k] = lyapunov_estimate(suite.paths[static_cast<std::size_t>(k)], window).slope;
  }
  suite.median_lyapunov = median(std::vector<double>(suite.lyapunov_slopes.data(), suite.lyapunov_slopes.data() + n));

  const double mid = spec.horizon / 2;
  const auto grid = percentile_grid(suite.paths, burn_in, tol.grid_bins, tol.grid_bins);
  suite.early = occupation_histogram(suite.paths, burn_in, grid, mid);
  suite.late = occupation_histogram(suite.paths, mid, grid);
  suite.tv = total_variation(suite.early, suite.late);
  suite.checks.push_back({"occupation_tv", suite.tv < tol.tv_limit, suite.tv, tol.tv_limit,
                          "[" + format_double(burn_in) + "," + format_double(mid) + ") vs [" + format_double(mid) +
                              "," + format_double(spec.horizon) + "]"});

  const double slope = std::abs(suite.median_lyapunov);
  suite.checks.push_back({"median_lyapunov_slope", slope <= tol.slope_band, slope, tol.slope_band,
                          "median ln I(t)/t slope " + format_double(suite.median_lyapunov)});

  const Observable s_value = [](double s, double) { return s; };
  suite.averages = ergodic_average(suite.paths, s_value, burn_in);
  if (second) {
    // Distinct trajectory indices keep the second ensemble's noise independent.
    suite.second_paths = simulate_ensemble(params, model, *second, spec, n_paths, SimulationKind::full,
                                           static_cast<std::uint32_t>(n_paths), threads);
    suite.second_averages = ergodic_average(suite.second_paths, s_value, burn_in);
    const double diff = std::abs(suite.averages->mean - suite.second_averages->mean);
    const double limit = tol.se_multiple * std::hypot(suite.averages->standard_error,
                                                      suite.second_averages->standard_error);
    suite.checks.push_back({"ergodic_average_s", diff <= limit, diff, limit,
                            "means " + format_double(suite.averages->mean) + " and " +
                                format_double(suite.second_averages->mean)});
  }

  try {
    suite.moments = moment_series(suite.paths, params, tol.moment_p, tol.moment_p_bar);
    if (spec.horizon >= tol.moment_late_end) {
      suite.moment_mid_max = window_max(suite.moments, tol.moment_mid_begin, tol.moment_mid_end);
      suite.moment_late_max = window_max(suite.moments, tol.moment_mid_end, tol.moment_late_end);
      const double limit = tol.moment_growth * suite.moment_mid_max;
      Check c{"moment_no_growth", suite.moment_late_max <= limit, suite.moment_late_max, limit,
              "max over [" + format_double(tol.moment_mid_end) + "," + format_double(tol.moment_late_end) +
                  "] vs " + format_double(tol.moment_growth) + " x max over [" +
                  format_double(tol.moment_mid_begin) + "," + format_double(tol.moment_mid_end) + "]"};
      c.counts_toward_verdict = false;
      suite.checks.push_back(std::move(c));
    }
  } catch (const std::invalid_argument&) {
    // p outside the admissible range for these parameters: no moment check.
  }
  return suite;
}

void apply_overrides(ExperimentConfig& config, const Overrides& o) {
  if (o.seed) config.master_seed = *o.seed;
  if (o.dt) {
    if (!(*o.dt > 0.0)) throw ConfigError("--dt must be positive", "--dt");
    config.dt = *o.dt;
  }
  if (o.horizon) {
    if (!(*o.horizon >= config.dt)) throw ConfigError("--horizon must be at least dt", "--horizon");
    config.horizon = *o.horizon;
  }
  if (o.paths) {
    if (*o.paths < 1) throw ConfigError("--paths must be at least 1", "--paths");
    config.n_paths = *o.paths;
  }
  if (o.out) config.output_dir = *o.out;
}

ThresholdOptions threshold_options(const ExperimentConfig& config) {
  ThresholdOptions opt;
  opt.abs_tol = config.quad_tol;
  opt.mc_samples = config.mc_samples;
  opt.mc_seed = config.master_seed;
  opt.threads = config.threads;
  return opt;
}

ThresholdReport run_threshold(const ExperimentConfig& config, std::ostream& out) {
  const auto model = build_incidence(config);
  const auto report = lambda_threshold(config.params, model, threshold_options(config));
  out << "[threshold] " << config.name << '\n';
  print_threshold(out, report);
  write_threshold_files(prepare_dir(config.output_dir), report);
  return report;
}

void run_simulate(const ExperimentConfig& config, std::ostream& out) {
  const auto model = build_incidence(config);
  const double horizon = config.horizon.value_or(200.0);
  const auto spec = make_spec(config, horizon);
  const auto paths = simulate_ensemble(config.params, model, config.initial, spec, config.n_paths,
                                       SimulationKind::coupled, 0, config.threads);
  const auto dir = prepare_dir(config.output_dir);
  Eigen::VectorXd slopes(static_cast<Eigen::Index>(paths.size()));
  std::vector<bool> flags(paths.size());
  for (std::size_t k = 0; k < paths.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "path_%04zu.csv", k);
    auto file = open_output(dir / name);
    write_trajectory_csv(file, paths[k]);
    try {
      const auto est = lyapunov_estimate(paths[k], config.window);
      slopes[static_cast<Eigen::Index>(k)] = est.slope;
      flags[k] = est.floored;
    } catch (const EstimationError&) {
      slopes[static_cast<Eigen::Index>(k)] = std::numeric_limits<double>::quiet_NaN();
    } catch (const std::invalid_argument&) {
      slopes[static_cast<Eigen::Index>(k)] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  auto sl = open_output(dir / "slopes.csv");
  write_slopes_csv(sl, slopes, flags);
  out << "[simulate] " << config.name << ": " << paths.size() << " paths to " << dir.string() << '\n';
}

ClassifyOutcome run_classify(const ExperimentConfig& config, std::ostream& out) {
  const auto model = build_incidence(config);
  ClassifyOutcome result;
  result.threshold = lambda_threshold(config.params, model, threshold_options(config));
  const auto& th = result.threshold;
  const auto dir = prepare_dir(config.output_dir);
  write_threshold_files(dir, th);

  out << "[classify] " << config.name << '\n';
  print_threshold(out, th);

  std::vector<Check> checks;
  double horizon = 0.0;
  if (th.classification == Classification::Indeterminate) {
    result.verdict = "NEAR-CRITICAL";
  } else {
    horizon = config.horizon.value_or(default_horizon(th.classification));
    const auto spec = make_spec(config, horizon);
    if (th.classification == Classification::Extinction) {
      result.extinction = run_extinction_suite(config.params, model, th.lambda, config.initial, spec,
                                               config.n_paths, config.window, config.threads);
      checks = result.extinction->checks;
      auto sl = open_output(dir / "slopes.csv");
      write_slopes_csv(sl, result.extinction->lyapunov_slopes, result.extinction->lyapunov_floored);
      auto gap = open_output(dir / "gap_slopes.csv");
      write_slopes_csv(gap, result.extinction->gap_slopes, {});
    } else {
      result.permanence = run_permanence_suite(config.params, model, config.initial, config.initial2, spec,
                                               config.n_paths, config.burn_in, config.window, config.threads);
      checks = result.permanence->checks;
      auto sl = open_output(dir / "slopes.csv");
      write_slopes_csv(sl, result.permanence->lyapunov_slopes, {});
      auto hist = open_output(dir / "histogram.csv");
      write_histogram_csv(hist, result.permanence->late);
      auto mom = open_output(dir / "moments.csv");
      write_moments_csv(mom, result.permanence->moments);
    }
    result.verdict = all_verdict_checks_pass(checks) ? "AGREE" : "DISAGREE";
  }

  std::ostringstream block;
  write_key_value(block, th);
  if (horizon > 0.0) {
    block << "horizon = " << format_double(horizon) << '\n'
          << "paths = " << config.n_paths << '\n'
          << "window = " << format_double(config.window) << '\n';
  }
  write_checks(block, checks);
  block << "verdict = " << result.verdict << '\n';
  auto txt = open_output(dir / "classify.txt");
  txt << block.str();
  write_checks(out, checks);
  out << "verdict = " << result.verdict << '\n';
  return result;
}

std::vector<fs::path> run_replicate(const std::string& example_id, const Overrides& overrides, std::ostream& out) {
  auto config = parse_config(preset_text(example_id));
  apply_overrides(config, overrides);
  const auto model = build_incidence(config);
  const auto report = lambda_threshold(config.params, model, threshold_options(config));
  const auto dir = prepare_dir(config.output_dir);
  std::vector<fs::path> written;

  {
    auto csv = open_output(dir / "report.csv");
    csv << threshold_csv_header() << '\n' << threshold_csv_row(report) << '\n';
    written.push_back(dir / "report.csv");
  }
  out << "[replicate] " << example_id << '\n';
  print_threshold(out, report);
  if (std::isfinite(model.bound_K)) {
    // f ≥ 0 and g² ≤ K² leave no room for a smaller λ.
    const double floor = -derive_constants(config.params).c2 - 0.5 * model.bound_K * model.bound_K;
    out << "lambda_floor   = " << floor << " (no admissible lambda lies below -c2 - K^2/2)\n";
  }

  const double horizon = config.horizon.value_or(default_horizon(report.classification));
  const auto spec = make_spec(config, horizon);

  if (example_id == "ex1") {
    // A handful of coupled paths is enough to show the behaviour.
    const std::size_t shown = std::min<std::size_t>(config.n_paths, 5);
    const auto paths = simulate_ensemble(config.params, model, config.initial, spec, shown,
                                         SimulationKind::coupled, 0, config.threads);
    const auto prov = provenance(config, "replicate ex1", horizon, shown);

    svg::PlotSpec traj{"Susceptible S(t) and boundary solution phi(t)", "t", "value", prov};
    std::vector<svg::Series> ts{{"S(t)", "#1f4e9c", paths[0].times, paths[0].s},
                                {"phi(t)", "#c0392b", paths[0].times, paths[0].phi, true}};
    auto f1 = open_output(dir / "trajectories.svg");
    svg::write_line_plot(f1, traj, ts);
    written.push_back(dir / "trajectories.svg");

    svg::PlotSpec decay{"ln I(t) against the rate lambda", "t", "ln I(t)", prov};
    std::vector<svg::Series> ds;
    static const char* colors[] = {"#1f4e9c", "#2e8b57", "#8e44ad", "#d35400", "#16a085"};
    for (std::size_t k = 0; k < paths.size(); ++k) {
      ds.push_back({"path " + std::to_string(k), colors[k % 5], paths[k].times, paths[k].log_i});
    }
    const auto& t = paths[0].times;
    Eigen::VectorXd ref = (std::log(config.initial.i) + report.lambda * t.array()).matrix();
    ds.push_back({"ln I(0) + lambda t", "#000000", t, ref, true});
    auto f2 = open_output(dir / "i_decay.svg");
    svg::write_line_plot(f2, decay, ds);
    written.push_back(dir / "i_decay.svg");
  } else {
    const auto paths = simulate_ensemble(config.params, model, config.initial, spec, config.n_paths,
                                         SimulationKind::full, 0, config.threads);
    const auto prov = provenance(config, "replicate ex2", horizon, config.n_paths);

    svg::PlotSpec traj{"Trajectories S(t) and I(t)", "t", "value", prov};
    std::vector<svg::Series> ts{{"S(t)", "#1f4e9c", paths[0].times, paths[0].s},
                                {"I(t)", "#c0392b", paths[0].times, paths[0].i}};
    auto f1 = open_output(dir / "trajectories.svg");
    svg::write_line_plot(f1, traj, ts);
    written.push_back(dir / "trajectories.svg");

    const double burn_in = std::min(config.burn_in, horizon / 2);
    const auto grid = percentile_grid(paths, burn_in);
    const auto hist = occupation_histogram(paths, burn_in, grid);
    svg::PlotSpec heat{"Empirical occupation density of (S, I)", "S", "I",
                       prov + "; burn_in=" + format_double(burn_in)};
    auto f2 = open_output(dir / "occupation.svg");
    svg::write_heatmap(f2, heat, hist);
    written.push_back(dir / "occupation.svg");
    auto f3 = open_output(dir / "histogram.csv");
    write_histogram_csv(f3, hist);
    written.push_back(dir / "histogram.csv");
  }
  for (const auto& p : written) out << "wrote " << p.string() << '\n';
  return written;
}

ValidationReport run_validate_model(const ExperimentConfig& config, std::ostream& out) {
  const auto model = build_incidence(config);
  const auto report = validate_assumption(model);
  out << "[validate-model] " << config.name << ": " << model.description << '\n';
  for (const auto& c : report.clauses) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " worst_ratio=" << format_double(c.worst_ratio);
    if (!c.passed) out << " at (s=" << format_double(c.worst_s) << ", i=" << format_double(c.worst_i) << ')';
    out << '\n';
  }
  out << "samples = " << report.samples << '\n'
      << "assumption = " << (report.all_passed() ? "satisfied" : "violated") << '\n';
  return report;
}

}  // namespace ssir
