#include "ssir/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ssir/util.hpp"

namespace ssir {

namespace {

constexpr std::size_t kMinFitPoints = 10;

struct Window {
  Eigen::Index begin;
  Eigen::Index end;
};

Window trailing(Eigen::Index n, double window) {
  const auto begin = static_cast<Eigen::Index>(std::floor((1.0 - window) * static_cast<double>(n)));
  return {std::clamp<Eigen::Index>(begin, 0, n), n};
}

void check_window(double window) {
  if (!(window > 0.0 && window < 1.0)) throw std::invalid_argument("window must lie in (0, 1)");
}

double fit(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() < kMinFitPoints) {
    throw EstimationError("fewer than 10 usable points for slope estimation");
  }
  return least_squares_slope(t, y);
}

Eigen::Index bin_of(double v, double lo, double hi, Eigen::Index bins) {
  if (!(v >= lo && v <= hi)) return -1;
  auto b = static_cast<Eigen::Index>(std::floor((v - lo) / (hi - lo) * static_cast<double>(bins)));
  return std::min(b, bins - 1);
}

}  // namespace

double least_squares_slope(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw std::invalid_argument("least_squares_slope: size mismatch");
  if (t.size() < 2) throw EstimationError("least_squares_slope: need at least two points");
  const auto n = static_cast<Eigen::Index>(t.size());
  const Eigen::Map<const Eigen::ArrayXd> tv(t.data(), n);
  const Eigen::Map<const Eigen::ArrayXd> yv(y.data(), n);
  const Eigen::ArrayXd tc = tv - tv.mean();
  const double sxx = tc.square().sum();
  if (!(sxx > 0.0)) throw EstimationError("least_squares_slope: degenerate abscissae");
  return (tc * (yv - yv.mean())).sum() / sxx;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

LyapunovEstimate lyapunov_estimate(const TrajectoryPath& path, double window) {
  check_window(window);
  if (path.size() < 100) throw std::invalid_argument("lyapunov_estimate: path needs at least 100 stored points");
  const Eigen::Index n = path.size();
  auto collect = [&](Window w, std::vector<double>& t, std::vector<double>& y) {
    std::size_t floored = 0;
    for (Eigen::Index k = w.begin; k < w.end; ++k) {
      if (path.floored(k)) {
        ++floored;
        continue;
      }
      t.push_back(path.times[k]);
      y.push_back(path.log_i[k]);
    }
    return floored;
  };

  std::vector<double> t, y;
  const Window w = trailing(n, window);
  const std::size_t floored = collect(w, t, y);
  LyapunovEstimate est;
  if (2 * floored > static_cast<std::size_t>(w.end - w.begin)) {
    Eigen::Index first_floor = 0;
    while (first_floor < n && !path.floored(first_floor)) ++first_floor;
    t.clear();
    y.clear();
    const Window pre = trailing(first_floor, window);
    collect(pre, t, y);
    est.floored = true;
  }
  est.slope = fit(t, y);
  est.points = t.size();
  return est;
}

double extinction_rate_estimate(const TrajectoryPath& path, double window) {
  check_window(window);
  if (!path.has_phi()) throw std::invalid_argument("extinction_rate_estimate: path carries no phi");
  const bool tracked = path.log_gap.size() == path.size();
  const Window w = trailing(path.size(), window);
  std::vector<double> t, y;
  for (Eigen::Index k = w.begin; k < w.end; ++k) {
    const double gap = tracked ? path.log_gap[k] : std::log(std::abs(path.s[k] - path.phi[k]));
    if (!std::isfinite(gap)) continue;
    t.push_back(path.times[k]);
    y.push_back(gap);
  }
  if (t.empty()) return -std::numeric_limits<double>::infinity();
  return fit(t, y);
}

GridSpec percentile_grid(std::span<const TrajectoryPath> paths, double burn_in, Eigen::Index s_bins,
                         Eigen::Index i_bins, double lo_pct, double hi_pct) {
  std::vector<double> s_values, i_values;
  for (const auto& path : paths) {
    for (Eigen::Index k = 0; k < path.size(); ++k) {
      if (path.times[k] < burn_in || path.floored(k)) continue;
      s_values.push_back(path.s[k]);
      i_values.push_back(path.i[k]);
    }
  }
  if (s_values.empty()) throw std::invalid_argument("percentile_grid: no samples after burn-in");
  GridSpec grid;
  grid.s_bins = s_bins;
  grid.i_bins = i_bins;
  grid.s_min = quantile(s_values, lo_pct / 100.0);
  grid.s_max = quantile(s_values, hi_pct / 100.0);
  grid.i_min = quantile(i_values, lo_pct / 100.0);
  grid.i_max = quantile(std::move(i_values), hi_pct / 100.0);
  return grid;
}

Histogram2D occupation_histogram(std::span<const TrajectoryPath> paths, double t_begin, const GridSpec& grid,
                                 double t_end) {
  if (grid.s_bins < 1 || grid.i_bins < 1 || !(grid.s_max > grid.s_min) || !(grid.i_max > grid.i_min)) {
    throw std::invalid_argument("occupation_histogram: degenerate grid");
  }
  Histogram2D hist;
  hist.grid = grid;
  hist.mass = Eigen::MatrixXd::Zero(grid.s_bins, grid.i_bins);
  for (const auto& path : paths) {
    for (Eigen::Index k = 0; k < path.size(); ++k) {
      const double t = path.times[k];
      if (t < t_begin || t >= t_end) continue;
      if (path.floored(k)) {
        ++hist.floored;
        continue;
      }
      const Eigen::Index bs = bin_of(path.s[k], grid.s_min, grid.s_max, grid.s_bins);
      const Eigen::Index bi = bin_of(path.i[k], grid.i_min, grid.i_max, grid.i_bins);
      if (bs < 0 || bi < 0) {
        ++hist.outside;
        continue;
      }
      hist.mass(bs, bi) += 1.0;
      ++hist.samples;
    }
  }
  if (hist.samples == 0) throw std::invalid_argument("occupation_histogram: empty sample set");
  hist.mass /= static_cast<double>(hist.samples);
  return hist;
}

double total_variation(const Histogram2D& p, const Histogram2D& q) {
  if (p.mass.rows() != q.mass.rows() || p.mass.cols() != q.mass.cols()) {
    throw std::invalid_argument("total_variation: grid mismatch");
  }
  return 0.5 * (p.mass - q.mass).cwiseAbs().sum();
}

ErgodicAverages ergodic_average(std::span<const TrajectoryPath> paths, const Observable& h, double burn_in) {
  ErgodicAverages out;
  out.per_path.resize(static_cast<Eigen::Index>(paths.size()));
  for (std::size_t j = 0; j < paths.size(); ++j) {
    const auto& path = paths[j];
    double sum = 0.0;
    std::size_t count = 0;
    for (Eigen::Index k = 0; k < path.size(); ++k) {
      if (path.times[k] < burn_in || path.floored(k)) continue;
      sum += h(path.s[k], path.i[k]);
      ++count;
    }
    out.per_path[static_cast<Eigen::Index>(j)] =
        count > 0 ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
  }
  const auto n = out.per_path.size();
  if (n > 0) out.mean = out.per_path.mean();
  if (n > 1) {
    out.sd = std::sqrt((out.per_path.array() - out.mean).square().sum() / static_cast<double>(n - 1));
    out.standard_error = out.sd / std::sqrt(static_cast<double>(n));
  }
  return out;
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 10) throw std::invalid_argument("ks_statistic: need at least 10 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const double F = cdf(sorted[k]);
    d = std::max({d, F - static_cast<double>(k) / n, static_cast<double>(k + 1) / n - F});
  }
  return d;
}

MomentSeries moment_series(std::span<const TrajectoryPath> paths, const ModelParams& params, double p,
                           double p_bar) {
  const double limit_s = 2.0 * params.b1 / (params.sigma1 * params.sigma1);
  const double limit_i = params.sigma2 > 0.0 ? 2.0 * params.b2 / (params.sigma2 * params.sigma2)
                                             : std::numeric_limits<double>::infinity();
  if (!(p > 0.0 && p < std::min(limit_s, limit_i))) {
    throw std::invalid_argument("moment_series: need 0 < p < min(2 b1 / sigma1^2, 2 b2 / sigma2^2) = " +
                                format_double(std::min(limit_s, limit_i)));
  }
  if (!(p_bar > 0.0)) throw std::invalid_argument("moment_series: p_bar must be positive");
  if (paths.empty()) throw std::invalid_argument("moment_series: no paths");
  const auto n = paths.front().size();
  for (const auto& path : paths) {
    if (path.size() != n || path.times != paths.front().times) {
      throw std::invalid_argument("moment_series: paths do not share a time grid");
    }
  }
  MomentSeries out;
  out.times = paths.front().times;
  out.values = Eigen::VectorXd::Zero(n);
  for (const auto& path : paths) {
    const Eigen::ArrayXd total = path.s.array() + path.i.array();
    out.values.array() += total.pow(1.0 + p) + total.pow(-p_bar);
  }
  out.values /= static_cast<double>(paths.size());
  return out;
}

EnsembleStats summarize_ensemble(std::span<const TrajectoryPath> paths, const ModelParams& params,
                                 double burn_in, double window) {
  EnsembleStats stats;
  stats.n_paths = paths.size();
  stats.window = window;
  const auto n = static_cast<Eigen::Index>(paths.size());
  stats.lyapunov_slopes.resize(n);
  stats.lyapunov_floored.assign(paths.size(), false);
  const bool coupled = !paths.empty() && paths.front().has_phi();
  if (coupled) stats.s_phi_slopes.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& path = paths[static_cast<std::size_t>(j)];
    try {
      const auto est = lyapunov_estimate(path, window);
      stats.lyapunov_slopes[j] = est.slope;
      stats.lyapunov_floored[static_cast<std::size_t>(j)] = est.floored;
    } catch (const EstimationError&) {
      stats.lyapunov_slopes[j] = std::numeric_limits<double>::quiet_NaN();
      stats.lyapunov_floored[static_cast<std::size_t>(j)] = true;
    }
    if (coupled) stats.s_phi_slopes[j] = extinction_rate_estimate(path, window);
  }
  try {
    stats.occupation_hist = occupation_histogram(paths, burn_in, percentile_grid(paths, burn_in));
  } catch (const std::invalid_argument&) {
    // every post-burn-in sample floored: leave the histogram empty
  }
  stats.time_averages["s"] = ergodic_average(paths, [](double s, double) { return s; }, burn_in).per_path;
  stats.time_averages["i"] = ergodic_average(paths, [](double, double i) { return i; }, burn_in).per_path;
  try {
    stats.moments = moment_series(paths, params, 0.5, 1.0);
  } catch (const std::invalid_argument&) {
  }
  return stats;
}

void write_slopes_csv(std::ostream& os, const Eigen::VectorXd& slopes, const std::vector<bool>& flags) {
  os << "path_index,slope,flag\n";
  for (Eigen::Index j = 0; j < slopes.size(); ++j) {
    const bool flag = static_cast<std::size_t>(j) < flags.size() && flags[static_cast<std::size_t>(j)];
    os << j << ',' << format_double(slopes[j]) << ',' << (flag ? "floored" : "ok") << '\n';
  }
}

void write_histogram_csv(std::ostream& os, const Histogram2D& hist) {
  const auto& g = hist.grid;
  os << "# s_range=" << format_double(g.s_min) << ':' << format_double(g.s_max) << " bins=" << g.s_bins << '\n'
     << "# i_range=" << format_double(g.i_min) << ':' << format_double(g.i_max) << " bins=" << g.i_bins << '\n'
     << "s_bin,i_bin,mass\n";
  for (Eigen::Index a = 0; a < hist.mass.rows(); ++a) {
    for (Eigen::Index b = 0; b < hist.mass.cols(); ++b) {
      os << a << ',' << b << ',' << format_double(hist.mass(a, b)) << '\n';
    }
  }
}

void write_moments_csv(std::ostream& os, const MomentSeries& series) {
  os << "t,value\n";
  for (Eigen::Index k = 0; k < series.times.size(); ++k) {
    os << format_double(series.times[k]) << ',' << format_double(series.values[k]) << '\n';
  }
}

}  // namespace ssir
