#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ssir/model.hpp"
#include "ssir/sde.hpp"

namespace ssir {

/// Too few usable points for a fit.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordinary least-squares slope of y against t. Needs ≥ 2 points with
/// distinct t.
double least_squares_slope(std::span<const double> t, std::span<const double> y);

/// Linear-interpolation quantile (q ∈ [0, 1]) of a copy of values.
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

struct LyapunovEstimate {
  double slope = 0.0;
  bool floored = false;  ///< fitted on pre-floor data
  std::size_t points = 0;
};

/// Slope of ln I(t) on the trailing `window` fraction of the path. Points at
/// the underflow floor are excluded; when more than half of the window is
/// floored the fit moves to the trailing window of the pre-floor segment and
/// the result is flagged. Throws std::invalid_argument unless window ∈ (0,1)
/// and the path has ≥ 100 stored points, EstimationError for < 10 usable
/// points.
LyapunovEstimate lyapunov_estimate(const TrajectoryPath& path, double window = 0.5);

/// Slope of ln|S(t) − φ(t)| on the trailing window; negative means S
/// converges to φ. Returns −∞ when S ≡ φ on the window. Throws
/// std::invalid_argument for a path without φ.
double extinction_rate_estimate(const TrajectoryPath& path, double window = 0.5);

struct GridSpec {
  double s_min = 0.0, s_max = 1.0;
  double i_min = 0.0, i_max = 1.0;
  Eigen::Index s_bins = 100;
  Eigen::Index i_bins = 100;
};

/// Rectangular grid over the [lo, hi] percentile box of post-burn-in,
/// non-floored samples (defaults 0.5 and 99.5).
GridSpec percentile_grid(std::span<const TrajectoryPath> paths, double burn_in, Eigen::Index s_bins = 100,
                         Eigen::Index i_bins = 100, double lo_pct = 0.5, double hi_pct = 99.5);

struct Histogram2D {
  GridSpec grid;
  Eigen::MatrixXd mass;  ///< (s_bin, i_bin), sums to 1
  std::size_t samples = 0;
  std::size_t outside = 0;  ///< samples beyond the grid (not counted)
  std::size_t floored = 0;  ///< samples with I at the underflow floor (not counted)
};

/// Pooled occupation measure of samples with t_begin ≤ t < t_end. Throws
/// std::invalid_argument if no sample lands in the grid.
Histogram2D occupation_histogram(std::span<const TrajectoryPath> paths, double t_begin, const GridSpec& grid,
                                 double t_end = std::numeric_limits<double>::infinity());

/// ½ Σ |p − q| over matching grids.
double total_variation(const Histogram2D& p, const Histogram2D& q);

using Observable = std::function<double(double s, double i)>;

struct ErgodicAverages {
  Eigen::VectorXd per_path;  ///< time average of h after burn-in, per path
  double mean = 0.0;
  double sd = 0.0;           ///< across-path standard deviation
  double standard_error = 0.0;
};

/// Floored samples are skipped.
ErgodicAverages ergodic_average(std::span<const TrajectoryPath> paths, const Observable& h, double burn_in);

/// Kolmogorov–Smirnov sup distance between the empirical CDF of samples and
/// cdf. Throws std::invalid_argument for fewer than 10 samples.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

struct MomentSeries {
  Eigen::VectorXd times;
  Eigen::VectorXd values;
};

/// Ensemble mean of (S+I)^(1+p) + (S+I)^(−p_bar) at each stored time. Throws
/// std::invalid_argument unless 0 < p < min(2b1/σ1², 2b2/σ2²) and p_bar > 0,
/// or if the paths do not share a time grid.
MomentSeries moment_series(std::span<const TrajectoryPath> paths, const ModelParams& params, double p,
                           double p_bar);

struct EnsembleStats {
  std::size_t n_paths = 0;
  double window = 0.5;
  Eigen::VectorXd lyapunov_slopes;
  std::vector<bool> lyapunov_floored;
  Eigen::VectorXd s_phi_slopes;  ///< empty unless the paths carry φ
  Histogram2D occupation_hist;
  std::map<std::string, Eigen::VectorXd> time_averages;
  MomentSeries moments;
};

/// Collects every estimator over one ensemble.
EnsembleStats summarize_ensemble(std::span<const TrajectoryPath> paths, const ModelParams& params,
                                 double burn_in, double window = 0.5);

/// path_index,slope,flag
void write_slopes_csv(std::ostream& os, const Eigen::VectorXd& slopes, const std::vector<bool>& flags);
/// s_bin,i_bin,mass (with the grid in comment lines)
void write_histogram_csv(std::ostream& os, const Histogram2D& hist);
/// t,value
void write_moments_csv(std::ostream& os, const MomentSeries& series);

}  // namespace ssir
