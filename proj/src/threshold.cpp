#include "ssir/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ssir/special_functions.hpp"
#include "ssir/util.hpp"

namespace ssir {

namespace {

constexpr double kTailMass = 1e-12;
constexpr double kLogUnderflow = -745.0;

// Smallest y (on a geometric grid) with Q(a, y) below the tail mass.
double gamma_upper_cutoff(double a) {
  double y = a + 10.0 * std::sqrt(a) + 40.0;
  while (regularized_gamma_q(a, y) > kTailMass) y *= 1.5;
  return y;
}

}  // namespace

StationaryLaw boundary_law(const ModelParams& params) {
  const auto k = derive_constants(params);
  return {k.a, k.b};
}

void validate(const StationaryLaw& law) {
  if (!(law.shape > 1.0) || !std::isfinite(law.shape)) {
    throw std::invalid_argument("stationary law: shape must exceed 1");
  }
  if (!(law.scale > 0.0) || !std::isfinite(law.scale)) {
    throw std::invalid_argument("stationary law: scale must be positive");
  }
}

double stationary_log_pdf(const StationaryLaw& law, double x) {
  if (!(x > 0.0)) throw std::domain_error("stationary_pdf: x must be positive");
  const double a = law.shape;
  const double b = law.scale;
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
  return a * std::log(b) - log_gamma(a) - (a + 1.0) * std::log(x) - b / x;
}

double stationary_pdf(const StationaryLaw& law, double x) {
  return std::exp(stationary_log_pdf(law, x));
}

double stationary_cdf(const StationaryLaw& law, double x) {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return regularized_gamma_q(law.shape, law.scale / x);
}

double stationary_sample(const StationaryLaw& law, RandomStream& rng) {
  return law.scale / gamma_sample(law.shape, rng);
}

QuadratureResult stationary_expectation(const StationaryLaw& law, const std::function<double(double)>& h,
                                        const QuadratureOptions& options) {
  validate(law);
  const double a = law.shape;
  const double b = law.scale;
  const double log_gamma_a = log_gamma(a);
  const double y_max = gamma_upper_cutoff(a);
  const double y0 = std::min(1.0, 0.5 * y_max);
  const double q = std::max(1.0, 2.0 / (a - 1.0));

  // log of the Gamma(a) density at y
  auto log_weight = [&](double y) { return (a - 1.0) * std::log(y) - y - log_gamma_a; };

  auto lower = [&](double u) {
    const double y = y0 * std::pow(u, q);
    if (!(y > 0.0)) return 0.0;
    const double log_w = log_weight(y) + std::log(y0 * q) + (q - 1.0) * std::log(u);
    const double x = b / y;
    if (log_w + std::log(std::max(1.0, x)) < kLogUnderflow || std::isinf(x)) return 0.0;
    return h(x) * std::exp(log_w);
  };
  auto upper = [&](double y) {
    const double log_w = log_weight(y);
    if (log_w < kLogUnderflow) return 0.0;
    return h(b / y) * std::exp(log_w);
  };

  QuadratureOptions piece = options;
  piece.abs_tol = 0.5 * options.abs_tol;
  const auto lo = integrate_gauss_kronrod(lower, 0.0, 1.0, piece);
  const auto hi = integrate_gauss_kronrod(upper, y0, y_max, piece);

  QuadratureResult out;
  out.value = lo.value + hi.value;
  const double truncation = kTailMass * (1.0 + std::abs(h(b / y_max)));
  out.abs_error = lo.abs_error + hi.abs_error + truncation;
  out.evaluations = lo.evaluations + hi.evaluations;
  out.intervals = lo.intervals + hi.intervals;
  out.converged = lo.converged && hi.converged;
  return out;
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Extinction: return "Extinction";
    case Classification::Permanence: return "Permanence";
    case Classification::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

ThresholdReport lambda_threshold(const ModelParams& params, const IncidenceModel& model,
                                 const ThresholdOptions& options) {
  const auto k = derive_constants(params);
  const StationaryLaw law{k.a, k.b};
  ThresholdReport report;
  report.c2 = k.c2;
  if (!model.satisfies_assumption) {
    report.warnings.push_back("incidence model " + model.description +
                              " does not satisfy the standing assumptions; the threshold is heuristic");
  }

  auto f_boundary = [&](double x) { return model.f(x, 0.0); };
  auto g_boundary = [&](double x) {
    const double g = model.g(x, 0.0);
    return 0.5 * g * g;
  };

  QuadratureOptions quad;
  quad.abs_tol = options.abs_tol;
  const auto int_f = stationary_expectation(law, f_boundary, quad);
  QuadratureResult int_g;
  int_g.converged = true;
  if (!model.noise_free) int_g = stationary_expectation(law, g_boundary, quad);

  report.integral_f = int_f.value;
  report.integral_g = int_g.value;
  report.lambda = -k.c2 + int_f.value - int_g.value;
  report.r = int_f.value / (k.c2 + int_g.value);
  report.quad_error = int_f.abs_error + int_g.abs_error;
  report.quadrature_converged = int_f.converged && int_g.converged;
  if (!report.quadrature_converged) {
    std::ostringstream msg;
    msg << "quadrature did not reach tolerance " << options.abs_tol << " (estimated error "
        << report.quad_error << ")";
    report.warnings.push_back(msg.str());
  }

  if (!report.quadrature_converged) {
    report.classification = Classification::Indeterminate;
  } else if (report.lambda + report.quad_error < 0.0) {
    report.classification = Classification::Extinction;
  } else if (report.lambda - report.quad_error > 0.0) {
    report.classification = Classification::Permanence;
  } else {
    report.classification = Classification::Indeterminate;
  }

  const std::size_t batches = options.mc_batches;
  if (options.mc_samples > 0 && batches >= 2 && options.mc_samples >= batches) {
    std::vector<double> sums(batches, 0.0);
    std::vector<std::size_t> counts(batches, 0);
    parallel_for(batches, options.threads, [&](std::size_t batch) {
      RandomStream rng(options.mc_seed, stream_tag::threshold_mc, static_cast<std::uint32_t>(batch));
      const std::size_t n = options.mc_samples / batches + (batch < options.mc_samples % batches ? 1 : 0);
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double x = stationary_sample(law, rng);
        const double g = model.g(x, 0.0);
        sum += model.f(x, 0.0) - 0.5 * g * g;
      }
      sums[batch] = sum;
      counts[batch] = n;
    });
    double total = 0.0;
    for (double s : sums) total += s;
    const double mean = total / static_cast<double>(options.mc_samples);
    double ss = 0.0;
    for (std::size_t bi = 0; bi < batches; ++bi) {
      const double dev = sums[bi] / static_cast<double>(counts[bi]) - mean;
      ss += dev * dev;
    }
    const double batch_sd = std::sqrt(ss / static_cast<double>(batches - 1));
    report.mc_lambda = -k.c2 + mean;
    report.mc_halfwidth = 1.96 * batch_sd / std::sqrt(static_cast<double>(batches));
    report.mc_samples = options.mc_samples;
    if (!std::isfinite(report.mc_lambda)) {
      throw std::domain_error("integrand evaluation failure in Monte Carlo cross-check");
    }
  } else {
    report.mc_lambda = std::numeric_limits<double>::quiet_NaN();
    report.mc_halfwidth = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

double r_threshold(const ModelParams& params, const IncidenceModel& model, const ThresholdOptions& options) {
  ThresholdOptions quad_only = options;
  quad_only.mc_samples = 0;
  return lambda_threshold(params, model, quad_only).r;
}

void write_key_value(std::ostream& os, const ThresholdReport& report) {
  os << "lambda = " << format_double(report.lambda) << '\n'
     << "quad_error = " << format_double(report.quad_error) << '\n'
     << "mc_lambda = " << format_double(report.mc_lambda) << '\n'
     << "mc_halfwidth = " << format_double(report.mc_halfwidth) << '\n'
     << "mc_samples = " << report.mc_samples << '\n'
     << "r = " << format_double(report.r) << '\n'
     << "integral_f = " << format_double(report.integral_f) << '\n'
     << "integral_g = " << format_double(report.integral_g) << '\n'
     << "c2 = " << format_double(report.c2) << '\n'
     << "classification = " << to_string(report.classification) << '\n';
  for (const auto& w : report.warnings) os << "warning = " << w << '\n';
}

std::string threshold_csv_header() { return "lambda,quad_error,mc_lambda,mc_halfwidth,r,classification"; }

std::string threshold_csv_row(const ThresholdReport& report) {
  std::string row;
  for (double v : {report.lambda, report.quad_error, report.mc_lambda, report.mc_halfwidth, report.r}) {
    row += format_double(v);
    row += ',';
  }
  row += to_string(report.classification);
  return row;
}

}  // namespace ssir
