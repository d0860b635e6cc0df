#pragma once

#include <cstddef>
#include <functional>

namespace ssir {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  bool converged = false;
};

/// Globally adaptive Gauss–Kronrod (G7/K15) on a finite interval [lo, hi].
///
/// The interval with the largest local error estimate is bisected until the
/// summed estimate is below max(abs_tol, rel_tol·|value|) or the interval
/// budget runs out (converged = false). Local errors use the QUADPACK
/// rescaling of |K15 − G7|. Throws std::domain_error if the integrand
/// returns a non-finite value.
QuadratureResult integrate_gauss_kronrod(const std::function<double(double)>& integrand, double lo,
                                         double hi, const QuadratureOptions& options = {});

}  // namespace ssir
