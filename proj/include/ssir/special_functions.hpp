#pragma once

namespace ssir {

/// ln Γ(x) for x > 0 (Lanczos, g = 7, n = 9). Reentrant, unlike std::lgamma.
double log_gamma(double x);

/// Regularized lower incomplete gamma P(a, z), a > 0, z ≥ 0.
double regularized_gamma_p(double a, double z);

/// Regularized upper incomplete gamma Q(a, z) = 1 − P(a, z).
/// Continued fraction for z > a + 1, so tiny upper tails keep full relative
/// precision.
double regularized_gamma_q(double a, double z);

/// Standard normal quantile, p in (0, 1). Wichura's AS241 (PPND16).
double inverse_normal_cdf(double p);

}  // namespace ssir
