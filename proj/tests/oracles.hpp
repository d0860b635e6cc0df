#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library.

#include <cmath>
#include <functional>

namespace oracle {

namespace detail {

inline long double simpson(const std::function<long double(long double)>& f, long double a, long double b,
                           long double fa, long double fm, long double fb, long double whole, long double tol,
                           int depth) {
  const long double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
  const long double flm = f(lm), frm = f(rm);
  const long double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const long double right = (b - m) / 6 * (fm + 4 * frm + fb);
  const long double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15 * tol) return left + right + delta / 15;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson on [a, b] in extended precision.
inline double adaptive_simpson(const std::function<long double(long double)>& f, long double a, long double b,
                               long double tol = 1e-12L, int max_depth = 48) {
  const long double fa = f(a), fb = f(b), fm = f((a + b) / 2);
  const long double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return static_cast<double>(detail::simpson(f, a, b, fa, fm, fb, whole, tol, max_depth));
}

/// Inverse-gamma density evaluated directly from its closed form.
inline long double inverse_gamma_pdf(long double a, long double b, long double x) {
  if (x <= 0) return 0;
  return std::exp(a * std::log(b) - std::lgamma(a) - (a + 1) * std::log(x) - b / x);
}

/// ∫ h(x) f*(x) dx over (0, ∞) via x = b / y, i.e. E[h(b/Y)] for Y ~ Gamma(a).
/// Split at y = 1 so the y^(a−1) cusp at 0 sits at an interval end.
inline double inverse_gamma_expectation(long double a, long double b, const std::function<long double(long double)>& h,
                                        long double tol = 1e-12L) {
  const long double log_norm = -std::lgamma(a);
  auto integrand = [&](long double y) -> long double {
    if (y <= 0) return 0;
    return h(b / y) * std::exp(log_norm + (a - 1) * std::log(y) - y);
  };
  const long double y_max = a + 60 + 12 * std::sqrt(a);
  return adaptive_simpson(integrand, 0, 1, tol) + adaptive_simpson(integrand, 1, y_max, tol);
}

}  // namespace oracle
