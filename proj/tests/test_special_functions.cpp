#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "ssir/special_functions.hpp"

namespace {

TEST(LogGamma, MatchesFactorials) {
  double log_factorial = 0.0;
  for (int n = 1; n <= 30; ++n) {
    EXPECT_NEAR(ssir::log_gamma(n), log_factorial, 1e-12 * std::max(1.0, log_factorial)) << n;
    log_factorial += std::log(static_cast<double>(n));
  }
}

TEST(LogGamma, MatchesBoostAcrossRange) {
  for (double x : {1e-6, 0.01, 0.1, 0.5, 1.1, 2.5, 3.0, 7.25, 20.0, 50.0, 171.3, 1e4}) {
    const double ref = boost::math::lgamma(x);
    EXPECT_NEAR(ssir::log_gamma(x), ref, 1e-12 * std::max(1.0, std::abs(ref))) << x;
  }
}

TEST(IncompleteGamma, MatchesBoost) {
  for (double a : {0.3, 1.0, 1.1, 2.5, 3.0, 10.0, 50.0, 200.0}) {
    for (double z : {1e-8, 1e-3, 0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 80.0, 300.0}) {
      const double p = boost::math::gamma_p(a, z);
      const double q = boost::math::gamma_q(a, z);
      EXPECT_NEAR(ssir::regularized_gamma_p(a, z), p, 1e-12 * std::max(p, 1e-300) + 1e-15) << a << ' ' << z;
      // Upper tail keeps relative precision.
      if (q > 1e-300) {
        EXPECT_NEAR(ssir::regularized_gamma_q(a, z) / q, 1.0, 1e-11) << a << ' ' << z;
      }
    }
  }
}

TEST(IncompleteGamma, Edges) {
  EXPECT_EQ(ssir::regularized_gamma_p(3.0, 0.0), 0.0);
  EXPECT_EQ(ssir::regularized_gamma_q(3.0, 0.0), 1.0);
  EXPECT_NEAR(ssir::regularized_gamma_p(1.0, 2.0), 1.0 - std::exp(-2.0), 1e-15);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

TEST(InverseNormal, RoundTripsThroughErfc) {
  for (double p : {1e-300, 1e-100, 1e-20, 1e-8, 1e-3, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97575, 0.999, 1 - 1e-12}) {
    const double x = ssir::inverse_normal_cdf(p);
    // one ulp in x moves the tail mass by about x² ulps
    const double rel = 1e-14 + 4e-16 * x * x;
    if (p < 0.5) {
      EXPECT_NEAR(normal_cdf(x) / p, 1.0, rel) << p;
    } else {
      EXPECT_NEAR(normal_cdf(-x), 1.0 - p, rel * (1.0 - p) + 1e-16) << p;
    }
  }
  EXPECT_EQ(ssir::inverse_normal_cdf(0.5), 0.0);
  EXPECT_NEAR(ssir::inverse_normal_cdf(0.975), 1.959963984540054, 1e-14);
}

TEST(InverseNormal, Endpoints) {
  EXPECT_EQ(ssir::inverse_normal_cdf(0.0), -INFINITY);
  EXPECT_EQ(ssir::inverse_normal_cdf(1.0), INFINITY);
  EXPECT_THROW(ssir::inverse_normal_cdf(-0.1), std::domain_error);
  EXPECT_THROW(ssir::inverse_normal_cdf(1.5), std::domain_error);
}

}  // namespace
