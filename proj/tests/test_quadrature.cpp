#include <cmath>

#include <gtest/gtest.h>

#include "ssir/quadrature.hpp"

namespace {

TEST(GaussKronrod, PolynomialsAreExact) {
  const auto r = ssir::integrate_gauss_kronrod([](double x) { return 7 * std::pow(x, 6) - 3 * x + 1; }, -1.0, 2.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 128.0 + 1.0 - 4.5 + 3.0, 1e-12);
  EXPECT_EQ(r.intervals, 1u);
}

TEST(GaussKronrod, SmoothAndOscillatory) {
  const auto e = ssir::integrate_gauss_kronrod([](double x) { return std::exp(-x); }, 0.0, 30.0);
  EXPECT_NEAR(e.value, -std::expm1(-30.0), 1e-12);
  const auto s = ssir::integrate_gauss_kronrod([](double x) { return std::sin(50 * x); }, 0.0, M_PI);
  EXPECT_NEAR(s.value, 0.0, 1e-10);
}

TEST(GaussKronrod, EndpointSingularityRefines) {
  ssir::QuadratureOptions opt;
  opt.abs_tol = 1e-9;
  const auto r = ssir::integrate_gauss_kronrod([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, opt);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0, 1e-8);
  EXPECT_GT(r.intervals, 1u);
  EXPECT_LE(r.abs_error, 1e-9);
}

TEST(GaussKronrod, ReportsExhaustedBudget) {
  ssir::QuadratureOptions opt;
  opt.abs_tol = 1e-14;
  opt.max_intervals = 3;
  const auto r = ssir::integrate_gauss_kronrod([](double x) { return std::log(x); }, 0.0, 1.0, opt);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.intervals, 3u);
}

TEST(GaussKronrod, NonFiniteIntegrandThrows) {
  EXPECT_THROW(ssir::integrate_gauss_kronrod([](double x) { return x > 0.5 ? NAN : x; }, 0.0, 1.0),
               std::domain_error);
}

}  // namespace
