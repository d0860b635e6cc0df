#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ssir/analysis.hpp"
#include "ssir/threshold.hpp"

namespace {

using ssir::Classification;
using ssir::IncidenceKind;
using ssir::StationaryLaw;

const ssir::ModelParams kExtinctionParams{3, 1, 1, 1, 1};
const ssir::ModelParams kPermanenceParams{10, 1, 1, 1, 1};

ssir::IncidenceModel ratio(double c, double m) {
  return ssir::make_catalog_incidence(IncidenceKind::ratio_example, {{"c", c}, {"m", m}});
}

// λ from the closed-form ratio incidence, by the extended-precision oracle.
double ratio_lambda_oracle(const ssir::ModelParams& p, double c, double m) {
  const long double c1 = p.b1 + p.sigma1 * p.sigma1 / 2, c2 = p.b2 + p.sigma2 * p.sigma2 / 2;
  const long double a = 2 * c1 / (p.sigma1 * p.sigma1), b = 2 * p.a1 / (p.sigma1 * p.sigma1);
  const double integral = oracle::inverse_gamma_expectation(a, b, [&](long double x) {
    const long double f = c * x / (1 + x), g = m * x / (1 + x);
    return f - g * g / 2;
  });
  return static_cast<double>(integral - c2);
}

ssir::ThresholdOptions fast() {
  ssir::ThresholdOptions o;
  o.mc_samples = 0;
  return o;
}

TEST(StationaryLaw, FromParameters) {
  const auto law = ssir::boundary_law(kExtinctionParams);
  EXPECT_DOUBLE_EQ(law.shape, 3.0);
  EXPECT_DOUBLE_EQ(law.scale, 6.0);
  EXPECT_THROW(ssir::validate(StationaryLaw{1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(ssir::validate(StationaryLaw{3.0, 0.0}), std::invalid_argument);
}

TEST(StationaryPdf, ClosedFormValue) {
  const StationaryLaw law{3, 6};
  EXPECT_NEAR(ssir::stationary_pdf(law, 2.0), 108.0 / 16.0 * std::exp(-3.0), 1e-14);
  EXPECT_NEAR(ssir::stationary_pdf(law, 2.0), 0.33605, 2e-5);
  EXPECT_NEAR(ssir::stationary_pdf(law, 2.0), static_cast<double>(oracle::inverse_gamma_pdf(3, 6, 2)), 1e-14);
}

TEST(StationaryPdf, VanishesAtZeroAndRejectsNonPositive) {
  const StationaryLaw law{3, 6};
  EXPECT_LT(ssir::stationary_pdf(law, 1e-3), 1e-300);
  EXPECT_EQ(ssir::stationary_pdf(law, 1e-5), 0.0);
  EXPECT_THROW(ssir::stationary_pdf(law, 0.0), std::domain_error);
  EXPECT_THROW(ssir::stationary_pdf(law, -1.0), std::domain_error);
  EXPECT_THROW(ssir::stationary_log_pdf(law, 0.0), std::domain_error);
}

TEST(StationaryPdf, LargeShapeStaysFinite) {
  const StationaryLaw law{400, 1000};
  const double mode = law.scale / (law.shape + 1);
  EXPECT_TRUE(std::isfinite(ssir::stationary_pdf(law, mode)));
  EXPECT_NEAR(ssir::stationary_log_pdf(law, mode), std::log(static_cast<double>(oracle::inverse_gamma_pdf(400, 1000, mode))), 1e-9);
}

class Normalization : public ::testing::TestWithParam<std::tuple<double, double>> {};

// ∫ pdf = 1 by adaptive Simpson over y = b/x, applied to the library's pdf.
TEST_P(Normalization, DensityIntegratesToOne) {
  const auto [a, b] = GetParam();
  const StationaryLaw law{a, b};
  const auto integrand = [&](long double y) -> long double {
    if (y <= 0) return 0;
    const double x = static_cast<double>(b / y);
    return ssir::stationary_pdf(law, x) * b / (y * y);
  };
  const long double y_max = a + 60 + 12 * std::sqrt(a);
  const double total = oracle::adaptive_simpson(integrand, 0, 1, 1e-13L) + oracle::adaptive_simpson(integrand, 1, y_max, 1e-13L);
  EXPECT_NEAR(total, 1.0, 1e-8);
  const auto q = ssir::stationary_expectation(law, [](double) { return 1.0; });
  EXPECT_NEAR(q.value, 1.0, 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Grid, Normalization,
                         ::testing::Combine(::testing::Values(1.1, 3.0, 10.0, 50.0),
                                            ::testing::Values(0.1, 6.0, 20.0, 100.0)));

TEST(StationaryCdf, MatchesIntegratedPdf) {
  const StationaryLaw law{3, 6};
  for (int k = 1; k <= 100; ++k) {
    const double x = 0.2 * k;
    const double ref = oracle::adaptive_simpson(
        [&](long double t) { return oracle::inverse_gamma_pdf(3, 6, t); }, 0, x, 1e-13L);
    EXPECT_NEAR(ssir::stationary_cdf(law, x), ref, 1e-6) << x;
  }
}

TEST(StationaryCdf, LimitsAndMonotonicity) {
  const StationaryLaw law{3, 6};
  EXPECT_EQ(ssir::stationary_cdf(law, 0.0), 0.0);
  EXPECT_EQ(ssir::stationary_cdf(law, -3.0), 0.0);
  EXPECT_EQ(ssir::stationary_cdf(law, INFINITY), 1.0);
  double prev = 0.0;
  for (double x = 0.05; x < 500; x *= 1.1) {
    const double c = ssir::stationary_cdf(law, x);
    EXPECT_GE(c, prev);
    prev = c;
  }
  EXPECT_GT(prev, 0.999999);
}

TEST(StationarySample, MatchesLawInDistribution) {
  const StationaryLaw law{3, 6};
  ssir::RandomStream rng(314159, ssir::stream_tag::user_base, 0);
  const std::size_t n = 1000000;
  std::vector<double> xs(n);
  double sum = 0.0, sum2 = 0.0;
  for (auto& x : xs) {
    x = ssir::stationary_sample(law, rng);
    ASSERT_GT(x, 0.0);
    sum += x;
    sum2 += x * x;
  }
  const double ks = ssir::ks_statistic(xs, [&](double x) { return ssir::stationary_cdf(law, x); });
  EXPECT_LT(ks, 0.002);

  const double mean = sum / static_cast<double>(n);
  const double se = std::sqrt((sum2 / static_cast<double>(n) - mean * mean) / static_cast<double>(n));
  EXPECT_NEAR(mean, 3.0, 3 * se);

  const double med = ssir::median(xs);
  EXPECT_NEAR(ssir::stationary_cdf(law, med), 0.5, 0.002);
}

TEST(Threshold, PermanenceExample) {
  const auto report = ssir::lambda_threshold(kPermanenceParams, ratio(6, 1));
  const double oracle_lambda = ratio_lambda_oracle(kPermanenceParams, 6, 1);
  EXPECT_NEAR(report.lambda, oracle_lambda, 1e-7);
  EXPECT_NEAR(report.lambda, 3.3611, 0.05 * 3.3611);
  EXPECT_EQ(report.classification, Classification::Permanence);
  EXPECT_GT(report.r, 1.0);
  EXPECT_LE(std::abs(report.lambda - report.mc_lambda), report.quad_error + 3 * report.mc_halfwidth);
  EXPECT_TRUE(report.warnings.empty());
}

TEST(Threshold, ExtinctionExample) {
  const auto report = ssir::lambda_threshold(kExtinctionParams, ratio(1, 1));
  EXPECT_NEAR(report.lambda, ratio_lambda_oracle(kExtinctionParams, 1, 1), 1e-7);
  EXPECT_LT(report.lambda, 0.0);
  EXPECT_LT(report.r, 1.0);
  EXPECT_EQ(report.classification, Classification::Extinction);
  // f ≥ 0 and g ≤ K bound λ below by −c2 − K²/2.
  EXPECT_GE(report.lambda, -1.5 - 0.5);
  EXPECT_LE(std::abs(report.lambda - report.mc_lambda), report.quad_error + 3 * report.mc_halfwidth);
}

TEST(Threshold, OracleAgreementAcrossCatalog) {
  const ssir::ModelParams p{4, 0.7, 0.9, 0.8, 0.6};
  const std::vector<ssir::IncidenceModel> models{
      ssir::make_catalog_incidence(IncidenceKind::bilinear, {{"beta", 0.4}}),
      ssir::make_catalog_incidence(IncidenceKind::holling2, {{"beta", 2}, {"m1", 3}}),
      ssir::make_catalog_incidence(IncidenceKind::beddington_deangelis, {{"beta", 2}, {"m1", 0.5}, {"m2", 1}}),
      ssir::make_catalog_incidence(IncidenceKind::nonlinear, {{"beta", 0.7}, {"l", 1}, {"h", 2}, {"m2", 1}}),
      ssir::make_catalog_incidence(IncidenceKind::ratio_example, {{"c", 3}, {"m", 2}})};
  ssir::ThresholdOptions opt;
  opt.mc_samples = 200000;
  for (const auto& m : models) {
    const auto r = ssir::lambda_threshold(p, m, opt);
    EXPECT_LE(std::abs(r.lambda - r.mc_lambda), r.quad_error + 3 * r.mc_halfwidth) << m.description;
    EXPECT_TRUE(r.quadrature_converged) << m.description;
  }
}

TEST(Threshold, ZeroIncidence) {
  const auto r = ssir::lambda_threshold(kExtinctionParams, ssir::zero_incidence(), fast());
  EXPECT_DOUBLE_EQ(r.lambda, -1.5);
  EXPECT_EQ(r.r, 0.0);
  EXPECT_EQ(ssir::r_threshold(kExtinctionParams, ssir::zero_incidence()), 0.0);
  EXPECT_TRUE(std::isnan(r.mc_lambda));
}

// f = k·s with k = c2 (a − 1) / b makes ∫ f f* = c2 exactly.
TEST(Threshold, CriticalModelGivesUnitRatioAndIndeterminate) {
  const double k = 1.5 * (3 - 1) / 6.0;
  const auto m = ssir::make_custom_incidence([k](double s, double) { return k * s; },
                                             [](double, double) { return 0.0; }, k, 0, 0, true, true);
  const auto r = ssir::lambda_threshold(kExtinctionParams, m, fast());
  EXPECT_NEAR(r.r, 1.0, 1e-9);
  EXPECT_LE(std::abs(r.lambda), r.quad_error);
  EXPECT_EQ(r.classification, Classification::Indeterminate);
}

TEST(Threshold, ScaleCoherence) {
  const ssir::ModelParams p{5, 0.5, 1.2, 0.9, 0.4};
  const auto base = ssir::lambda_threshold(p, ssir::make_catalog_incidence(IncidenceKind::holling2, {{"beta", 1}, {"m1", 2}}), fast());
  for (double k : {0.25, 2.0, 7.5}) {
    const auto scaled = ssir::lambda_threshold(
        p, ssir::make_catalog_incidence(IncidenceKind::holling2, {{"beta", k}, {"m1", 2}}), fast());
    EXPECT_NEAR(scaled.lambda, -base.c2 + k * (base.lambda + base.c2), 1e-6) << k;
  }
}

TEST(Threshold, SignEquivalenceOnRandomModels) {
  ssir::RandomStream rng(77, ssir::stream_tag::user_base, 5);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const ssir::ModelParams p{0.1 + 20 * rng.next_uniform(), 0.05 + 3 * rng.next_uniform(),
                              0.05 + 3 * rng.next_uniform(), 0.1 + 2 * rng.next_uniform(), 2 * rng.next_uniform()};
    const auto m = ssir::make_catalog_incidence(IncidenceKind::ratio_example,
                                                {{"c", 10 * rng.next_uniform() + 1e-3}, {"m", 3 * rng.next_uniform()}});
    const auto r = ssir::lambda_threshold(p, m, fast());
    if (std::abs(r.lambda) <= r.quad_error) continue;
    ++checked;
    EXPECT_EQ(r.lambda > 0, r.r > 1) << trial;
  }
  EXPECT_GT(checked, 190);
}

TEST(Threshold, WarnsForFlaggedModel) {
  const auto m = ssir::make_catalog_incidence(IncidenceKind::nonlinear, {{"beta", 1}, {"l", 2}, {"h", 1}, {"m2", 1}});
  const auto r = ssir::lambda_threshold(kExtinctionParams, m, fast());
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_DOUBLE_EQ(r.lambda, -1.5);
}

TEST(Threshold, NonFiniteIntegrandThrows) {
  const auto m = ssir::make_catalog_incidence(IncidenceKind::nonlinear, {{"beta", 1}, {"l", 0.5}, {"h", 1}, {"m2", 1}});
  EXPECT_THROW(ssir::lambda_threshold(kExtinctionParams, m, fast()), std::domain_error);
}

TEST(Threshold, MonteCarloIsDeterministic) {
  ssir::ThresholdOptions opt;
  opt.mc_samples = 100000;
  const auto a = ssir::lambda_threshold(kPermanenceParams, ratio(6, 1), opt);
  opt.threads = 3;
  const auto b = ssir::lambda_threshold(kPermanenceParams, ratio(6, 1), opt);
  EXPECT_EQ(a.mc_lambda, b.mc_lambda);
  EXPECT_EQ(a.mc_halfwidth, b.mc_halfwidth);
  EXPECT_EQ(ssir::threshold_csv_row(a), ssir::threshold_csv_row(b));
}

TEST(Threshold, Serialization) {
  const auto r = ssir::lambda_threshold(kPermanenceParams, ratio(6, 1), fast());
  EXPECT_EQ(ssir::threshold_csv_header(), "lambda,quad_error,mc_lambda,mc_halfwidth,r,classification");
  const auto row = ssir::threshold_csv_row(r);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 5);
  EXPECT_NE(row.find(",Permanence"), std::string::npos);
  std::ostringstream kv;
  ssir::write_key_value(kv, r);
  EXPECT_NE(kv.str().find("lambda = "), std::string::npos);
  EXPECT_NE(kv.str().find("classification = Permanence"), std::string::npos);
}

}  // namespace
