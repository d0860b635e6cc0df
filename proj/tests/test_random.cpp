#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "ssir/random.hpp"

namespace {

using ssir::PhiloxBlock;

// Known-answer vectors of the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(ssir::philox4x32({0, 0, 0, 0}, {0, 0}),
            (PhiloxBlock{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(ssir::philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (PhiloxBlock{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(ssir::philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (PhiloxBlock{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, RandomAccessMatchesSequential) {
  ssir::RandomStream seq(42, 7, 3);
  const ssir::RandomStream ra(42, 7, 3);
  std::vector<double> values;
  for (int k = 0; k < 101; ++k) values.push_back(seq.next_normal());
  for (int k = 100; k >= 0; --k) EXPECT_EQ(ra.normal_at(static_cast<std::uint64_t>(k)), values[static_cast<std::size_t>(k)]);
  EXPECT_EQ(seq.position(), 101u);
  seq.seek(5);
  EXPECT_EQ(seq.next_normal(), values[5]);
}

TEST(RandomStream, DistinctDomainsDiffer) {
  const ssir::RandomStream base(1, 1, 0), other_tag(1, 2, 0), other_id(1, 1, 1), other_seed(2, 1, 0),
      high_seed(1ULL << 32 | 1, 1, 0);
  std::set<double> firsts{base.uniform_at(0), other_tag.uniform_at(0), other_id.uniform_at(0),
                          other_seed.uniform_at(0), high_seed.uniform_at(0)};
  EXPECT_EQ(firsts.size(), 5u);
}

TEST(RandomStream, UniformMoments) {
  const ssir::RandomStream rng(2024, 0x1000, 0);
  const int n = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double u = rng.uniform_at(static_cast<std::uint64_t>(k));
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.5, 3 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sum2 / n - mean * mean, 1.0 / 12, 3 * std::sqrt(1.0 / 180 / n));
}

TEST(RandomStream, NormalMoments) {
  const ssir::RandomStream rng(99, 0x1000, 1);
  const int n = 1000000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int k = 0; k < n; ++k) {
    const double z = rng.normal_at(static_cast<std::uint64_t>(k));
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  EXPECT_NEAR(m1, 0.0, 3 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 3 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m4, 3.0, 3 * std::sqrt(96.0 / n));
}

class GammaSample : public ::testing::TestWithParam<double> {};

TEST_P(GammaSample, MeanAndVarianceEqualShape) {
  const double shape = GetParam();
  ssir::RandomStream rng(7, 0x1000, 2);
  const int n = 400000;
  double sum = 0, sum2 = 0;
  for (int k = 0; k < n; ++k) {
    const double g = ssir::gamma_sample(shape, rng);
    ASSERT_GT(g, 0.0);
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  EXPECT_NEAR(mean, shape, 3 * std::sqrt(shape / n));
  // Var of the sample variance of Gamma(k): (μ4 − σ⁴)/n with μ4 = 3k² + 6k.
  EXPECT_NEAR(var, shape, 3 * std::sqrt((2 * shape * shape + 6 * shape) / n));
}

INSTANTIATE_TEST_SUITE_P(Shapes, GammaSample, ::testing::Values(0.4, 1.0, 3.0, 21.0));

TEST(GammaSample, RejectsBadShape) {
  ssir::RandomStream rng(1, 0x1000, 0);
  EXPECT_THROW(ssir::gamma_sample(0.0, rng), std::domain_error);
  EXPECT_THROW(ssir::gamma_sample(NAN, rng), std::domain_error);
}

}  // namespace
