#include "ssir/random.hpp"

#include <cmath>
#include <stdexcept>

#include "ssir/special_functions.hpp"

namespace ssir {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxBlock philox4x32(PhiloxBlock ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint32_t tag, std::uint32_t id)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      tag_(tag),
      id_(id) {}

double RandomStream::uniform_at(std::uint64_t n) const {
  const std::uint64_t block = n >> 1;
  if (block != cached_block_) {
    cache_ = philox4x32({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                         id_, tag_},
                        key_);
    cached_block_ = block;
  }
  const std::size_t half = 2 * static_cast<std::size_t>(n & 1);
  const std::uint64_t bits =
      static_cast<std::uint64_t>(cache_[half]) | (static_cast<std::uint64_t>(cache_[half + 1]) << 32);
  return to_open_unit(bits);
}

double RandomStream::normal_at(std::uint64_t n) const { return inverse_normal_cdf(uniform_at(n)); }

double gamma_sample(double shape, RandomStream& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::domain_error("gamma_sample: shape must be positive and finite");
  }
  if (shape < 1.0) {
    const double boosted = gamma_sample(shape + 1.0, rng);
    return boosted * std::pow(rng.next_uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.next_normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.next_uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
      return d * v;
    }
  }
}

}  // namespace ssir
