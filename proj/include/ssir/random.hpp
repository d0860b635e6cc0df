#pragma once

#include <array>
#include <cstdint>

namespace ssir {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function (Salmon et al., Random123).
PhiloxBlock philox4x32(PhiloxBlock counter, PhiloxKey key);

/// Counter domains used across the library. Each (seed, tag, id) triple is an
/// independent stream.
namespace stream_tag {
inline constexpr std::uint32_t brownian_base = 0x0;         // + k for B_k, k = 1..3
inline constexpr std::uint32_t bridge_base = 0x10;          // + k
inline constexpr std::uint32_t threshold_mc = 0x100;        // id = batch
inline constexpr std::uint32_t user_base = 0x1000;
}  // namespace stream_tag

/// A counter-based stream of uniforms and normals.
///
/// Element n of the stream is a pure function of (seed, tag, id, n); the
/// block (two elements) last touched is cached, so sequential reads cost one
/// Philox call per two draws. Instances are cheap and are meant to be owned
/// by one thread.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t tag, std::uint32_t id);

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform_at(std::uint64_t n) const;
  double normal_at(std::uint64_t n) const;

  double next_uniform() { return uniform_at(cursor_++); }
  double next_normal() { return normal_at(cursor_++); }

  std::uint64_t position() const { return cursor_; }
  void seek(std::uint64_t n) { cursor_ = n; }

 private:
  PhiloxKey key_;
  std::uint32_t tag_;
  std::uint32_t id_;
  std::uint64_t cursor_ = 0;
  mutable std::uint64_t cached_block_ = ~std::uint64_t{0};
  mutable PhiloxBlock cache_{};
};

/// Gamma(shape, scale = 1) by Marsaglia–Tsang; shape < 1 uses the
/// U^{1/shape} boost.
double gamma_sample(double shape, RandomStream& rng);

}  // namespace ssir
