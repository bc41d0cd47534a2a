#pragma once

// Counter-based random number generation (Philox-4x32-10) with named
// substreams.  Every draw is a pure function of (seed, stream, index), so
// replicate loops are order-insensitive and bit-reproducible across runs
// and platforms.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace weldlab {

namespace detail {

inline constexpr std::uint32_t philox_m0 = 0xD2511F53u;
inline constexpr std::uint32_t philox_m1 = 0xCD9E8D57u;
inline constexpr std::uint32_t philox_w0 = 0x9E3779B9u;
inline constexpr std::uint32_t philox_w1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c,
                         const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = std::uint64_t(philox_m0) * c[0];
  const std::uint64_t p1 = std::uint64_t(philox_m1) * c[2];
  const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
  const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace detail

/** Philox-4x32 block cipher with 10 rounds; returns four 32-bit words. */
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += detail::philox_w0;
      key[1] += detail::philox_w1;
    }
    detail::philox_round(ctr, key);
  }
  return ctr;
}

/** FNV-1a 64-bit hash; used to derive substream identifiers from names. */
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  return h;
}

/** SplitMix64 finalizer; scrambles seed/stream words into Philox keys. */
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/** Derive a substream id from a stage name and a replicate index. */
inline std::uint64_t substream(std::string_view name, std::uint64_t replicate = 0) {
  return splitmix64(fnv1a64(name) ^ splitmix64(replicate));
}

/**
 * One independent random stream.  Draw i is a pure function of
 * (seed, stream, i); distinct (seed, stream) pairs give independent
 * streams for all practical purposes.
 */
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_{make_key(seed, stream)} {}

  /** Uniform draw in the open interval (0,1). */
  double uniform(std::uint64_t i) const {
    const auto w = block(i, 1);
    return (double(make53(w[0], w[1])) + 0.5) * 0x1p-53;
  }

  /** Standard normal draw; consecutive indices share one Box-Muller block. */
  double normal(std::uint64_t i) const {
    const auto w = block(i >> 1, 2);
    // u1 in (0,1] so the logarithm is finite.
    const double u1 = (double(make53(w[0], w[1])) + 1.0) * 0x1p-53;
    const double u2 = (double(make53(w[2], w[3])) + 0.5) * 0x1p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return (i & 1) ? r * std::sin(a) : r * std::cos(a);
  }

  /** Raw 64 bits for draw i. */
  std::uint64_t bits64(std::uint64_t i) const {
    const auto w = block(i, 3);
    return (std::uint64_t(w[0]) << 32) | w[1];
  }

 private:
  static std::array<std::uint32_t, 2> make_key(std::uint64_t seed, std::uint64_t stream) {
    const std::uint64_t k = splitmix64(splitmix64(seed) ^ stream);
    return {std::uint32_t(k), std::uint32_t(k >> 32)};
  }

  static std::uint64_t make53(std::uint32_t hi, std::uint32_t lo) {
    return (std::uint64_t(hi >> 5) << 26) | (lo >> 6);
  }

  std::array<std::uint32_t, 4> block(std::uint64_t i, std::uint32_t tag) const {
    return philox4x32({std::uint32_t(i), std::uint32_t(i >> 32), tag, 0}, key_);
  }

  std::array<std::uint32_t, 2> key_;
};

}  // namespace weldlab
