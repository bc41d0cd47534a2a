#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "weldlab/rng.hpp"
#include "weldlab/stats.hpp"

using namespace weldlab;

TEST_CASE("philox block matches frozen vectors") {
  // zero counter/key
  const auto z = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(z[0] == 0x6627e8d5u);
  CHECK(z[1] == 0xe169c58du);
  CHECK(z[2] == 0xbc57ac4cu);
  CHECK(z[3] == 0x9b00dbd8u);

  const auto f = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu});
  CHECK(f[0] == 0x408f276du);
  CHECK(f[1] == 0x41c83b0eu);
  CHECK(f[2] == 0xa20bc7c6u);
  CHECK(f[3] == 0x6d5451fdu);

  const auto p = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            {0xa4093822u, 0x299f31d0u});
  CHECK(p[0] == 0xd16cfe09u);
  CHECK(p[1] == 0x94fdccebu);
  CHECK(p[2] == 0x5001e420u);
  CHECK(p[3] == 0x24126ea1u);
}

TEST_CASE("draws are pure functions of seed, stream, index") {
  const CounterRng a(42, substream("x"));
  const CounterRng b(42, substream("x"));
  const CounterRng c(42, substream("y"));
  const CounterRng d(43, substream("x"));
  for (std::uint64_t i = 0; i < 64; ++i) {
    CHECK(a.uniform(i) == b.uniform(i));
    CHECK(a.normal(i) == b.normal(i));
    CHECK(a.bits64(i) == b.bits64(i));
    CHECK(a.bits64(i) != c.bits64(i));
    CHECK(a.bits64(i) != d.bits64(i));
  }
}

TEST_CASE("substream ids separate names and replicates") {
  std::set<std::uint64_t> ids;
  for (const char* name : {"fourier", "band", "moments", "tail", "pipeline-field"})
    for (std::uint64_t rep = 0; rep < 100; ++rep) ids.insert(substream(name, rep));
  CHECK(ids.size() == 500);
}

TEST_CASE("uniform draws stay in the open unit interval") {
  const CounterRng rng(7, substream("u"));
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const double u = rng.uniform(i);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("normal draws have unit moments") {
  const CounterRng rng(11, substream("n"));
  const std::size_t n = 200000;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rng.normal(i);
  const double m = mean(x);
  const double v = sample_variance(x);
  // SE(mean) = 1/sqrt(n), SE(var) ~ sqrt(2/n)
  CHECK(std::abs(m) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(v - 1.0) < 4.0 * std::sqrt(2.0 / double(n)));
  // odd pairs exercise the sine leg of the Box-Muller block
  double cross = 0.0;
  for (std::size_t i = 0; i + 1 < n; i += 2) cross += x[i] * x[i + 1];
  CHECK(std::abs(cross / double(n / 2)) < 5.0 / std::sqrt(double(n / 2)));
}

TEST_CASE("fnv1a64 separates close strings") {
  CHECK(fnv1a64("a") != fnv1a64("b"));
  CHECK(fnv1a64("") == 0xCBF29CE484222325ull);
  CHECK(splitmix64(0) != splitmix64(1));
}
