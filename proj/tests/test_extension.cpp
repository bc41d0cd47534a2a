#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "weldlab/extension.hpp"

using namespace weldlab;

namespace {

ChaosMeasure test_measure(double beta, int level, std::uint64_t seed) {
  const auto f = sample_fourier_field(64, seed);
  return chaos_masses(f, beta, level);
}

}  // namespace

TEST_CASE("identity boundary map extends to the identity") {
  const StripExtension ext(CircleMap::identity(64));
  CHECK(ext.c0() == Catch::Approx(0.0).margin(1e-15));
  CHECK(ext.H_at(0.5) == Catch::Approx(0.125));   // x^2/2
  CHECK(ext.H_at(2.5) == Catch::Approx(3.125));   // periodic continuation
  CHECK(ext.H_at(-0.5) == Catch::Approx(0.125));
  for (double x : {-0.3, 0.0, 0.4, 1.7}) {
    for (double y : {0.1, 0.6, 0.99, 1.5, 2.5}) {
      const auto f = ext.value(x, y);
      CHECK(f.real() == Catch::Approx(x).margin(1e-12));
      CHECK(f.imag() == Catch::Approx(y).margin(1e-12));
      const auto p = ext.partials(x, y);
      CHECK(p.ux == Catch::Approx(1.0).margin(1e-10));
      CHECK(p.uy == Catch::Approx(0.0).margin(1e-10));
      CHECK(p.vx == Catch::Approx(0.0).margin(1e-10));
      CHECK(p.vy == Catch::Approx(1.0).margin(1e-10));
      CHECK(std::abs(ext.mu(x, y)) < 1e-10);
      CHECK(ext.dilatation(x, y) == Catch::Approx(1.0).margin(1e-9));
    }
  }
}

TEST_CASE("analytic partials match central differences") {
  const StripExtension ext{CircleMap(test_measure(0.5, 6, 21))};
  const double d = 1e-5;
  for (auto [x, y] : {std::pair{0.31937, 0.2471113}, std::pair{0.7013, 0.13057},
                      std::pair{0.05231, 0.61219}, std::pair{1.30299, 0.770713}}) {
    const auto p = ext.partials(x, y);
    const auto fxp = ext.value(x + d, y), fxm = ext.value(x - d, y);
    const auto fyp = ext.value(x, y + d), fym = ext.value(x, y - d);
    CHECK(p.ux == Catch::Approx((fxp.real() - fxm.real()) / (2 * d)).margin(1e-4));
    CHECK(p.vx == Catch::Approx((fxp.imag() - fxm.imag()) / (2 * d)).margin(1e-4));
    CHECK(p.uy == Catch::Approx((fyp.real() - fym.real()) / (2 * d)).margin(1e-4));
    CHECK(p.vy == Catch::Approx((fyp.imag() - fym.imag()) / (2 * d)).margin(1e-4));
    const auto mfd = strip_mu_fd(ext, x, y, d);
    CHECK(std::abs(ext.mu(x, y) - mfd) < 1e-4);
  }
}

TEST_CASE("dilatation is contractive throughout the strip") {
  const StripExtension ext{CircleMap(test_measure(0.5, 6, 4))};
  for (int i = 0; i < 24; ++i)
    for (int j = 1; j <= 20; ++j) {
      const double x = double(i) / 24.0;
      const double y = 0.1 * double(j);
      std::complex<double> m;
      CHECK_NOTHROW(m = ext.mu(x, y));
      CHECK(std::abs(m) < 1.0);
      CHECK(ext.jacobian(x, y) > 0.0);
    }
}

TEST_CASE("blend layer onto the identity") {
  const StripExtension ext{CircleMap(test_measure(0.5, 6, 8))};
  const double c0 = ext.c0();
  for (double x : {0.1, 0.62}) {
    // linear interpolation between the averaged map at y=1 and identity at y=2
    const auto f = ext.value(x, 1.25);
    CHECK(f.real() == Catch::Approx(x + 0.75 * c0).margin(1e-13));
    CHECK(f.imag() == 1.25);
    CHECK(std::abs(ext.value(x, 2.5) - std::complex<double>(x, 2.5)) == 0.0);
    // continuity across the layer seams
    CHECK(std::abs(ext.value(x, 1.0 - 1e-9) - ext.value(x, 1.0 + 1e-9)) < 1e-6);
    CHECK(std::abs(ext.value(x, 2.0 - 1e-9) - ext.value(x, 2.0 + 1e-9)) < 1e-6);
    // constant layer dilatation |c0| / sqrt(4 + c0^2)
    const double want = std::abs(c0) / std::sqrt(4.0 + c0 * c0);
    CHECK(std::abs(ext.mu(x, 1.5)) == Catch::Approx(want).margin(1e-14));
  }
  CHECK_THROWS_AS(ext.value(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ext.value(0.5, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(ext.partials(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("pair-ratio field equals its enumeration on uniform masses") {
  // window of w equal masses scores w(w-1)
  CHECK(k_tau_equal_mass_value(0) == 992.0);
  CHECK(k_tau_equal_mass_value(1) == 4032.0);
  CHECK(k_tau_equal_mass_value(2) == 9120.0);
  CHECK(k_tau_equal_mass_value(5) == 9120.0);  // window saturates at 96

  for (int level : {5, 6, 7}) {
    const auto m = test_measure(0.0, level, 1);
    const KTauField kt(m);
    REQUIRE(kt.max_level() == level - 5);
    for (int n = 0; n <= kt.max_level(); ++n)
      for (std::size_t i : {std::size_t(0), kt.intervals(n) / 2, kt.intervals(n) - 1})
        CHECK(kt.interval_value(n, i) == Catch::Approx(k_tau_equal_mass_value(n)).epsilon(1e-12));
  }
}

TEST_CASE("pair-ratio prefix sums match direct enumeration") {
  const auto m = test_measure(0.5, 7, 13);
  const KTauField kt(m);
  for (int level : {0, 1, 2}) {
    for (std::size_t idx : {std::size_t(0), kt.intervals(level) / 2, kt.intervals(level) - 1}) {
      const auto window = k_tau_window_masses(m, level, idx);
      const double oracle = k_tau_enumeration_oracle(window);
      CHECK(kt.interval_value(level, idx) == Catch::Approx(oracle).epsilon(1e-10));
    }
  }
}

TEST_CASE("pair-ratio field bounds and lookup semantics") {
  CHECK_THROWS_AS(KTauField(test_measure(0.5, 4, 1)), std::invalid_argument);
  const auto m = test_measure(0.5, 7, 2);
  const KTauField kt(m);
  CHECK_THROWS_AS(kt.interval_value(3, 0), std::out_of_range);
  CHECK_THROWS_AS(kt.interval_value(-1, 0), std::out_of_range);

  // identity off the strip, clamped to the finest stored level deep down
  CHECK(kt.value(0.3, 2.5) == 1.0);
  CHECK(kt.value(0.3, -0.5) == 1.0);
  const double deep = kt.value(0.33, 0.01);
  CHECK(deep == kt.interval_value(2, std::size_t(0.33 * 4)));
  CHECK(kt.value(0.33, 1.5) == kt.interval_value(0, 0));
  CHECK(kt.value(1.33, 0.7) == kt.value(0.33, 0.7));  // periodic in x

  CHECK(KTauField::level_of_height(0.6) == 0);
  CHECK(KTauField::level_of_height(0.5) == 0);
  CHECK(KTauField::level_of_height(0.49) == 1);
  CHECK(KTauField::level_of_height(0.25) == 2);
  CHECK_THROWS_AS(KTauField::level_of_height(0.0), std::invalid_argument);
  CHECK_THROWS_AS(KTauField::level_of_height(2.1), std::invalid_argument);
}

TEST_CASE("disk chart agrees with the boundary map") {
  const StripExtension strip{CircleMap(test_measure(0.5, 6, 17))};
  const DiskExtension disk(strip);
  for (double x : {0.0, 0.21, 0.5, 0.83}) {
    const auto z = std::polar(1.0, 2.0 * std::numbers::pi * x);
    const auto w = disk.forward(z);
    const auto want = std::polar(1.0, 2.0 * std::numbers::pi * strip.h_at(x));
    CHECK(std::abs(w - want) < 1e-12);
  }
  // identity core |z| <= e^{-4 pi}
  const std::complex<double> core(1e-6, 2e-7);
  CHECK(disk.forward(core) == core);
  CHECK(disk.forward(0.0) == std::complex<double>(0.0));
  CHECK_THROWS_AS(disk.forward({1.2, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(disk.inverse({1.2, 0.0}), std::invalid_argument);

  // chart transfer rotates mu but preserves modulus
  const std::complex<double> z = std::polar(0.6, 1.1);
  const auto w = DiskExtension::strip_coordinate(z);
  CHECK(std::abs(disk.mu(z)) == Catch::Approx(std::abs(strip.mu(w.real(), w.imag()))));
  CHECK(disk.mu({0.0, 0.0}) == std::complex<double>(0.0));
  CHECK(disk.mu({1.5, 0.0}) == std::complex<double>(0.0));
  CHECK(std::abs(disk.mu(core)) == 0.0);
}

TEST_CASE("identity disk extension is the identity") {
  const DiskExtension disk{StripExtension(CircleMap::identity(128))};
  for (double r : {0.05, 0.5, 0.97}) {
    for (int a = 0; a < 8; ++a) {
      const auto z = std::polar(r, 2.0 * std::numbers::pi * a / 8.0);
      CHECK(std::abs(disk.forward(z) - z) < 1e-12);
      CHECK(std::abs(disk.inverse(z) - z) < 1e-10);
    }
  }
}

TEST_CASE("newton inverse round-trips the forward map") {
  const DiskExtension disk{StripExtension(CircleMap(test_measure(0.3, 6, 3)))};
  for (double r : {0.05, 0.3, 0.7, 0.95}) {
    for (int a = 0; a < 16; ++a) {
      const auto z = std::polar(r, 2.0 * std::numbers::pi * (a + 0.37) / 16.0);
      const auto zeta = disk.forward(z);
      const auto back = disk.inverse(zeta, 1e-12);
      CHECK(std::abs(back - z) < 1e-8);
    }
  }
  // boundary targets resolve through the inverse boundary map
  const auto zb = disk.inverse(std::polar(1.0, 0.7));
  CHECK(std::abs(zb) == Catch::Approx(1.0));
  CHECK(std::abs(disk.forward(zb) - std::polar(1.0, 0.7)) < 1e-12);
}

TEST_CASE("dilatation grids index and wrap correctly") {
  const StripExtension ext{CircleMap(test_measure(0.5, 6, 5))};
  const auto f = sample_strip_dilatation(ext, 16, 8);
  REQUIRE(f.nx == 16);
  REQUIRE(f.ny == 8);
  CHECK(f.chart == Chart::strip);
  CHECK(f.k_at(0.3, 5.0) == 1.0);    // above the strip
  CHECK(f.k_at(0.3, -1.0) == 1.0);   // below it
  CHECK(f.k_at(1.3, 0.5) == f.k_at(0.3, 0.5));
  CHECK(f.k_at(0.3, 0.5) >= 1.0);
  CHECK_THROWS_AS(sample_strip_dilatation(ext, 16, 8, 2.0, 1.0), std::invalid_argument);

  std::vector<std::complex<double>> mu(4, {0.5, 0.0});
  const auto g = dilatation_from_mu_grid(mu, 2);
  CHECK(g.chart == Chart::disk);
  CHECK(g.k[0] == Catch::Approx(3.0));
  mu[2] = {1.0, 0.0};
  CHECK_THROWS_AS(dilatation_from_mu_grid(mu, 2), std::runtime_error);
  CHECK_THROWS_AS(dilatation_from_mu_grid(mu, 3), std::invalid_argument);
}

TEST_CASE("disk grid sampling vanishes outside the disk") {
  const DiskExtension disk{StripExtension(CircleMap(test_measure(0.5, 6, 7)))};
  const std::size_t n = 32;
  const auto mu = disk_mu_on_grid(disk, n, 4.0, 4);
  const double h = 4.0 / double(n);
  std::size_t nonzero_inside = 0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const double cx = -2.0 + (double(i) + 0.5) * h;
      const double cy = -2.0 + (double(j) + 0.5) * h;
      const double inner = std::hypot(std::max(0.0, std::abs(cx) - 0.5 * h),
                                      std::max(0.0, std::abs(cy) - 0.5 * h));
      if (inner >= 1.0) CHECK(mu[j * n + i] == std::complex<double>(0.0));
      else if (std::abs(mu[j * n + i]) > 0.0) ++nonzero_inside;
    }
  CHECK(nonzero_inside > 0);
}
