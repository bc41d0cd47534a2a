#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "weldlab/lehto.hpp"

using namespace weldlab;

namespace {

ChaosMeasure test_measure(double beta, int level, std::uint64_t seed) {
  const auto f = sample_fourier_field(64, seed);
  return chaos_masses(f, beta, level);
}

DilatationField constant_field(double mu_real, std::size_t n, double side) {
  return dilatation_from_mu_grid(
      std::vector<std::complex<double>>(n * n, {mu_real, 0.0}), n, side);
}

}  // namespace

TEST_CASE("unit dilatation integrates to the log-radius ratio over 2 pi") {
  const auto f = constant_field(0.0, 16, 10.0);
  const auto e1 = lehto_integral(f, 0.0, 1.0, std::numbers::e, 64, 64);
  CHECK(e1.value == Catch::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-12));
  CHECK(e1.quadrature_error < 1e-12);
  CHECK(e1.n_angular == 128);

  const auto e2 = lehto_integral(f, 0.0, 3.0, 4.0, 64, 64);
  CHECK(e2.value ==
        Catch::Approx(std::log(4.0 / 3.0) / (2.0 * std::numbers::pi)).epsilon(1e-12));

  // log-midpoint panels make the radial rule exactly additive here
  const double s = std::sqrt(std::numbers::e);
  const auto a = lehto_integral(f, 0.0, 1.0, s, 32, 64);
  const auto b = lehto_integral(f, 0.0, s, std::numbers::e, 32, 64);
  CHECK(a.value + b.value == Catch::Approx(e1.value).epsilon(1e-12));
}

TEST_CASE("constant distortion halves the integral") {
  // |mu| = 1/3 gives K = 2 everywhere
  const auto f = constant_field(1.0 / 3.0, 16, 10.0);
  const auto est = lehto_integral(f, 0.0, 1.0, std::numbers::e, 64, 64);
  CHECK(est.value == Catch::Approx(0.5 / (2.0 * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("annuli must stay inside the sampled grid") {
  const auto f = constant_field(0.0, 16, 6.0);
  CHECK_THROWS_AS(lehto_integral(f, 0.0, -1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(lehto_integral(f, 0.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_WITH(lehto_integral(f, {2.9, 0.0}, 0.1, 0.5),
                    Catch::Matchers::ContainsSubstring("right"));
  CHECK_THROWS_WITH(lehto_integral(f, {0.0, -2.9}, 0.1, 0.5),
                    Catch::Matchers::ContainsSubstring("bottom"));
}

TEST_CASE("exact cell arcs match brute-force angular quadrature") {
  const KTauField kt(test_measure(0.5, 10, 31));
  const std::size_t n_brute = std::size_t(1) << 20;
  for (double rho : {0.3, 0.9, 1.7, 2.5}) {
    const double cx = 0.0;
    double brute = 0.0;
    for (std::size_t a = 0; a < n_brute; ++a) {
      const double th = 2.0 * std::numbers::pi * (double(a) + 0.5) / double(n_brute);
      brute += kt.value(cx + rho * std::cos(th), rho * std::sin(th));
    }
    brute *= 2.0 * std::numbers::pi / double(n_brute);
    const double exact = angular_dilatation_integral(kt, cx, rho);
    CHECK(exact == Catch::Approx(brute).epsilon(2e-3));
  }
  CHECK_THROWS_AS(angular_dilatation_integral(kt, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("cell dilatation shrinks the integral below the unit-field value") {
  const KTauField kt(test_measure(0.5, 10, 2));
  const auto est = lehto_integral(kt, 0.0, 0.05, 0.5, 64);
  CHECK(est.n_angular == 0);
  CHECK(est.value > 0.0);
  CHECK(est.value < std::log(10.0) / (2.0 * std::numbers::pi));
  CHECK_THROWS_AS(lehto_integral(kt, 0.0, 0.5, 0.05), std::invalid_argument);
}

TEST_CASE("ring profiles and the two-route consistency bound") {
  const KTauField kt(test_measure(0.5, 10, 6));
  CHECK_THROWS_AS(ring_profile(kt, 1, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(ring_profile(kt, 1, 0.5), std::invalid_argument);  // 2^-1 too coarse
  CHECK_THROWS_AS(ring_profile(kt, 0, 0.25), std::invalid_argument);
  // resolution gate: level-7 measure holds cells down to level 2 only
  CHECK_THROWS_AS(ring_profile(KTauField(test_measure(0.5, 7, 6)), 2, 0.25),
                  std::runtime_error);

  const auto rp = ring_profile(kt, 1, 0.25, 64);
  REQUIRE(rp.radii.size() == 64);
  for (std::size_t i = 0; i < rp.radii.size(); ++i) {
    CHECK(rp.radii[i] > 0.25);
    CHECK(rp.radii[i] < 0.5);
    CHECK(rp.k_of_r[i] > 0.0);
  }
  CHECK(rp.m_n > 0.0);
  CHECK(rp.c_max > 0.0);

  const auto rc = ring_consistency_check(kt, 0.25, 2, 64);
  REQUIRE(rc.m_n.size() == 2);
  CHECK(rc.c == Catch::Approx(2.0 / (3.0 * rc.c_max)));
  CHECK(rc.lehto > 0.0);
  CHECK(rc.holds);
}

TEST_CASE("area-weighted cell sums for the uniform measure") {
  const auto probe = k_integrability_probe(test_measure(0.0, 10, 1));
  REQUIRE(probe.level_sums.size() == 6);
  CHECK(probe.level_sums[0] == Catch::Approx(1488.0).epsilon(1e-12));
  CHECK(probe.level_sums[1] == Catch::Approx(1008.0).epsilon(1e-12));
  CHECK(probe.level_sums[2] == Catch::Approx(1140.0).epsilon(1e-12));
  CHECK(probe.level_sums[3] == Catch::Approx(570.0).epsilon(1e-12));
  CHECK(probe.level_sums[4] == Catch::Approx(285.0).epsilon(1e-12));
  CHECK(probe.level_sums[5] == Catch::Approx(142.5).epsilon(1e-12));
  CHECK(probe.total == Catch::Approx(1488.0 + 1008.0 + 1140.0 + 570.0 + 285.0 + 142.5));
  // window saturation makes the geometric area factor win from level 2 on
  CHECK(probe.level_sums[3] < probe.level_sums[2]);
  CHECK(probe.level_sums[4] < probe.level_sums[3]);
  CHECK(probe.level_sums[5] < probe.level_sums[4]);
}

TEST_CASE("tail sampling is deterministic at zero coupling") {
  const auto samples = lehto_tail_samples(0.0, 0.125, 2, 3, 7, 64, 11);
  REQUIRE(samples.size() == 3);
  for (const auto& row : samples) {
    REQUIRE(row.size() == 2);
    CHECK(row[0] == samples[0][0]);
    CHECK(row[1] == samples[0][1]);
    CHECK(row[0] > 0.0);
  }
  // threshold straddles the deterministic value, so p is exactly 0 or 1
  const double l1 = samples[0][0];
  const auto hit = tail_estimate_from_samples(samples, 1, 1.01 * l1, 0.0, 0.125, 7);
  CHECK(hit.p_hat == 1.0);
  CHECK(hit.hits == 3);
  CHECK(hit.wilson_hi == 1.0);
  const auto miss = tail_estimate_from_samples(samples, 1, 0.99 * l1, 0.0, 0.125, 7);
  CHECK(miss.p_hat == 0.0);
  CHECK(miss.wilson_lo == Catch::Approx(0.0).margin(1e-12));
  CHECK(miss.wilson_hi > 0.0);

  CHECK_THROWS_AS(lehto_tail_samples(0.0, 0.125, 6, 2, 1, 64, 17), std::invalid_argument);
  CHECK_THROWS_AS(lehto_tail_samples(0.0, 0.3, 2, 2, 1, 64, 17), std::invalid_argument);
  CHECK_THROWS_AS(lehto_tail_samples(0.0, 1.0 / 16.0, 2, 1, 1, 64, 10),
                  std::invalid_argument);
}

TEST_CASE("annulus distortion bound in the identity case") {
  CHECK(point_set_diameter({{0.0, 0.0}, {3.0, 0.0}, {0.0, 4.0}}) == 5.0);
  LehtoEstimate flat;
  flat.value = 0.0;
  std::vector<std::complex<double>> inner, outer;
  for (int i = 0; i < 32; ++i) {
    inner.push_back(std::polar(0.5, 2.0 * std::numbers::pi * i / 32.0));
    outer.push_back(std::polar(1.0, 2.0 * std::numbers::pi * i / 32.0));
  }
  const auto chk = annulus_distortion_check(flat, inner, outer);
  CHECK(chk.d_inner == Catch::Approx(1.0));
  CHECK(chk.d_outer == Catch::Approx(2.0));
  CHECK(chk.ratio == Catch::Approx(2.0));
  CHECK(chk.bound == Catch::Approx(1.0 / 16.0));
  CHECK(chk.holds);
  CHECK_THROWS_AS(annulus_distortion_check(flat, {{0.1, 0.1}}, outer), std::runtime_error);
}
