#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <vector>

#include "weldlab/rng.hpp"
#include "weldlab/stats.hpp"

using namespace weldlab;

TEST_CASE("pairwise sum agrees with exact totals") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  CHECK(pairwise_sum(v) == 5050.0);

  std::vector<double> alt(4097);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
  CHECK(pairwise_sum(alt) == 1.0);
}

TEST_CASE("mean and variance on a known sample") {
  const std::vector<double> v{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  CHECK(mean(v) == Catch::Approx(5.0));
  CHECK(sample_variance(v) == Catch::Approx(32.0 / 7.0));
  CHECK(stderr_of_mean(v) == Catch::Approx(std::sqrt(32.0 / 7.0 / 8.0)));
  CHECK_THROWS_AS(mean(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(sample_variance(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("wilson interval matches the standard 8/10 value") {
  const auto w = wilson_interval(8, 10);
  CHECK(w.p_hat == Catch::Approx(0.8));
  CHECK(w.lo == Catch::Approx(0.4902).margin(1e-3));
  CHECK(w.hi == Catch::Approx(0.9433).margin(1e-3));

  const auto zero = wilson_interval(0, 50);
  CHECK(zero.p_hat == 0.0);
  CHECK(zero.lo == Catch::Approx(0.0).margin(1e-12));
  CHECK(zero.hi > 0.0);
  const auto full = wilson_interval(50, 50);
  CHECK(full.hi == 1.0);
  CHECK(full.lo < 1.0);
  CHECK_THROWS_AS(wilson_interval(0, 0), std::invalid_argument);
}

TEST_CASE("two-sample ks statistic") {
  std::vector<double> a{0.1, 0.2, 0.3, 0.4};
  CHECK(ks_two_sample(a, a) == 0.0);
  std::vector<double> b{10.0, 11.0, 12.0, 13.0};
  CHECK(ks_two_sample(a, b) == 1.0);
  CHECK_THROWS_AS(ks_two_sample({}, a), std::invalid_argument);

  const double crit = ks_critical(0.05, 100, 100);
  CHECK(crit == Catch::Approx(std::sqrt(-0.5 * std::log(0.025)) * std::sqrt(0.02)));
}

TEST_CASE("quantile interpolates between order statistics") {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK(quantile(v, 0.5) == Catch::Approx(2.5));
  CHECK(quantile(v, 0.25) == Catch::Approx(1.75));
  CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
}

TEST_CASE("linear fit recovers an exact line") {
  std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0};
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 3.0 * x[i] - 2.0;
  const auto f = linear_fit(x, y);
  CHECK(f.slope == Catch::Approx(3.0).epsilon(1e-12));
  CHECK(f.intercept == Catch::Approx(-2.0).margin(1e-12));
  CHECK(f.residual_rms == Catch::Approx(0.0).margin(1e-12));
  CHECK(f.slope_stderr == Catch::Approx(0.0).margin(1e-12));

  std::vector<double> flat{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(linear_fit(flat, flat), std::invalid_argument);
}

TEST_CASE("bootstrap stderr is reproducible and sane") {
  std::vector<double> rows(64);
  const CounterRng gen(5, substream("rows"));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = gen.normal(i);
  const auto stat = [&](const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (auto i : idx) s += rows[i];
    return s / double(idx.size());
  };
  const CounterRng r1(9, substream("boot"));
  const CounterRng r2(9, substream("boot"));
  const double s1 = bootstrap_stderr(rows.size(), stat, 300, r1);
  const double s2 = bootstrap_stderr(rows.size(), stat, 300, r2);
  CHECK(s1 == s2);
  // should track the analytic SE of the mean within a factor of two
  const double se = stderr_of_mean(rows);
  CHECK(s1 > 0.5 * se);
  CHECK(s1 < 2.0 * se);
}
