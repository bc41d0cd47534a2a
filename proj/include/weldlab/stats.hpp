#pragma once

// Order-deterministic statistical reductions and the estimators shared by
// the Monte Carlo suites: pairwise summation, Wilson score intervals,
// two-sample Kolmogorov-Smirnov, least-squares fits with bootstrap errors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "weldlab/rng.hpp"

namespace weldlab {

/** Pairwise (cascade) summation; error grows like log n instead of n. */
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean: empty sample");
  return pairwise_sum(v) / double(v.size());
}

/** Unbiased sample variance (two-pass, pairwise-summed). */
inline double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("sample_variance: need n >= 2");
  const double m = mean(v);
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m) * (v[i] - m);
  return pairwise_sum(sq) / double(v.size() - 1);
}

/** Standard error of the sample mean. */
inline double stderr_of_mean(std::span<const double> v) {
  return std::sqrt(sample_variance(v) / double(v.size()));
}

struct WilsonInterval {
  double p_hat = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/** Wilson score interval for a binomial proportion (default 95%). */
inline WilsonInterval wilson_interval(std::size_t hits, std::size_t n,
                                      double z = 1.959963984540054) {
  if (n == 0) throw std::invalid_argument("wilson_interval: n = 0");
  const double p = double(hits) / double(n);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / double(n);
  const double center = (p + z2 / (2.0 * double(n))) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / double(n) + z2 / (4.0 * double(n) * double(n))) / denom;
  return {p, std::max(0.0, center - half), std::min(1.0, center + half)};
}

/** Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|. */
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    // advance past the whole tie group before comparing the step functions
    const double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] == x) ++ia;
    while (ib < b.size() && b[ib] == x) ++ib;
    d = std::max(d, std::abs(double(ia) / a.size() - double(ib) / b.size()));
  }
  return d;
}

/** Asymptotic two-sample KS critical value at significance alpha. */
inline double ks_critical(double alpha, std::size_t na, std::size_t nb) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(double(na + nb) / (double(na) * double(nb)));
}

/** Linear interpolation quantile (input need not be sorted). */
inline double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(v.begin(), v.end());
  const double pos = p * double(v.size() - 1);
  const std::size_t i = std::size_t(std::clamp(pos, 0.0, double(v.size() - 1)));
  if (i + 1 >= v.size()) return v.back();
  const double t = pos - double(i);
  return v[i] * (1.0 - t) + v[i + 1] * t;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;  // from residual scatter
  double residual_rms = 0.0;
};

/** Ordinary least squares y = slope*x + intercept. */
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("linear_fit: bad sizes");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.residual_rms = std::sqrt(ss / double(n));
  f.slope_stderr = (n > 2) ? std::sqrt(ss / double(n - 2) / sxx) : 0.0;
  return f;
}

/**
 * Bootstrap standard error of a statistic computed from per-replicate rows.
 * `stat` maps a vector of row indices to the statistic value; resampling is
 * driven by a counter stream so the estimate is reproducible.
 */
template <typename Stat>
double bootstrap_stderr(std::size_t n_rows, const Stat& stat, std::size_t n_boot,
                        const CounterRng& rng) {
  if (n_rows == 0 || n_boot < 2) throw std::invalid_argument("bootstrap_stderr: bad sizes");
  std::vector<double> vals(n_boot);
  std::vector<std::size_t> idx(n_rows);
  for (std::size_t b = 0; b < n_boot; ++b) {
    for (std::size_t i = 0; i < n_rows; ++i) {
      const double u = rng.uniform(b * n_rows + i);
      idx[i] = std::min(n_rows - 1, std::size_t(u * double(n_rows)));
    }
    vals[b] = stat(idx);
  }
  const double m = mean(vals);
  double ss = 0.0;
  for (double v : vals) ss += (v - m) * (v - m);
  return std::sqrt(ss / double(n_boot - 1));
}

}  // namespace weldlab
