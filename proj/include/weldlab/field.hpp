#pragma once

// Gaussian field samplers on the circle: the Fourier-series backend for the
// log-correlated trace field X and the scale-decomposed white-noise band
// backend, together with their covariance oracles.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "weldlab/fft.hpp"
#include "weldlab/quadrature.hpp"
#include "weldlab/rng.hpp"

namespace weldlab {

enum class FieldBackend { fourier, band };

/** Harmonic partial sum; the pointwise variance of the N-mode field. */
inline double variance_truncated(int n_modes) {
  double s = 0.0;
  for (int n = n_modes; n >= 1; --n) s += 1.0 / double(n);
  return s;
}

/** Truncated covariance sum_{n<=N} cos(2 pi n d)/n. */
inline double covariance_truncated(int n_modes, double d) {
  double s = 0.0;
  for (int n = n_modes; n >= 1; --n)
    s += std::cos(2.0 * std::numbers::pi * double(n) * d) / double(n);
  return s;
}

/** Untruncated covariance kernel log(1/(2 sin(pi d))), 0 < d < 1. */
inline double covariance_oracle_trace(double d) {
  if (!(d > 0.0 && d < 1.0))
    throw std::invalid_argument("covariance_oracle_trace: lag must be in (0,1)");
  return -std::log(2.0 * std::sin(std::numbers::pi * d));
}

/** One scale band (y_lo, y_hi) of the white-noise decomposition. */
struct Band {
  double lo = 0.0;
  double hi = 0.0;
};

/** Band ladder (rho^{k+1/2}, rho^{k-1/2}) for k = 1..levels, capped at 1/2. */
inline std::vector<Band> band_ladder(double rho, int levels) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("band_ladder: rho in (0,1)");
  std::vector<Band> out;
  out.reserve(std::size_t(levels));
  for (int k = 1; k <= levels; ++k)
    out.push_back({std::pow(rho, k + 0.5), std::min(std::pow(rho, k - 0.5), 0.5)});
  return out;
}

/** Closed-form band covariance at lag d (valid for bands inside y < 1/2). */
inline double band_covariance_closed(const Band& band, double d) {
  d = std::abs(d);
  const double b = band.hi;
  const double m = std::max(band.lo, d);
  if (m >= b) return 0.0;
  return std::log(b / m) + d / b - d / m;
}

/**
 * Numeric band covariance: hyperbolic-area integral of the overlap of two
 * shifted cones restricted to the band, evaluated by adaptive quadrature
 * with exact cross-section intersection tests.  Oracle for the closed form
 * and for sampled covariances.
 */
inline QuadResult band_covariance_numeric(const Band& band, double d, double tol = 1e-12) {
  if (!(band.lo > 0.0 && band.lo < band.hi))
    throw std::invalid_argument("band_covariance_numeric: need 0 < y_lo < y_hi");
  d = std::abs(d);
  const double y_hi = std::min(band.hi, 0.5);  // the cone lives below 1/2
  auto integrand = [d](double y) {
    // cross-sections (-y/2, y/2) and (d - y/2, d + y/2)
    const double lo = std::max(-0.5 * y, d - 0.5 * y);
    const double hi = std::min(0.5 * y, d + 0.5 * y);
    return std::max(0.0, hi - lo) / (y * y);
  };
  QuadResult out;
  if (band.lo >= y_hi) return out;
  // split at the kink y = d so Simpson sees smooth pieces
  const double split = std::clamp(d, band.lo, y_hi);
  const QuadResult a = adaptive_simpson(integrand, band.lo, split, 0.5 * tol);
  const QuadResult b = adaptive_simpson(integrand, split, y_hi, 0.5 * tol);
  out.value = a.value + b.value;
  out.error = a.error + b.error;
  out.converged = a.converged && b.converged;
  if (!out.converged)
    throw std::runtime_error("band_covariance_numeric: quadrature did not converge");
  return out;
}

/**
 * One sampled field realization on the circle.  Fourier backend stores the
 * mode coefficients; band backend stores the per-cell spectral draws realized
 * on its sampling grid.
 */
struct FieldRealization {
  FieldBackend backend = FieldBackend::fourier;
  int n_modes = 0;              // Fourier cutoff N
  int levels = 0;               // band count
  double rho = 0.5;             // band scale ratio
  std::size_t band_grid = 0;    // band sampling grid size G
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> coef_a;   // A_n (fourier)
  std::vector<double> coef_b;   // B_n (fourier)
  std::vector<double> band_values;  // field at t_j = j/G (band)
  double variance = 0.0;        // Var X(t), constant in t by stationarity
};

/** Draw the N-mode Fourier field from the (seed, stream) counter stream. */
inline FieldRealization sample_fourier_field(int n_modes, std::uint64_t seed,
                                             std::uint64_t stream = substream("fourier")) {
  if (n_modes < 0) throw std::invalid_argument("sample_fourier_field: n_modes >= 0");
  FieldRealization r;
  r.backend = FieldBackend::fourier;
  r.n_modes = n_modes;
  r.seed = seed;
  r.stream = stream;
  r.coef_a.resize(std::size_t(n_modes));
  r.coef_b.resize(std::size_t(n_modes));
  const CounterRng rng(seed, stream);
  for (int n = 1; n <= n_modes; ++n) {
    r.coef_a[std::size_t(n - 1)] = rng.normal(std::uint64_t(2 * (n - 1)));
    r.coef_b[std::size_t(n - 1)] = rng.normal(std::uint64_t(2 * (n - 1) + 1));
  }
  r.variance = variance_truncated(n_modes);
  return r;
}

namespace detail {

/** Exact circulant synthesis of a stationary field with circular covariance c. */
inline std::vector<double> circulant_sample(const std::vector<double>& c,
                                            const CounterRng& rng) {
  const std::size_t g = c.size();
  std::vector<std::complex<double>> w(g);
  for (std::size_t j = 0; j < g; ++j) w[j] = c[j];
  fft_1d(w, false);
  double lam_max = 0.0;
  for (const auto& z : w) lam_max = std::max(lam_max, z.real());
  for (std::size_t k = 0; k < g; ++k) {
    const double lam = w[k].real();
    if (lam < -1e-9 * std::max(1.0, lam_max))
      throw std::runtime_error("circulant_sample: covariance spectrum negative");
    const double s = std::sqrt(std::max(0.0, lam));
    w[k] = std::complex<double>(s * rng.normal(2 * k), s * rng.normal(2 * k + 1));
  }
  fft_1d(w, true);
  std::vector<double> x(g);
  const double scale = std::sqrt(double(g));
  for (std::size_t j = 0; j < g; ++j) x[j] = w[j].real() * scale;
  return x;
}

}  // namespace detail

/** Sample one band as a stationary field on a G-point circle grid. */
inline std::vector<double> sample_single_band(const Band& band, std::size_t grid,
                                              std::uint64_t seed, std::uint64_t stream) {
  if (grid == 0 || (grid & (grid - 1)) != 0)
    throw std::invalid_argument("sample_single_band: grid must be a power of two");
  if (band.hi > 0.5 + 1e-15)
    throw std::invalid_argument("sample_single_band: band must lie below height 1/2");
  std::vector<double> c(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    const double t = double(j) / double(grid);
    c[j] = band_covariance_closed(band, std::min(t, 1.0 - t));
  }
  return detail::circulant_sample(c, CounterRng(seed, stream));
}

/**
 * Truncated white-noise field: sum of `levels` independent bands realized on
 * a common grid.  Each band draws from its own substream.
 */
inline FieldRealization sample_band_field(int levels, std::uint64_t seed,
                                          std::size_t grid = 8192, double rho = 0.5,
                                          std::uint64_t stream = substream("band")) {
  if (levels < 0) throw std::invalid_argument("sample_band_field: levels >= 0");
  FieldRealization r;
  r.backend = FieldBackend::band;
  r.levels = levels;
  r.rho = rho;
  r.band_grid = grid;
  r.seed = seed;
  r.stream = stream;
  r.band_values.assign(grid, 0.0);
  r.variance = 0.0;
  const auto ladder = band_ladder(rho, levels);
  for (int k = 0; k < levels; ++k) {
    const std::uint64_t sk = splitmix64(stream ^ splitmix64(std::uint64_t(k) + 1));
    const auto x = sample_single_band(ladder[std::size_t(k)], grid, seed, sk);
    for (std::size_t j = 0; j < grid; ++j) r.band_values[j] += x[j];
    r.variance += band_covariance_closed(ladder[std::size_t(k)], 0.0);
  }
  return r;
}

/** Pointwise field value at t (period 1). */
inline double evaluate_field(const FieldRealization& r, double t) {
  t -= std::floor(t);
  if (r.backend == FieldBackend::fourier) {
    double s = 0.0;
    for (int n = r.n_modes; n >= 1; --n) {
      const double a = 2.0 * std::numbers::pi * double(n) * t;
      s += (r.coef_a[std::size_t(n - 1)] * std::cos(a) +
            r.coef_b[std::size_t(n - 1)] * std::sin(a)) /
           std::sqrt(double(n));
    }
    return s;
  }
  // band backend: linear interpolation between grid nodes t_j = j/G
  const double g = double(r.band_grid);
  const double pos = t * g;
  const std::size_t j0 = std::size_t(pos) % r.band_grid;
  const std::size_t j1 = (j0 + 1) % r.band_grid;
  const double frac = pos - std::floor(pos);
  return r.band_values[j0] * (1.0 - frac) + r.band_values[j1] * frac;
}

inline std::vector<double> evaluate_field(const FieldRealization& r,
                                          const std::vector<double>& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = evaluate_field(r, grid[i]);
  return out;
}

/**
 * Field on the uniform grid t_j = (j + offset)/G via one FFT.
 * Fourier backend only; requires G > N so no mode aliases.
 */
inline std::vector<double> evaluate_field_grid(const FieldRealization& r, std::size_t grid,
                                               double offset = 0.5) {
  if (r.backend != FieldBackend::fourier)
    throw std::invalid_argument("evaluate_field_grid: fourier backend only");
  if (grid <= std::size_t(r.n_modes))
    throw std::invalid_argument("evaluate_field_grid: grid must exceed n_modes");
  std::vector<std::complex<double>> a(grid, 0.0);
  for (int n = 1; n <= r.n_modes; ++n) {
    const std::complex<double> c(r.coef_a[std::size_t(n - 1)], -r.coef_b[std::size_t(n - 1)]);
    const double ph = 2.0 * std::numbers::pi * double(n) * offset / double(grid);
    a[std::size_t(n)] = c / std::sqrt(double(n)) * std::complex<double>(std::cos(ph), std::sin(ph));
  }
  fft_1d(a, true);
  std::vector<double> x(grid);
  for (std::size_t j = 0; j < grid; ++j) x[j] = a[j].real() * double(grid);
  return x;
}

}  // namespace weldlab
