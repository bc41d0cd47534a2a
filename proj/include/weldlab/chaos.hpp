#pragma once

// Multiplicative chaos measures built from sampled fields: midpoint-rule
// masses, dyadic aggregation, the induced circle homeomorphism, and the
// statistical probes (moment scaling, negative moments, exact scale
// comparison, regularity of the homeomorphism).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "weldlab/field.hpp"
#include "weldlab/stats.hpp"

namespace weldlab {

inline constexpr double kBetaL2Limit = std::numbers::sqrt2;

/**
 * Normalized chaos masses on the circle.  `node_masses[j]` approximates the
 * measure of the cell [j/G, (j+1)/G); `level` and `nodes_per_interval` record
 * the dyadic target resolution (G = nodes_per_interval * 2^level).
 */
struct ChaosMeasure {
  double beta = 0.0;
  int level = 0;
  int nodes_per_interval = 8;
  std::size_t grid = 0;
  double field_variance = 0.0;
  std::vector<double> node_masses;
  double total = 0.0;
};

/**
 * Midpoint-rule chaos masses exp(beta X - beta^2 Var/2) dx for one field
 * realization.  Rejects beta outside the square-integrable range unless
 * overridden; refuses to silently overflow.
 */
inline ChaosMeasure chaos_masses(const FieldRealization& field, double beta, int level,
                                 int nodes_per_interval = 8,
                                 bool override_beta_guard = false) {
  if (!(beta * beta < 2.0) && !override_beta_guard)
    throw std::invalid_argument(
        "chaos_masses: beta^2 must be < 2 for a square-integrable measure "
        "(set override_beta_guard to proceed)");
  if (level < 0 || nodes_per_interval < 1)
    throw std::invalid_argument("chaos_masses: level >= 0 and nodes_per_interval >= 1");
  ChaosMeasure m;
  m.beta = beta;
  m.level = level;
  m.nodes_per_interval = nodes_per_interval;
  m.grid = std::size_t(nodes_per_interval) << level;
  m.field_variance = field.variance;
  const std::size_t g = m.grid;

  std::vector<double> values;
  const bool pow2 = (g & (g - 1)) == 0;
  if (field.backend == FieldBackend::fourier && pow2 && g > std::size_t(field.n_modes)) {
    values = evaluate_field_grid(field, g, 0.5);
  } else {
    values.resize(g);
    for (std::size_t j = 0; j < g; ++j)
      values[j] = evaluate_field(field, (double(j) + 0.5) / double(g));
  }

  const double shift = 0.5 * beta * beta * field.variance;
  m.node_masses.resize(g);
  for (std::size_t j = 0; j < g; ++j) {
    const double e = beta * values[j] - shift;
    if (e > 700.0)
      throw std::runtime_error("chaos_masses: density exponent overflow at t=" +
                               std::to_string((double(j) + 0.5) / double(g)));
    m.node_masses[j] = std::exp(e) / double(g);
  }
  m.total = pairwise_sum(m.node_masses);
  return m;
}

/** Masses of the 2^level dyadic intervals, by exact block sums. */
inline std::vector<double> interval_masses(const ChaosMeasure& m, int level) {
  if (level < 0 || level > m.level)
    throw std::invalid_argument("interval_masses: level must be in [0, measure level " +
                                std::to_string(m.level) + "]");
  const std::size_t count = std::size_t(1) << level;
  const std::size_t block = m.grid / count;
  std::vector<double> out(count, 0.0);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = pairwise_sum({m.node_masses.data() + i * block, block});
  return out;
}

/** Measure of [lo, hi], 0 <= lo <= hi <= 1, by piecewise-linear node prefix. */
inline double interval_mass(const ChaosMeasure& m, double lo, double hi) {
  if (!(0.0 <= lo && lo <= hi && hi <= 1.0))
    throw std::invalid_argument("interval_mass: need 0 <= lo <= hi <= 1");
  const double g = double(m.grid);
  auto prefix = [&](double x) {
    const double pos = std::min(x * g, g);
    const std::size_t i = std::min(std::size_t(pos), m.grid - 1);
    double s = 0.0;
    for (std::size_t j = 0; j < i; ++j) s += m.node_masses[j];
    return s + (pos - double(i)) * m.node_masses[i];
  };
  return prefix(hi) - prefix(lo);
}

/**
 * Normalized mass homeomorphism h(x) = tau([0,x]) / tau([0,1]) as a
 * piecewise-linear circle map with h(x+1) = h(x)+1.
 */
class CircleMap {
 public:
  CircleMap() = default;

  explicit CircleMap(const ChaosMeasure& m, double min_cell_fraction = 0.0) {
    const std::size_t g = m.grid;
    if (g == 0 || m.total <= 0.0)
      throw std::invalid_argument("CircleMap: empty or massless measure");
    prefix_.resize(g + 1);
    prefix_[0] = 0.0;
    double run = 0.0;
    for (std::size_t j = 0; j < g; ++j) {
      run += m.node_masses[j];
      prefix_[j + 1] = run;
    }
    for (auto& p : prefix_) p /= run;
    prefix_[g] = 1.0;
    min_frac_ = 1.0;
    for (std::size_t j = 0; j < g; ++j)
      min_frac_ = std::min(min_frac_, prefix_[j + 1] - prefix_[j]);
    if (min_frac_ < min_cell_fraction)
      throw std::runtime_error(
          "CircleMap: degenerate knot cell (relative mass " + std::to_string(min_frac_) +
          " < " + std::to_string(min_cell_fraction) +
          "); reduce beta or refine the resolution");
  }

  static CircleMap identity(std::size_t grid) {
    CircleMap h;
    h.prefix_.resize(grid + 1);
    for (std::size_t j = 0; j <= grid; ++j) h.prefix_[j] = double(j) / double(grid);
    h.min_frac_ = 1.0 / double(grid);
    return h;
  }

  std::size_t grid() const { return prefix_.empty() ? 0 : prefix_.size() - 1; }
  double knot(std::size_t i) const { return prefix_.at(i); }
  double min_cell_fraction() const { return min_frac_; }

  double operator()(double x) const {
    const double k = std::floor(x);
    x -= k;
    const std::size_t g = grid();
    const double pos = x * double(g);
    const std::size_t i = std::min(std::size_t(pos), g - 1);
    const double frac = pos - double(i);
    return k + prefix_[i] + frac * (prefix_[i + 1] - prefix_[i]);
  }

  double inverse(double u) const {
    const double k = std::floor(u);
    u -= k;
    const std::size_t g = grid();
    const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), u);
    std::size_t i = std::size_t(std::max<std::ptrdiff_t>(0, it - prefix_.begin() - 1));
    i = std::min(i, g - 1);
    const double cell = prefix_[i + 1] - prefix_[i];
    const double frac = cell > 0.0 ? (u - prefix_[i]) / cell : 0.0;
    return k + (double(i) + std::clamp(frac, 0.0, 1.0)) / double(g);
  }

 private:
  std::vector<double> prefix_;  // h at knots i/g; prefix_[0]=0, prefix_[g]=1
  double min_frac_ = 1.0;
};

// ---------------------------------------------------------------------------
// Moment scaling

struct MomentScalingEstimate {
  double slope = 0.0;          // fitted scaling exponent
  double slope_stderr = 0.0;   // bootstrap standard error over replicates
  double intercept = 0.0;
  std::vector<int> levels;
  std::vector<double> log_size;
  std::vector<double> log_moment;
  bool p_in_l2_range = true;   // p-th moment finite iff p < 2/beta^2
  int reps = 0;
  std::uint64_t seed = 0;
};

/**
 * Fits log E[tau(I)^p] against log|I| over a ladder of dyadic levels.
 * Every replicate is measured once at the finest level and aggregated
 * upward, so the ladder shares realizations.
 */
inline MomentScalingEstimate moment_scaling_estimate(double beta, double p,
                                                     std::vector<int> levels, int reps,
                                                     int n_modes, std::uint64_t seed,
                                                     int n_boot = 200) {
  if (levels.empty() || reps < 2) throw std::invalid_argument("moment_scaling_estimate: need levels and reps >= 2");
  std::sort(levels.begin(), levels.end());
  const int finest = levels.back();
  std::size_t g = std::size_t(8) << finest;
  while (g <= std::size_t(n_modes)) g <<= 1;
  const int nodes = int(g >> finest);

  MomentScalingEstimate out;
  out.levels = levels;
  out.reps = reps;
  out.seed = seed;
  out.p_in_l2_range = beta == 0.0 || p < 2.0 / (beta * beta);

  // per-replicate mean of m^p over intervals, one row per replicate
  std::vector<std::vector<double>> rows(std::size_t(reps),
                                        std::vector<double>(levels.size(), 0.0));
  for (int rep = 0; rep < reps; ++rep) {
    const auto field =
        sample_fourier_field(n_modes, seed, substream("moments", std::uint64_t(rep)));
    const auto m = chaos_masses(field, beta, finest, nodes);
    for (std::size_t li = 0; li < levels.size(); ++li) {
      const auto im = interval_masses(m, levels[li]);
      double acc = 0.0;
      for (const double v : im) acc += std::pow(v, p);
      rows[std::size_t(rep)][li] = acc / double(im.size());
    }
  }

  std::vector<double> xs(levels.size()), ys(levels.size());
  auto slope_of = [&](const std::vector<std::size_t>& pick) {
    for (std::size_t li = 0; li < levels.size(); ++li) {
      double mean = 0.0;
      for (const std::size_t r : pick) mean += rows[r][li];
      mean /= double(pick.size());
      xs[li] = -double(levels[li]) * std::numbers::ln2;  // log |I|
      ys[li] = std::log(mean);
    }
    return linear_fit(xs, ys).slope;
  };

  std::vector<std::size_t> all(static_cast<std::size_t>(reps));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  out.slope = slope_of(all);
  out.log_size.assign(xs.begin(), xs.end());
  out.log_moment.assign(ys.begin(), ys.end());
  {
    std::vector<double> yl(levels.size());
    for (std::size_t li = 0; li < levels.size(); ++li) yl[li] = ys[li];
    const auto fit = linear_fit(out.log_size, yl);
    out.intercept = fit.intercept;
  }
  out.slope_stderr = bootstrap_stderr(
      std::size_t(reps), [&](const std::vector<std::size_t>& pick) { return slope_of(pick); },
      n_boot, CounterRng(seed, substream("moments-boot")));
  return out;
}

// ---------------------------------------------------------------------------
// Negative moments

struct NegativeMomentProbe {
  double beta = 0.0;
  double q = 0.0;
  double lo = 0.0, hi = 0.5;
  std::vector<int> cutoffs;
  std::vector<double> estimate;
  std::vector<double> stderr_of_estimate;
  int reps = 0;
  std::uint64_t seed = 0;
};

/**
 * E[tau(I)^{-q}] along a cutoff ladder with common random numbers: each
 * replicate reuses one coefficient draw, truncated to every cutoff.
 */
inline NegativeMomentProbe negative_moment_probe(double beta, double q,
                                                 std::vector<int> cutoffs, int reps,
                                                 std::uint64_t seed, double lo = 0.0,
                                                 double hi = 0.5, int level = 6,
                                                 int nodes_per_interval = 8) {
  if (cutoffs.empty() || reps < 2) throw std::invalid_argument("negative_moment_probe: need cutoffs and reps >= 2");
  if (q < 0.0) throw std::invalid_argument("negative_moment_probe: q >= 0");
  std::sort(cutoffs.begin(), cutoffs.end());
  NegativeMomentProbe out;
  out.beta = beta;
  out.q = q;
  out.lo = lo;
  out.hi = hi;
  out.cutoffs = cutoffs;
  out.reps = reps;
  out.seed = seed;

  const int n_max = cutoffs.back();
  std::vector<std::vector<double>> samples(cutoffs.size());
  for (auto& v : samples) v.reserve(std::size_t(reps));

  for (int rep = 0; rep < reps; ++rep) {
    const auto full =
        sample_fourier_field(n_max, seed, substream("negmom", std::uint64_t(rep)));
    for (std::size_t ci = 0; ci < cutoffs.size(); ++ci) {
      FieldRealization f = full;  // coefficient prefix = coupled lower cutoff
      f.n_modes = cutoffs[ci];
      f.coef_a.resize(std::size_t(cutoffs[ci]));
      f.coef_b.resize(std::size_t(cutoffs[ci]));
      f.variance = variance_truncated(cutoffs[ci]);
      const auto m = chaos_masses(f, beta, level, nodes_per_interval);
      samples[ci].push_back(std::pow(interval_mass(m, lo, hi), -q));
    }
  }
  for (std::size_t ci = 0; ci < cutoffs.size(); ++ci) {
    out.estimate.push_back(mean(samples[ci]));
    out.stderr_of_estimate.push_back(stderr_of_mean(samples[ci]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact scale comparison

struct ScalingProbeResult {
  double ks = 0.0;
  double ks_critical = 0.0;
  double lambda = 0.5;
  double rho = 0.5;
  double alpha = 0.05;
  int bands = 0;
  int shift = 0;      // lambda = rho^shift
  int reps = 0;
  std::size_t grid = 0;
  std::uint64_t seed = 0;
  bool consistent = false;  // ks < ks_critical
};

namespace detail {

/** Field from an explicit list of bands, one substream per band. */
inline std::vector<double> band_sum_field(const std::vector<Band>& bands, std::size_t grid,
                                          std::uint64_t seed, std::uint64_t stream,
                                          double& variance) {
  std::vector<double> x(grid, 0.0);
  variance = 0.0;
  for (std::size_t k = 0; k < bands.size(); ++k) {
    const std::uint64_t sk = splitmix64(stream ^ splitmix64(k + 1));
    const auto b = sample_single_band(bands[k], grid, seed, sk);
    for (std::size_t j = 0; j < grid; ++j) x[j] += b[j];
    variance += band_covariance_closed(bands[k], 0.0);
  }
  return x;
}

/** Band-field mass of [0, len] with the exact lognormal normalization. */
inline double band_prefix_mass(const std::vector<double>& x, double beta, double variance,
                               double len) {
  const std::size_t g = x.size();
  const double shift = 0.5 * beta * beta * variance;
  const std::size_t n = std::size_t(std::llround(len * double(g)));
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += std::exp(beta * x[j] - shift);
  return acc / double(g);
}

}  // namespace detail

/**
 * Compares tau([0, r]) of an L-band measure against lambda^{-1} tau([0,
 * lambda r]) of the lambda-dilated band measure.  The dilated bands have
 * exactly the base covariance under rescaled lags, so the two laws agree in
 * the continuum; a two-sample KS test quantifies agreement.  lambda must be
 * an integer power of rho so the dilated ladder stays inside the cone.
 */
inline ScalingProbeResult scaling_ratio_probe(double beta, double lambda, double rho,
                                              int bands, int reps, std::size_t grid,
                                              std::uint64_t seed, double r = 0.5,
                                              double alpha = 0.05) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("scaling_ratio_probe: lambda in (0,1)");
  const double s_real = std::log(lambda) / std::log(rho);
  const int s = int(std::llround(s_real));
  if (s < 1 || std::abs(std::pow(rho, s) - lambda) > 1e-12 * lambda)
    throw std::invalid_argument(
        "scaling_ratio_probe: lambda must be a positive integer power of rho");

  const auto base_bands = band_ladder(rho, bands);
  std::vector<Band> scaled_bands;
  scaled_bands.reserve(base_bands.size());
  for (const auto& b : base_bands) scaled_bands.push_back({lambda * b.lo, lambda * b.hi});

  // match nodes-per-finest-scale across arms
  std::size_t scaled_grid = grid;
  while (double(scaled_grid) * lambda < double(grid) && scaled_grid < (std::size_t(1) << 22))
    scaled_grid <<= 1;

  std::vector<double> t_base(static_cast<std::size_t>(reps));
  std::vector<double> t_scaled(static_cast<std::size_t>(reps));
  for (int rep = 0; rep < reps; ++rep) {
    double var_b = 0.0, var_s = 0.0;
    const auto xb = detail::band_sum_field(base_bands, grid, seed,
                                           substream("scale-base", std::uint64_t(rep)), var_b);
    const auto xs = detail::band_sum_field(scaled_bands, scaled_grid, seed,
                                           substream("scale-dilated", std::uint64_t(rep)), var_s);
    t_base[std::size_t(rep)] = detail::band_prefix_mass(xb, beta, var_b, r);
    t_scaled[std::size_t(rep)] =
        detail::band_prefix_mass(xs, beta, var_s, lambda * r) / lambda;
  }

  ScalingProbeResult out;
  out.lambda = lambda;
  out.rho = rho;
  out.alpha = alpha;
  out.bands = bands;
  out.shift = s;
  out.reps = reps;
  out.grid = grid;
  out.seed = seed;
  out.ks = ks_two_sample(t_base, t_scaled);
  out.ks_critical = ks_critical(alpha, std::size_t(reps), std::size_t(reps));
  out.consistent = out.ks < out.ks_critical;
  return out;
}

// ---------------------------------------------------------------------------
// Regularity of the homeomorphism

struct HolderProbe {
  double exponent = 0.0;       // slope of log max-increment vs log scale
  std::vector<double> scales;
  std::vector<double> max_increment;
};

/** Crude Holder exponent of h from max dyadic increments. */
inline HolderProbe holder_exponent_probe(const CircleMap& h, int k_min = 4, int k_max = 10,
                                         std::size_t n_samples = 1024) {
  HolderProbe out;
  std::vector<double> lx, ly;
  for (int k = k_min; k <= k_max; ++k) {
    const double s = std::pow(2.0, -k);
    double worst = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
      const double x = double(i) / double(n_samples);
      worst = std::max(worst, h(x + s) - h(x));
    }
    out.scales.push_back(s);
    out.max_increment.push_back(worst);
    lx.push_back(std::log(s));
    ly.push_back(std::log(worst));
  }
  out.exponent = linear_fit(lx, ly).slope;
  return out;
}

struct QuasisymmetryProbe {
  double max_ratio = 1.0;  // sup over x, s of symmetric increment ratio
  double argmax_x = 0.0;
  double argmax_scale = 0.0;
};

/** Largest symmetric increment ratio of h over dyadic scales. */
inline QuasisymmetryProbe quasisymmetry_probe(const CircleMap& h, int k_min = 2,
                                              int k_max = 10,
                                              std::size_t n_samples = 1024) {
  QuasisymmetryProbe out;
  for (int k = k_min; k <= k_max; ++k) {
    const double s = std::pow(2.0, -k);
    for (std::size_t i = 0; i < n_samples; ++i) {
      const double x = double(i) / double(n_samples);
      const double up = h(x + s) - h(x);
      const double dn = h(x) - h(x - s);
      if (!(up > 0.0) || !(dn > 0.0)) continue;
      const double ratio = std::max(up / dn, dn / up);
      if (ratio > out.max_ratio) {
        out.max_ratio = ratio;
        out.argmax_x = x;
        out.argmax_scale = s;
      }
    }
  }
  return out;
}

}  // namespace weldlab
