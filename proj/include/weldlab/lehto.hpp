#pragma once

// Lehto integrals over annuli, ring profiles of the cell dilatation field,
// the annulus-distortion lower bound, the L1 integrability probe, and the
// Monte Carlo tail experiment.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "weldlab/extension.hpp"
#include "weldlab/stats.hpp"

namespace weldlab {

struct LehtoEstimate {
  std::complex<double> center;
  double r_inner = 0.0;
  double r_outer = 0.0;
  double value = 0.0;
  double quadrature_error = 0.0;
  int n_radial = 0;
  int n_angular = 0;  // 0 when the angular integral is evaluated exactly
};

/**
 * Nested quadrature of int_r^R [oint K(z + rho e^{i theta}) d theta]^{-1}
 * d rho / rho for an arbitrary pointwise field: radial midpoint rule in
 * log rho, uniform angular midpoints, refinement-doubling error estimate.
 */
template <class KFn>
LehtoEstimate lehto_integral_fn(KFn&& field, std::complex<double> center, double r, double R,
                                int n_radial = 256, int n_angular = 512) {
  if (!(0.0 < r && r < R))
    throw std::invalid_argument("lehto_integral: need 0 < r < R");
  auto pass = [&](int nr, int na) {
    const double dl = std::log(R / r) / double(nr);
    double acc = 0.0;
    for (int k = 0; k < nr; ++k) {
      const double rho = r * std::exp((double(k) + 0.5) * dl);
      double ring = 0.0;
      for (int a = 0; a < na; ++a) {
        const double th = 2.0 * std::numbers::pi * (double(a) + 0.5) / double(na);
        ring += field(center + std::polar(rho, th));
      }
      ring *= 2.0 * std::numbers::pi / double(na);
      acc += dl / ring;
    }
    return acc;
  };
  LehtoEstimate est;
  est.center = center;
  est.r_inner = r;
  est.r_outer = R;
  const double coarse = pass(n_radial, n_angular);
  const double fine = pass(2 * n_radial, 2 * n_angular);
  est.value = fine;
  est.quadrature_error = std::abs(fine - coarse);
  est.n_radial = 2 * n_radial;
  est.n_angular = 2 * n_angular;
  return est;
}

/** Lehto integral over a sampled dilatation grid; rejects annuli that leave it. */
inline LehtoEstimate lehto_integral(const DilatationField& f, std::complex<double> center,
                                    double r, double R, int n_radial = 256,
                                    int n_angular = 512) {
  if (!(0.0 < r && r < R))
    throw std::invalid_argument("lehto_integral: need 0 < r < R");
  if (f.chart == Chart::disk) {
    const char* side = nullptr;
    if (center.real() - R < f.x_min()) side = "left";
    else if (center.real() + R > f.x_max()) side = "right";
    else if (center.imag() - R < f.y_min()) side = "bottom";
    else if (center.imag() + R > f.y_max()) side = "top";
    if (side)
      throw std::invalid_argument(std::string("lehto_integral: outer circle exits the "
                                              "field domain through the ") +
                                  side + " side");
  }
  return lehto_integral_fn([&](std::complex<double> z) { return f.k_at(z.real(), z.imag()); },
                           center, r, R, n_radial, n_angular);
}

namespace detail {

/**
 * Visits every Whitney cell met by the circle |z - cx| = rho (center on the
 * real axis) with its exact angular measure on the upper semicircle.  The
 * band below the finest stored level extends that level's cells to the real
 * axis, matching KTauField::value.
 */
template <class Visitor>
void visit_circle_cells(const KTauField& f, double cx, double rho, Visitor&& visit) {
  const int m = f.max_level();
  struct BandRec {
    double lo, hi;
    int level;
  };
  std::vector<BandRec> bands;
  if (m == 0) {
    bands.push_back({0.0, 2.0, 0});
  } else {
    bands.push_back({0.5, 2.0, 0});
    for (int n = 1; n < m; ++n)
      bands.push_back({std::pow(2.0, -n - 1), std::pow(2.0, -n), n});
    bands.push_back({0.0, std::pow(2.0, -m), m});
  }
  for (const auto& band : bands) {
    const double ylo = band.lo;
    const double yhi = std::min(band.hi, rho);
    if (!(yhi > ylo)) continue;
    const double alo = std::asin(std::min(1.0, ylo / rho));
    const double ahi = std::asin(std::min(1.0, yhi / rho));
    if (!(ahi > alo)) continue;
    const double arcs[2][2] = {{alo, ahi},
                               {std::numbers::pi - ahi, std::numbers::pi - alo}};
    const double scale = std::pow(2.0, band.level);
    const std::size_t count = std::size_t(1) << band.level;
    for (const auto& arc : arcs) {
      const double xlo = cx + rho * std::cos(arc[1]);
      const double xhi = cx + rho * std::cos(arc[0]);
      const long m0 = long(std::floor(xlo * scale));
      const long m1 = long(std::floor(xhi * scale));
      for (long cell = m0; cell <= m1; ++cell) {
        const double xs = std::max(xlo, double(cell) / scale);
        const double xe = std::min(xhi, double(cell + 1) / scale);
        if (!(xe > xs)) continue;
        auto theta = [&](double x) {
          return std::acos(std::clamp((x - cx) / rho, -1.0, 1.0));
        };
        const double measure = theta(xs) - theta(xe);
        if (!(measure > 0.0)) continue;
        const std::size_t idx = std::size_t(((cell % long(count)) + long(count)) % long(count));
        visit(band.level, idx, measure);
      }
    }
  }
}

}  // namespace detail

/** Exact angular integral of the cell field over |z - cx| = rho (full circle). */
inline double angular_dilatation_integral(const KTauField& f, double cx, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("angular_dilatation_integral: rho > 0");
  double acc = std::numbers::pi;  // lower semicircle: identity
  if (rho > 2.0) acc += std::numbers::pi - 2.0 * std::asin(2.0 / rho);
  detail::visit_circle_cells(f, cx, rho, [&](int level, std::size_t idx, double measure) {
    acc += f.interval_value(level, idx) * measure;
  });
  return acc;
}

/**
 * Lehto integral of the cell dilatation field: angular integrals evaluated
 * exactly on cell arcs, radial midpoint rule in log rho with doubling error.
 */
inline LehtoEstimate lehto_integral(const KTauField& f, double center_x, double r, double R,
                                    int n_radial = 256) {
  if (!(0.0 < r && r < R))
    throw std::invalid_argument("lehto_integral: need 0 < r < R");
  auto pass = [&](int nr) {
    const double dl = std::log(R / r) / double(nr);
    double acc = 0.0;
    for (int k = 0; k < nr; ++k) {
      const double rho = r * std::exp((double(k) + 0.5) * dl);
      acc += dl / angular_dilatation_integral(f, center_x, rho);
    }
    return acc;
  };
  LehtoEstimate est;
  est.center = {center_x, 0.0};
  est.r_inner = r;
  est.r_outer = R;
  const double coarse = pass(n_radial);
  const double fine = pass(2 * n_radial);
  est.value = fine;
  est.quadrature_error = std::abs(fine - coarse);
  est.n_radial = 2 * n_radial;
  est.n_angular = 0;
  return est;
}

// ---------------------------------------------------------------------------
// Ring profiles

struct RingProfile {
  int n = 1;
  double rho = 0.25;
  std::vector<double> radii;   // midpoint nodes in (rho^n, 2 rho^n)
  std::vector<double> k_of_r;  // sum |I| K over cells meeting the circle
  double m_n = 0.0;            // int dr / K(r)
  double c_max = 0.0;          // max cell arc measure * r / |I|
};

/**
 * Ring profile K(r) = sum |I| K(I) over Whitney cells meeting the circle of
 * radius r about 0, tabulated across the ring (rho^n, 2 rho^n), together
 * with M_n = int dr/K(r) and the covering constant max_I (theta_I r / |I|)
 * used by the consistency inequality.
 */
inline RingProfile ring_profile(const KTauField& f, int n, double rho, int n_radial = 128) {
  const double p_real = -std::log2(rho);
  const int p = int(std::llround(p_real));
  if (p < 2 || std::abs(std::pow(2.0, -p) - rho) > 1e-12 * rho)
    throw std::invalid_argument("ring_profile: rho must be 2^-p with integer p >= 2");
  if (n < 1) throw std::invalid_argument("ring_profile: n >= 1");
  const int needed = n * p;
  if (f.max_level() < needed)
    throw std::runtime_error("ring_profile: requires measure resolution level " +
                             std::to_string(needed + 5) + ", field holds " +
                             std::to_string(f.max_level() + 5));
  RingProfile out;
  out.n = n;
  out.rho = rho;
  const double r0 = std::pow(rho, n);
  const double dr = r0 / double(n_radial);
  double acc = 0.0;
  for (int i = 0; i < n_radial; ++i) {
    const double r = r0 + (double(i) + 0.5) * dr;
    // collect distinct cells with their total arc measures
    std::vector<std::pair<std::pair<int, std::size_t>, double>> cells;
    detail::visit_circle_cells(f, 0.0, r, [&](int level, std::size_t idx, double measure) {
      for (auto& c : cells)
        if (c.first.first == level && c.first.second == idx) {
          c.second += measure;
          return;
        }
      cells.push_back({{level, idx}, measure});
    });
    double kr = 0.0;
    for (const auto& c : cells) {
      const double width = std::pow(2.0, -c.first.first);
      kr += width * f.interval_value(c.first.first, c.first.second);
      out.c_max = std::max(out.c_max, c.second * r / width);
    }
    out.radii.push_back(r);
    out.k_of_r.push_back(kr);
    acc += dr / kr;
  }
  out.m_n = acc;
  return out;
}

inline RingProfile ring_profile(const ChaosMeasure& m, int n, double rho,
                                int n_radial = 128) {
  return ring_profile(KTauField(m), n, rho, n_radial);
}

struct RingConsistency {
  double lehto = 0.0;     // L(0, rho^N, 2 rho) via exact-arc quadrature
  double sum_m = 0.0;     // sum of ring integrals M_n, n = 1..N
  double c = 0.0;         // geometric constant 2 / (3 c_max)
  double c_max = 0.0;
  std::vector<double> m_n;
  bool holds = false;     // lehto >= c * sum_m
};

/**
 * Independent two-route check: the ring decomposition bounds the Lehto
 * integral below via L >= c sum M_n with c = 2/(3 C), C the largest
 * arc-measure-to-cell-width ratio seen on the sampled circles.  The factor
 * follows from K >= 2 on every cell (the lower semicircle's 2 pi is then
 * at most half the upper cell sum) and theta_I <= C |I| / r.
 */
inline RingConsistency ring_consistency_check(const KTauField& f, double rho, int n_max,
                                              int n_radial = 128) {
  RingConsistency out;
  for (int n = 1; n <= n_max; ++n) {
    const auto rp = ring_profile(f, n, rho, n_radial);
    out.sum_m += rp.m_n;
    out.c_max = std::max(out.c_max, rp.c_max);
    out.m_n.push_back(rp.m_n);
  }
  out.lehto = lehto_integral(f, 0.0, std::pow(rho, n_max), 2.0 * rho).value;
  out.c = 2.0 / (3.0 * out.c_max);
  out.holds = out.lehto >= out.c * out.sum_m;
  return out;
}

// ---------------------------------------------------------------------------
// Annulus distortion bound

inline double point_set_diameter(const std::vector<std::complex<double>>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, std::abs(pts[i] - pts[j]));
  return best;
}

struct DistortionCheck {
  double d_inner = 0.0;
  double d_outer = 0.0;
  double ratio = 0.0;
  double bound = 0.0;  // exp(2 pi^2 L) / 16
  bool holds = false;
};

/**
 * Diameter form of the annulus distortion bound: the image of the outer
 * circle must be at least (1/16) exp(2 pi^2 L) times as wide as the image of
 * the inner circle.
 */
inline DistortionCheck annulus_distortion_check(const LehtoEstimate& lehto,
                                                const std::vector<std::complex<double>>& inner_image,
                                                const std::vector<std::complex<double>>& outer_image) {
  DistortionCheck out;
  out.d_inner = point_set_diameter(inner_image);
  out.d_outer = point_set_diameter(outer_image);
  if (!(out.d_inner > 0.0))
    throw std::runtime_error("annulus_distortion_check: degenerate image annulus "
                             "(inner diameter is zero)");
  out.ratio = out.d_outer / out.d_inner;
  out.bound = std::exp(2.0 * std::numbers::pi * std::numbers::pi * lehto.value) / 16.0;
  out.holds = out.ratio >= out.bound;
  return out;
}

// ---------------------------------------------------------------------------
// Integrability probe

struct IntegrabilityProbe {
  double total = 0.0;
  std::vector<double> level_sums;  // contribution of each Whitney level
};

/** Area-weighted cell sum over [0,1] x (0,2], reported level by level. */
inline IntegrabilityProbe k_integrability_probe(const KTauField& f) {
  IntegrabilityProbe out;
  for (int n = 0; n <= f.max_level(); ++n) {
    const double cell_area = n == 0 ? 1.5 : std::pow(2.0, -2 * n - 1);
    double s = 0.0;
    for (std::size_t i = 0; i < f.intervals(n); ++i) s += f.interval_value(n, i);
    out.level_sums.push_back(cell_area * s);
    out.total += cell_area * s;
  }
  return out;
}

inline IntegrabilityProbe k_integrability_probe(const ChaosMeasure& m) {
  return k_integrability_probe(KTauField(m));
}

// ---------------------------------------------------------------------------
// Tail Monte Carlo

struct TailEstimate {
  double beta = 0.0;
  double rho = 0.125;
  double delta = 0.0;
  int n = 1;            // ring count N; event is L < N delta
  std::size_t hits = 0;
  int reps = 0;
  double p_hat = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  std::uint64_t seed = 0;
};

/**
 * Lehto integrals L(0, rho^n, 2 rho) for n = 1..n_max on shared chaos
 * realizations: one row per replicate, one column per n.
 */
inline std::vector<std::vector<double>> lehto_tail_samples(double beta, double rho,
                                                           int n_max, int reps,
                                                           std::uint64_t seed,
                                                           int n_modes = 4096,
                                                           int level = 17,
                                                           int nodes_per_interval = 8,
                                                           int n_radial = 128) {
  if (n_max < 1 || n_max > 5)
    throw std::invalid_argument("lehto_tail_samples: n_max must be in 1..5");
  if (!(rho >= 1.0 / 16.0 && rho <= 0.25))
    throw std::invalid_argument("lehto_tail_samples: rho must be in [1/16, 1/4]");
  const int deepest = KTauField::level_of_height(std::pow(rho, n_max));
  if (level - 5 < deepest)
    throw std::invalid_argument("lehto_tail_samples: measure resolution level " +
                                std::to_string(deepest + 5) + " required, got " +
                                std::to_string(level));
  std::vector<std::vector<double>> out(
      static_cast<std::size_t>(reps),
      std::vector<double>(static_cast<std::size_t>(n_max)));
  for (int rep = 0; rep < reps; ++rep) {
    const auto field =
        sample_fourier_field(n_modes, seed, substream("tail", std::uint64_t(rep)));
    const auto m = chaos_masses(field, beta, level, nodes_per_interval);
    const KTauField kt(m);
    for (int n = 1; n <= n_max; ++n)
      out[std::size_t(rep)][std::size_t(n - 1)] =
          lehto_integral(kt, 0.0, std::pow(rho, n), 2.0 * rho, n_radial).value;
  }
  return out;
}

/** Wilson-intervalled event frequency P(L < n delta) from a sample matrix. */
inline TailEstimate tail_estimate_from_samples(const std::vector<std::vector<double>>& samples,
                                               int n, double delta, double beta, double rho,
                                               std::uint64_t seed) {
  TailEstimate out;
  out.beta = beta;
  out.rho = rho;
  out.delta = delta;
  out.n = n;
  out.reps = int(samples.size());
  for (const auto& row : samples)
    if (row.at(std::size_t(n - 1)) < double(n) * delta) ++out.hits;
  const auto w = wilson_interval(out.hits, samples.size());
  out.p_hat = w.p_hat;
  out.wilson_lo = w.lo;
  out.wilson_hi = w.hi;
  out.seed = seed;
  return out;
}

/** Empirical P(L < N delta); zero hits still carry a Wilson upper bound. */
inline TailEstimate tail_probability_mc(double beta, double rho, int n, double delta,
                                        int reps, std::uint64_t seed, int n_modes = 4096,
                                        int level = 17, int nodes_per_interval = 8,
                                        int n_radial = 128) {
  const auto samples = lehto_tail_samples(beta, rho, n, reps, seed, n_modes, level,
                                          nodes_per_interval, n_radial);
  return tail_estimate_from_samples(samples, n, delta, beta, rho, seed);
}

}  // namespace weldlab
