#pragma once

// Spectral solver for the disk-supported Beltrami equation, welding-curve
// extraction, the conformal factors f_plus / f_minus, the welding
// round-trip, and curve regularity estimates.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "weldlab/extension.hpp"
#include "weldlab/fft.hpp"

namespace weldlab {

// ---------------------------------------------------------------------------
// Padded Fourier multipliers

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/**
 * Applies a Fourier multiplier on a pad-times-enlarged periodic torus:
 * the n x n field (grid spacing side/n) is zero-embedded, transformed,
 * multiplied by symbol(kappa) with kappa the complex lattice frequency,
 * and restricted back.  Padding >= 2 keeps wraparound images of the
 * convolution kernels at distance >= side from the data block.
 */
template <class SymbolFn>
std::vector<std::complex<double>> apply_padded_symbol(
    const std::vector<std::complex<double>>& g, std::size_t n, double side, int pad,
    SymbolFn&& symbol) {
  if (!is_pow2(n)) throw std::invalid_argument("spectral transform: grid must be a power of two");
  if (pad < 2) throw std::invalid_argument("spectral transform: padding factor must be >= 2");
  if (g.size() != n * n) throw std::invalid_argument("spectral transform: field size mismatch");
  const std::size_t p = n * std::size_t(pad);
  const double torus = side * double(pad);
  std::vector<std::complex<double>> a(p * p, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) a[j * p + i] = g[j * n + i];
  fft_2d(a, p, p, false);
  const double base = 2.0 * std::numbers::pi / torus;
  for (std::size_t my = 0; my < p; ++my) {
    const double ky = base * (my <= p / 2 ? double(my) : double(my) - double(p));
    for (std::size_t mx = 0; mx < p; ++mx) {
      const double kx = base * (mx <= p / 2 ? double(mx) : double(mx) - double(p));
      if (mx == 0 && my == 0) {
        a[my * p + mx] = 0.0;
        continue;
      }
      a[my * p + mx] *= symbol(std::complex<double>(kx, ky));
    }
  }
  fft_2d(a, p, p, true);
  std::vector<std::complex<double>> out(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) out[j * n + i] = a[j * p + i];
  return out;
}

inline std::complex<double> grid_node(std::size_t i, std::size_t j, std::size_t n,
                                      double side) {
  const double h = side / double(n);
  return {-0.5 * side + (double(i) + 0.5) * h, -0.5 * side + (double(j) + 0.5) * h};
}

/** Dense complex solve by Gaussian elimination with partial pivoting. */
inline std::vector<std::complex<double>> solve_dense(std::vector<std::complex<double>> a,
                                                     std::vector<std::complex<double>> b,
                                                     std::size_t n) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (std::abs(a[piv * n + col]) == 0.0)
      throw std::runtime_error("solve_dense: singular moment system");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const std::complex<double> m = a[r * n + col] / a[col * n + col];
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= m * a[col * n + c];
      b[r] -= m * b[col];
    }
  }
  std::vector<std::complex<double>> x(n);
  for (std::size_t r = n; r-- > 0;) {
    std::complex<double> s = b[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
    x[r] = s / a[r * n + r];
  }
  return x;
}

}  // namespace detail

/**
 * Beurling transform on an n x n cell-centered field over a side x side
 * square: Fourier multiplier conj(kappa)/kappa on a zero-padded torus,
 * zero frequency annihilated.
 */
inline std::vector<std::complex<double>> beurling_transform(
    const std::vector<std::complex<double>>& g, std::size_t n, double side = 4.0,
    int pad = 2) {
  return detail::apply_padded_symbol(g, n, side, pad, [](std::complex<double> k) {
    return std::conj(k) / k;
  });
}

/**
 * Periodic Cauchy transform (inverse of d/dzbar, mean annihilated) by the
 * multiplier 2/(i kappa).  Accurate for fields whose low moments vanish;
 * solve_beltrami subtracts disk-power templates first.
 */
inline std::vector<std::complex<double>> cauchy_transform_torus(
    const std::vector<std::complex<double>>& g, std::size_t n, double side = 4.0,
    int pad = 2) {
  return detail::apply_padded_symbol(g, n, side, pad, [](std::complex<double> k) {
    return 2.0 / (std::complex<double>(0.0, 1.0) * k);
  });
}

/** Exact Cauchy transform of zbar^k restricted to the unit disk. */
inline std::complex<double> cauchy_disk_power(int k, std::complex<double> z) {
  const double kk = double(k + 1);
  if (std::abs(z) <= 1.0) return std::pow(std::conj(z), k + 1) / kk;
  return std::pow(z, -(k + 1)) / kk;
}

// ---------------------------------------------------------------------------
// Plane map grids

/**
 * Solved plane map on cell centers of a side x side computational square;
 * normalized f(z) = z + o(1) at infinity.
 */
struct PlaneMapGrid {
  std::size_t n = 0;
  double side = 4.0;
  std::vector<std::complex<double>> f;   // row-major [jy*n + jx]
  std::vector<std::complex<double>> mu;  // dilatation actually solved with
  double residual = 0.0;                 // final L2 defect of dbar f - mu df
  int iterations = 0;
  double mu_inf = 0.0;

  double spacing() const { return side / double(n); }
  std::complex<double> node(std::size_t i, std::size_t j) const {
    return detail::grid_node(i, j, n, side);
  }

  /** Bilinear interpolation between cell centers (clamped at the rim). */
  std::complex<double> value_at(std::complex<double> z) const {
    const double h = spacing();
    const double gx = (z.real() + 0.5 * side) / h - 0.5;
    const double gy = (z.imag() + 0.5 * side) / h - 0.5;
    const auto clamp0 = [&](double v) {
      return std::clamp(v, 0.0, double(n) - 1.0 - 1e-12);
    };
    const double cx = clamp0(gx), cy = clamp0(gy);
    const std::size_t i0 = std::min(std::size_t(cx), n - 2);
    const std::size_t j0 = std::min(std::size_t(cy), n - 2);
    const double fx = cx - double(i0), fy = cy - double(j0);
    const auto at = [&](std::size_t i, std::size_t j) { return f[j * n + i]; };
    return at(i0, j0) * ((1 - fx) * (1 - fy)) + at(i0 + 1, j0) * (fx * (1 - fy)) +
           at(i0, j0 + 1) * ((1 - fx) * fy) + at(i0 + 1, j0 + 1) * (fx * fy);
  }
};

/** mu |-> (ell/(ell+1)) mu, the strict-contraction truncation. */
inline DilatationField truncate_dilatation(DilatationField f, int ell) {
  if (ell < 1) throw std::invalid_argument("truncate_dilatation: ell >= 1");
  const double s = double(ell) / double(ell + 1);
  for (auto& m : f.mu) m *= s;
  for (std::size_t i = 0; i < f.mu.size(); ++i) {
    const double a = std::abs(f.mu[i]);
    f.k[i] = (1.0 + a) / (1.0 - a);
  }
  return f;
}

/** Diagnostic alternative: radial clamp of |mu| to (k_max-1)/(k_max+1). */
inline DilatationField clamp_dilatation(DilatationField f, double k_max) {
  if (!(k_max > 1.0)) throw std::invalid_argument("clamp_dilatation: k_max > 1");
  const double cap = (k_max - 1.0) / (k_max + 1.0);
  for (auto& m : f.mu) {
    const double a = std::abs(m);
    if (a > cap) m *= cap / a;
  }
  for (std::size_t i = 0; i < f.mu.size(); ++i) {
    const double a = std::abs(f.mu[i]);
    f.k[i] = (1.0 + a) / (1.0 - a);
  }
  return f;
}

/**
 * Solves dbar f = mu df for a dilatation supported in the unit disk:
 * Neumann iteration omega <- mu S(omega) + mu, then f = z + C(omega) with
 * the Cauchy transform split into disk-power templates (exact transforms)
 * plus a moment-free remainder handled by the padded periodic multiplier.
 */
inline PlaneMapGrid solve_beltrami(const DilatationField& field, double tol = 1e-10,
                                   int max_iter = 400, int pad = 2, int n_moments = 6) {
  if (field.chart != Chart::disk)
    throw std::invalid_argument("solve_beltrami: disk-chart dilatation required");
  if (field.nx != field.ny || !detail::is_pow2(field.nx))
    throw std::invalid_argument("solve_beltrami: grid must be a square power of two");
  const std::size_t n = field.nx;
  const double side = field.dx * double(n);
  const double h = field.dx;

  PlaneMapGrid out;
  out.n = n;
  out.side = side;
  out.mu = field.mu;

  // enforce disk support on cells that lie entirely outside the closed disk
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const auto z = detail::grid_node(i, j, n, side);
      const double inner = std::hypot(std::max(0.0, std::abs(z.real()) - 0.5 * h),
                                      std::max(0.0, std::abs(z.imag()) - 0.5 * h));
      if (inner >= 1.0) out.mu[j * n + i] = 0.0;
    }
  for (std::size_t idx = 0; idx < out.mu.size(); ++idx) {
    const double a = std::abs(out.mu[idx]);
    if (!(a < 1.0))
      throw std::invalid_argument("solve_beltrami: |mu| >= 1 at node " +
                                  std::to_string(idx % n) + "," + std::to_string(idx / n) +
                                  "; truncate the dilatation first");
    out.mu_inf = std::max(out.mu_inf, a);
  }

  const auto l2 = [&](const std::vector<std::complex<double>>& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s) * h;
  };

  std::vector<std::complex<double>> omega = out.mu;
  bool converged = out.mu_inf == 0.0;
  for (int it = 0; it < max_iter && !converged; ++it) {
    const auto sw = beurling_transform(omega, n, side, pad);
    double diff2 = 0.0;
    for (std::size_t idx = 0; idx < omega.size(); ++idx) {
      const std::complex<double> next = out.mu[idx] * (sw[idx] + 1.0);
      diff2 += std::norm(next - omega[idx]);
      omega[idx] = next;
    }
    out.iterations = it + 1;
    converged = std::sqrt(diff2) * h < tol;
  }
  if (!converged) {
    const int predicted =
        out.mu_inf < 1.0 ? int(std::ceil(std::log(tol) / std::log(out.mu_inf))) : -1;
    throw std::runtime_error("solve_beltrami: no convergence after " +
                             std::to_string(max_iter) + " iterations; contraction |mu|=" +
                             std::to_string(out.mu_inf) + " predicts about " +
                             std::to_string(predicted) + " iterations");
  }

  // moment templates: eta = omega - sum c_k zbar^k chi_D has vanishing
  // moments int eta z^j dA, so the periodic Cauchy transform of eta carries
  // no secular wraparound term
  std::vector<char> in_disk(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      in_disk[j * n + i] = std::abs(detail::grid_node(i, j, n, side)) <= 1.0;
  const std::size_t nm = std::size_t(n_moments);
  std::vector<std::complex<double>> mmat(nm * nm, 0.0), mrhs(nm, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = j * n + i;
      const auto z = detail::grid_node(i, j, n, side);
      std::complex<double> zj = 1.0;
      for (std::size_t mj = 0; mj < nm; ++mj) {
        mrhs[mj] += omega[idx] * zj;
        if (in_disk[idx]) {
          std::complex<double> zbk = 1.0;
          for (std::size_t mk = 0; mk < nm; ++mk) {
            mmat[mj * nm + mk] += zbk * zj;
            zbk *= std::conj(z);
          }
        }
        zj *= z;
      }
    }
  const auto coef = detail::solve_dense(mmat, mrhs, nm);

  std::vector<std::complex<double>> eta = omega;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = j * n + i;
      if (!in_disk[idx]) continue;
      const auto z = detail::grid_node(i, j, n, side);
      std::complex<double> zbk = 1.0;
      for (std::size_t mk = 0; mk < nm; ++mk) {
        eta[idx] -= coef[mk] * zbk;
        zbk *= std::conj(z);
      }
    }
  const auto ceta = cauchy_transform_torus(eta, n, side, pad);

  out.f.resize(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = j * n + i;
      const auto z = detail::grid_node(i, j, n, side);
      std::complex<double> v = z + ceta[idx];
      for (std::size_t mk = 0; mk < nm; ++mk)
        v += coef[mk] * cauchy_disk_power(int(mk), z);
      out.f[idx] = v;
    }

  // a-posteriori defect of the fixed point equation
  const auto sw = beurling_transform(omega, n, side, pad);
  double defect2 = 0.0;
  for (std::size_t idx = 0; idx < omega.size(); ++idx)
    defect2 += std::norm(omega[idx] - out.mu[idx] * (sw[idx] + 1.0));
  out.residual = std::sqrt(defect2) * h;
  return out;
}

/** Cell-averaged k chi_D dilatation grid (closed-form test input). */
inline DilatationField indicator_disk_mu_grid(std::complex<double> k, std::size_t n,
                                              double side = 4.0, int subsamples = 32) {
  const double h = side / double(n);
  std::vector<std::complex<double>> mu(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const auto z = detail::grid_node(i, j, n, side);
      const double corner = std::hypot(std::abs(z.real()) + 0.5 * h,
                                       std::abs(z.imag()) + 0.5 * h);
      const double inner = std::hypot(std::max(0.0, std::abs(z.real()) - 0.5 * h),
                                      std::max(0.0, std::abs(z.imag()) - 0.5 * h));
      if (corner <= 1.0) {
        mu[j * n + i] = k;
      } else if (inner < 1.0) {
        int hits = 0;
        for (int sy = 0; sy < subsamples; ++sy)
          for (int sx = 0; sx < subsamples; ++sx) {
            const double px = z.real() + ((sx + 0.5) / double(subsamples) - 0.5) * h;
            const double py = z.imag() + ((sy + 0.5) / double(subsamples) - 0.5) * h;
            if (px * px + py * py < 1.0) ++hits;
          }
        mu[j * n + i] = k * (double(hits) / double(subsamples * subsamples));
      }
    }
  return dilatation_from_mu_grid(mu, n, side);
}

/** Closed-form solution for mu = k chi_D: z + k zbar inside, z + k/z outside. */
inline std::complex<double> disk_indicator_map(std::complex<double> k,
                                               std::complex<double> z) {
  if (std::abs(z) <= 1.0) return z + k * std::conj(z);
  return z + k / z;
}

// ---------------------------------------------------------------------------
// Normalization and orientation diagnostics

struct RimFit {
  std::complex<double> c;               // fitted strength of the c/z tail
  std::complex<double> mean_deviation;  // vector mean of f - z on the rim
  double mean_abs_deviation = 0.0;      // mean |f - z| on the rim
  double rms_after_fit = 0.0;           // rms |f - z - c/z| on the rim
};

/** Fits the outer-rim values of f - z against the c/z decay envelope. */
inline RimFit rim_fit(const PlaneMapGrid& g) {
  std::vector<std::size_t> rim;
  const std::size_t n = g.n;
  for (std::size_t i = 0; i < n; ++i) {
    rim.push_back(i);
    rim.push_back((n - 1) * n + i);
    if (i > 0 && i + 1 < n) {
      rim.push_back(i * n);
      rim.push_back(i * n + (n - 1));
    }
  }
  std::complex<double> num = 0.0, mean_vec = 0.0;
  double den = 0.0, mean_abs = 0.0;
  for (const std::size_t idx : rim) {
    const auto z = g.node(idx % n, idx / n);
    const auto d = g.f[idx] - z;
    num += d * std::conj(1.0 / z);
    den += std::norm(1.0 / z);
    mean_vec += d;
    mean_abs += std::abs(d);
  }
  RimFit out;
  out.c = num / den;
  out.mean_deviation = mean_vec / double(rim.size());
  out.mean_abs_deviation = mean_abs / double(rim.size());
  double rss = 0.0;
  for (const std::size_t idx : rim) {
    const auto z = g.node(idx % n, idx / n);
    rss += std::norm(g.f[idx] - z - out.c / z);
  }
  out.rms_after_fit = std::sqrt(rss / double(rim.size()));
  return out;
}

/** Counts grid cells with non-positive forward-difference Jacobian. */
inline int jacobian_orientation_violations(const PlaneMapGrid& g) {
  int bad = 0;
  const std::size_t n = g.n;
  for (std::size_t j = 0; j + 1 < n; ++j)
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto fx = g.f[j * n + i + 1] - g.f[j * n + i];
      const auto fy = g.f[(j + 1) * n + i] - g.f[j * n + i];
      const double det = fx.real() * fy.imag() - fx.imag() * fy.real();
      if (!(det > 0.0)) ++bad;
    }
  return bad;
}

// ---------------------------------------------------------------------------
// Welding curves

struct WeldingCurve {
  std::vector<double> angles;  // 2 pi k / n
  std::vector<std::complex<double>> points;
  bool closed = true;
};

namespace detail {

inline bool segments_cross(std::complex<double> a, std::complex<double> b,
                           std::complex<double> c, std::complex<double> d) {
  auto orient = [](std::complex<double> p, std::complex<double> q, std::complex<double> r) {
    const double v = (q.real() - p.real()) * (r.imag() - p.imag()) -
                     (q.imag() - p.imag()) * (r.real() - p.real());
    return (v > 0.0) - (v < 0.0);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

}  // namespace detail

/**
 * Image of the unit circle under the solved map on a uniform angle grid,
 * with a bounding-box-filtered segment sweep rejecting self-intersections.
 */
inline WeldingCurve welding_curve(const PlaneMapGrid& f, std::size_t n_points = 1024,
                                  bool check_simple = true) {
  if (n_points < 8) throw std::invalid_argument("welding_curve: need at least 8 points");
  WeldingCurve c;
  c.angles.resize(n_points);
  c.points.resize(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    c.angles[k] = 2.0 * std::numbers::pi * double(k) / double(n_points);
    c.points[k] = f.value_at(std::polar(1.0, c.angles[k]));
  }
  if (check_simple) {
    const std::size_t n = n_points;
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = c.points[i], b = c.points[(i + 1) % n];
      const double ilo_x = std::min(a.real(), b.real()), ihi_x = std::max(a.real(), b.real());
      const double ilo_y = std::min(a.imag(), b.imag()), ihi_y = std::max(a.imag(), b.imag());
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;  // adjacent through the wrap
        const auto p = c.points[j], q = c.points[(j + 1) % n];
        if (std::max(p.real(), q.real()) < ilo_x || std::min(p.real(), q.real()) > ihi_x ||
            std::max(p.imag(), q.imag()) < ilo_y || std::min(p.imag(), q.imag()) > ihi_y)
          continue;
        if (detail::segments_cross(a, b, p, q))
          throw std::runtime_error("welding_curve: self-intersection between segments " +
                                   std::to_string(i) + " and " + std::to_string(j) +
                                   " (under-resolved solve)");
      }
    }
  }
  return c;
}

inline double point_segment_distance(std::complex<double> p, std::complex<double> a,
                                     std::complex<double> b) {
  const std::complex<double> ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p.real() - a.real()) * ab.real() + (p.imag() - a.imag()) * ab.imag()) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

/** Symmetric Hausdorff distance between closed polylines. */
inline double curve_hausdorff(const std::vector<std::complex<double>>& a,
                              const std::vector<std::complex<double>>& b) {
  auto one_sided = [](const std::vector<std::complex<double>>& from,
                      const std::vector<std::complex<double>>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < to.size(); ++k) {
        best = std::min(best, point_segment_distance(p, to[k], to[(k + 1) % to.size()]));
        if (best == 0.0) break;
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

struct HolderEstimate {
  double alpha = 0.0;
  double alpha_stderr = 0.0;
  double residual_rms = 0.0;
};

/** Log-log regression of the sup modulus of continuity over dyadic gaps. */
inline HolderEstimate holder_estimate(const WeldingCurve& c, int k_min = 4, int k_max = 9) {
  const std::size_t n = c.points.size();
  if (n < 512) throw std::invalid_argument("holder_estimate: need at least 512 points");
  std::vector<double> lx, ly;
  for (int k = k_min; k <= k_max; ++k) {
    const std::size_t d = n >> k;
    if (d == 0) break;
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      worst = std::max(worst, std::abs(c.points[(j + d) % n] - c.points[j]));
    lx.push_back(std::log(2.0 * std::numbers::pi * double(d) / double(n)));
    ly.push_back(std::log(worst));
  }
  const auto fit = linear_fit(lx, ly);
  return {fit.slope, fit.slope_stderr, fit.residual_rms};
}

// ---------------------------------------------------------------------------
// Conformal factors and the welding round-trip

/**
 * The two welding pieces: f_minus read directly on the unit circle (the
 * boundary values of the holomorphic outside piece, by continuity of the
 * solved map), f_plus = f o Psi^{-1} on a ring one cell inside; f_plus
 * values are tabulated against their exact curve parameter u (angle/2pi of
 * the Psi-image), so inverting f_plus on the boundary is a curve-parameter
 * lookup.  The plus ring must stay strictly inside: its offset sets the
 * parameter smoothing scale, and one cell keeps that below the grid error.
 */
struct ConformalFactors {
  double r_plus = 0.0;   // sample ring radius inside T
  double r_minus = 0.0;  // sample ring radius outside T
  std::vector<double> plus_params;                // u_k, strictly increasing mod 1
  std::vector<std::complex<double>> plus_points;  // f_plus at parameter u_k
  std::vector<std::complex<double>> minus_points; // f_minus at angle j/n
  // polar diagnostic grids
  std::vector<double> plus_radii, minus_radii;
  std::size_t grid_theta = 0;
  std::vector<std::complex<double>> plus_grid;   // [ir*grid_theta + it]
  std::vector<std::complex<double>> minus_grid;
};

inline ConformalFactors conformal_factors(const PlaneMapGrid& f, const DiskExtension& psi,
                                          std::size_t n_boundary = 2048,
                                          std::size_t grid_theta = 256,
                                          std::size_t grid_r = 6) {
  ConformalFactors out;
  const double h = f.spacing();
  out.r_plus = 1.0 - h;
  out.r_minus = 1.0;
  out.plus_params.resize(n_boundary);
  out.plus_points.resize(n_boundary);
  out.minus_points.resize(n_boundary);
  const double eta = -std::log(out.r_plus) / (2.0 * std::numbers::pi);
  for (std::size_t k = 0; k < n_boundary; ++k) {
    const double y = double(k) / double(n_boundary);
    // w = Psi(r_plus e^{2 pi i y}) has curve parameter Re F(y + i eta)
    out.plus_params[k] = psi.strip().value(y, eta).real();
    out.plus_points[k] = f.value_at(std::polar(out.r_plus, 2.0 * std::numbers::pi * y));
    out.minus_points[k] =
        f.value_at(std::polar(out.r_minus, 2.0 * std::numbers::pi * double(k) / double(n_boundary)));
  }
  // polar grids for analyticity diagnostics
  out.grid_theta = grid_theta;
  for (std::size_t ir = 0; ir < grid_r; ++ir) {
    out.plus_radii.push_back(0.35 + 0.5 * double(ir) / double(grid_r - 1));
    out.minus_radii.push_back(1.1 + 0.8 * double(ir) / double(grid_r - 1));
  }
  out.plus_grid.resize(grid_r * grid_theta);
  out.minus_grid.resize(grid_r * grid_theta);
  for (std::size_t ir = 0; ir < grid_r; ++ir)
    for (std::size_t it = 0; it < grid_theta; ++it) {
      const double th = 2.0 * std::numbers::pi * double(it) / double(grid_theta);
      const auto w = std::polar(out.plus_radii[ir], th);
      out.plus_grid[ir * grid_theta + it] = f.value_at(psi.inverse(w));
      out.minus_grid[ir * grid_theta + it] =
          f.value_at(std::polar(out.minus_radii[ir], th));
    }
  return out;
}

/** Max polar Cauchy-Riemann defect |df/dtheta - i r df/dr| / max|df/dtheta|. */
inline double polar_cr_residual(const std::vector<std::complex<double>>& grid,
                                const std::vector<double>& radii, std::size_t n_theta) {
  const std::size_t n_r = radii.size();
  double worst = 0.0, scale = 0.0;
  for (std::size_t ir = 1; ir + 1 < n_r; ++ir) {
    const double dr = 0.5 * (radii[ir + 1] - radii[ir - 1]);
    for (std::size_t it = 0; it < n_theta; ++it) {
      const auto ft = (grid[ir * n_theta + (it + 1) % n_theta] -
                       grid[ir * n_theta + (it + n_theta - 1) % n_theta]) *
                      (double(n_theta) / (4.0 * std::numbers::pi));
      const auto fr = (grid[(ir + 1) * n_theta + it] - grid[(ir - 1) * n_theta + it]) /
                      (2.0 * dr);
      worst = std::max(worst, std::abs(ft - std::complex<double>(0.0, radii[ir]) * fr));
      scale = std::max(scale, std::abs(ft));
    }
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

struct RoundtripResult {
  double error = 0.0;    // sup |e^{2 pi i u*(x)} - e^{2 pi i h(x)}|
  bool monotone = true;  // boundary correspondence cyclically monotone
  int violations = 0;
};

/**
 * Welding round-trip: push each boundary point through f_minus, invert
 * f_plus by nearest-vertex search plus projection onto the adjacent curve
 * segments (parameter interpolated linearly), and compare the recovered
 * boundary parameter with h.
 */
inline RoundtripResult roundtrip_error(const ConformalFactors& fac, const CircleMap& h) {
  const std::size_t n = fac.minus_points.size();
  const std::size_t m = fac.plus_points.size();
  RoundtripResult out;
  std::vector<double> recovered(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto target = fac.minus_points[j];
    std::size_t best_k = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      const double d = std::norm(target - fac.plus_points[k]);
      if (d < best_d) {
        best_d = d;
        best_k = k;
      }
    }
    // project on the two segments adjacent to the nearest vertex
    double u_star = fac.plus_params[best_k];
    double seg_best = std::numeric_limits<double>::infinity();
    for (int s = -1; s <= 0; ++s) {
      const std::size_t ka = (best_k + m + std::size_t(s + int(m))) % m;
      const std::size_t kb = (ka + 1) % m;
      const auto a = fac.plus_points[ka], b = fac.plus_points[kb];
      const std::complex<double> ab = b - a;
      const double len2 = std::norm(ab);
      if (len2 == 0.0) continue;
      double t = ((target.real() - a.real()) * ab.real() +
                  (target.imag() - a.imag()) * ab.imag()) /
                 len2;
      t = std::clamp(t, 0.0, 1.0);
      const double d = std::abs(target - (a + t * ab));
      if (d < seg_best) {
        seg_best = d;
        double ua = fac.plus_params[ka], ub = fac.plus_params[kb];
        if (kb == 0) ub += 1.0;  // parameter wraps once per revolution
        u_star = ua + t * (ub - ua);
      }
    }
    recovered[j] = u_star;
    const double x = double(j) / double(n);
    const double hu = h(x);
    const auto e = [](double u) {
      return std::polar(1.0, 2.0 * std::numbers::pi * u);
    };
    out.error = std::max(out.error, std::abs(e(u_star) - e(hu)));
  }
  // cyclic monotonicity of the recovered parameters
  for (std::size_t j = 0; j + 1 < n; ++j) {
    double d = recovered[j + 1] - recovered[j];
    d -= std::floor(d);  // ascending steps stay small; descents wrap near 1
    if (d > 0.5) ++out.violations;
  }
  out.monotone = out.violations == 0;
  return out;
}

}  // namespace weldlab
