#pragma once

// Extension of the mass homeomorphism h into the upper strip and the unit
// disk: closed-form averaged extension F with analytic partials, its Beltrami
// coefficient, the pair-ratio dilatation field on Whitney cells, and the
// conformal change of charts between strip and disk.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "weldlab/chaos.hpp"

namespace weldlab {

/**
 * Averaged extension of an increasing circle map h to the strip 0 < y:
 *
 *   Re F(x+iy) = (H(x+y) - H(x-y)) / (2y)
 *   Im F(x+iy) = (H(x+y) - 2H(x) + H(x-y)) / y        for 0 < y < 1,
 *
 * where H is the running integral of h.  For 1 <= y <= 2 the map is blended
 * linearly onto the identity, F = z + (2-y) c0 with c0 = H(1) - 1/2, and for
 * y >= 2 it is the identity.  For piecewise-linear h every formula below is
 * exact: H is piecewise quadratic and is evaluated in closed form.
 */
class StripExtension {
 public:
  StripExtension() = default;

  explicit StripExtension(const CircleMap& h) : h_(h) {
    const std::size_t g = h_.grid();
    if (g == 0) throw std::invalid_argument("StripExtension: empty circle map");
    hk_.resize(g + 1);
    hk_[0] = 0.0;
    for (std::size_t i = 0; i < g; ++i)
      hk_[i + 1] = hk_[i] + 0.5 * (h_.knot(i) + h_.knot(i + 1)) / double(g);
    c_ = hk_[g];
  }

  const CircleMap& boundary_map() const { return h_; }
  double c0() const { return c_ - 0.5; }
  double h_at(double x) const { return h_(x); }

  /** Running integral H(x) = int_0^x h, any real x. */
  double H_at(double x) const {
    const double n = std::floor(x);
    const double xf = x - n;
    const std::size_t g = h_.grid();
    const double pos = xf * double(g);
    const std::size_t i = std::min(std::size_t(pos), g - 1);
    const double d = (pos - double(i)) / double(g);
    const double h0 = h_.knot(i);
    const double slope = (h_.knot(i + 1) - h0) * double(g);
    const double base = hk_[i] + h0 * d + 0.5 * slope * d * d;
    // H(xf + n) = H(xf) + n H(1) + n xf + n(n-1)/2
    return base + n * c_ + n * xf + 0.5 * n * (n - 1.0);
  }

  std::complex<double> value(double x, double y) const {
    require_upper(y);
    if (y >= 2.0) return {x, y};
    if (y >= 1.0) return {x + (2.0 - y) * c0(), y};
    const double hp = H_at(x + y), hm = H_at(x - y), h0 = H_at(x);
    return {(hp - hm) / (2.0 * y), (hp - 2.0 * h0 + hm) / y};
  }

  struct Partials {
    double ux = 1.0, uy = 0.0, vx = 0.0, vy = 1.0;
  };

  Partials partials(double x, double y) const {
    require_upper(y);
    Partials p;
    if (y >= 2.0) return p;
    if (y >= 1.0) {
      p.uy = -c0();
      return p;
    }
    const double hp = h_(x + y), hm = h_(x - y), h0 = h_(x);
    const double gp = H_at(x + y), gm = H_at(x - y), g0 = H_at(x);
    const double a = hp - h0;
    const double b = h0 - hm;
    const double at = hp - (gp - g0) / y;
    const double bt = (g0 - gm) / y - hm;
    p.ux = (a + b) / (2.0 * y);
    p.uy = (at - bt) / (2.0 * y);
    p.vx = (a - b) / y;
    p.vy = (at + bt) / y;
    return p;
  }

  double jacobian(double x, double y) const {
    const Partials p = partials(x, y);
    return p.ux * p.vy - p.uy * p.vx;
  }

  std::complex<double> mu(double x, double y) const {
    const Partials p = partials(x, y);
    const std::complex<double> fz(0.5 * (p.ux + p.vy), 0.5 * (p.vx - p.uy));
    const std::complex<double> fzb(0.5 * (p.ux - p.vy), 0.5 * (p.vx + p.uy));
    const std::complex<double> m = fzb / fz;
    if (!(std::abs(m) < 1.0))
      throw std::runtime_error("StripExtension: dilatation not contractive at x=" +
                               std::to_string(x) + " y=" + std::to_string(y));
    return m;
  }

  /** K = (1+|mu|)/(1-|mu|). */
  double dilatation(double x, double y) const {
    const double m = std::abs(mu(x, y));
    return (1.0 + m) / (1.0 - m);
  }

 private:
  static void require_upper(double y) {
    if (!(y > 0.0))
      throw std::invalid_argument("StripExtension: y must be positive, got y=" +
                                  std::to_string(y));
  }

  CircleMap h_;
  std::vector<double> hk_;  // H at knots i/g
  double c_ = 0.5;          // H(1)
};

/** Central-difference Beltrami coefficient; oracle for the analytic one. */
inline std::complex<double> strip_mu_fd(const StripExtension& ext, double x, double y,
                                        double delta) {
  const auto fxp = ext.value(x + delta, y), fxm = ext.value(x - delta, y);
  const auto fyp = ext.value(x, y + delta), fym = ext.value(x, y - delta);
  const double ux = (fxp.real() - fxm.real()) / (2.0 * delta);
  const double vx = (fxp.imag() - fxm.imag()) / (2.0 * delta);
  const double uy = (fyp.real() - fym.real()) / (2.0 * delta);
  const double vy = (fyp.imag() - fym.imag()) / (2.0 * delta);
  const std::complex<double> fz(0.5 * (ux + vy), 0.5 * (vx - uy));
  const std::complex<double> fzb(0.5 * (ux - vy), 0.5 * (vx + uy));
  return fzb / fz;
}

// ---------------------------------------------------------------------------
// Pair-ratio dilatation on Whitney cells

/**
 * Dilatation proxy on dyadic Whitney cells.  The value on the cell over a
 * level-n interval I aggregates mass-ratio penalties
 *
 *   sum over unordered pairs J1 != J2 of m(J1)/m(J2) + m(J2)/m(J1)
 *
 * where J ranges over the level-(n+5) refinement of I and its two
 * neighbours (at most 96 distinct intervals, fewer when the window wraps the
 * whole circle).  Computed in O(1) per interval from windowed prefix sums of
 * the masses and their reciprocals.
 */
class KTauField {
 public:
  KTauField() = default;

  explicit KTauField(const ChaosMeasure& m) {
    if (m.level < 5)
      throw std::invalid_argument(
          "KTauField: measure resolution level must be >= 5 (each cell value "
          "refines five levels down)");
    max_level_ = m.level - 5;
    k_.resize(std::size_t(max_level_) + 1);
    std::vector<double> masses = interval_masses(m, m.level);
    for (int n = max_level_; n >= 0; --n) {
      // masses currently holds level n+5
      k_[std::size_t(n)] = level_from_window(masses, n);
      if (n > 0) {
        std::vector<double> half(masses.size() / 2);
        for (std::size_t i = 0; i < half.size(); ++i)
          half[i] = masses[2 * i] + masses[2 * i + 1];
        masses.swap(half);
      }
    }
  }

  int max_level() const { return max_level_; }
  std::size_t intervals(int level) const { return std::size_t(1) << level; }

  double interval_value(int level, std::size_t index) const {
    if (level < 0 || level > max_level_)
      throw std::out_of_range("KTauField: level " + std::to_string(level) +
                              " requires measure resolution level " +
                              std::to_string(level + 5) + ", field holds " +
                              std::to_string(max_level_ + 5));
    return k_.at(std::size_t(level)).at(index);
  }

  /**
   * Field value at x+iy.  Identity (1) outside 0 < y <= 2; level picked by
   * the Whitney decomposition (top cells span 1/2 <= y <= 2) and clamped to
   * the finest stored level below it.
   */
  double value(double x, double y) const {
    if (!(y > 0.0) || y > 2.0) return 1.0;
    x -= std::floor(x);
    int n = 0;
    if (y < 0.5) n = int(std::floor(-std::log2(y)));
    n = std::min(n, max_level_);
    const std::size_t count = std::size_t(1) << n;
    const std::size_t idx = std::min(std::size_t(x * double(count)), count - 1);
    return k_[std::size_t(n)][idx];
  }

  /** Whitney level containing height y (no clamping), y in (0, 2]. */
  static int level_of_height(double y) {
    if (!(y > 0.0 && y <= 2.0))
      throw std::invalid_argument("level_of_height: y in (0,2] required");
    return y >= 0.5 ? 0 : int(std::floor(-std::log2(y)));
  }

 private:
  static std::vector<double> level_from_window(const std::vector<double>& masses, int n) {
    const std::size_t sz = masses.size();  // 2^{n+5}
    const std::size_t len = std::min<std::size_t>(96, sz);
    std::vector<double> p1(2 * sz + 1, 0.0), p2(2 * sz + 1, 0.0);
    for (std::size_t j = 0; j < 2 * sz; ++j) {
      const double v = masses[j % sz];
      p1[j + 1] = p1[j] + v;
      p2[j + 1] = p2[j] + 1.0 / v;
    }
    const std::size_t count = std::size_t(1) << n;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t start = (i * 32 + sz - std::min<std::size_t>(32, sz)) % sz;
      const double s1 = p1[start + len] - p1[start];
      const double s2 = p2[start + len] - p2[start];
      out[i] = s1 * s2 - double(len);
    }
    return out;
  }

  std::vector<std::vector<double>> k_;
  int max_level_ = -1;
};

/** Distinct window masses feeding the cell value at (level, index). */
inline std::vector<double> k_tau_window_masses(const ChaosMeasure& m, int level,
                                               std::size_t index) {
  const auto fine = interval_masses(m, level + 5);
  const std::size_t sz = fine.size();
  const std::size_t len = std::min<std::size_t>(96, sz);
  const std::size_t start = (index * 32 + sz - std::min<std::size_t>(32, sz)) % sz;
  std::vector<double> out(len);
  for (std::size_t j = 0; j < len; ++j) out[j] = fine[(start + j) % sz];
  return out;
}

/** Direct pair enumeration of the cell value; oracle for the prefix route. */
inline double k_tau_enumeration_oracle(const std::vector<double>& window_masses) {
  double acc = 0.0;
  for (std::size_t a = 0; a < window_masses.size(); ++a)
    for (std::size_t b = a + 1; b < window_masses.size(); ++b)
      acc += window_masses[a] / window_masses[b] + window_masses[b] / window_masses[a];
  return acc;
}

/** Cell value when all window masses are equal: cnt(cnt-1). */
inline double k_tau_equal_mass_value(int level) {
  const double cnt = std::min(96.0, std::pow(2.0, level + 5));
  return cnt * (cnt - 1.0);
}

// ---------------------------------------------------------------------------
// Disk chart

/**
 * The extension transported to the unit disk through z = exp(2 pi i (x+iy)).
 * forward() is the disk extension Psi with Psi(e^{2 pi i x}) = e^{2 pi i
 * h(x)} on the boundary and Psi = id on |z| <= e^{-4 pi}; inverse() solves
 * Psi(z) = zeta by a damped Newton iteration in strip coordinates using the
 * analytic Jacobian.
 */
class DiskExtension {
 public:
  DiskExtension() = default;
  explicit DiskExtension(StripExtension strip) : strip_(std::move(strip)) {}

  const StripExtension& strip() const { return strip_; }

  /** Strip coordinate w = arg(z)/2pi - i log|z|/2pi of an interior point. */
  static std::complex<double> strip_coordinate(std::complex<double> z) {
    const double r = std::abs(z);
    if (!(r > 0.0) || r > 1.0)
      throw std::invalid_argument("strip_coordinate: need 0 < |z| <= 1");
    double x = std::arg(z) / (2.0 * std::numbers::pi);
    x -= std::floor(x);
    return {x, -std::log(r) / (2.0 * std::numbers::pi)};
  }

  std::complex<double> mu(std::complex<double> z) const {
    const double r = std::abs(z);
    if (r >= 1.0 || r == 0.0) return 0.0;
    const auto w = strip_coordinate(z);
    if (w.imag() >= 2.0) return 0.0;
    const auto ms = strip_.mu(w.real(), w.imag());
    return -(z / std::conj(z)) * ms;
  }

  std::complex<double> forward(std::complex<double> z) const {
    const double r = std::abs(z);
    if (r > 1.0 + 1e-12)
      throw std::invalid_argument("DiskExtension::forward: point outside the closed disk");
    if (r == 0.0) return 0.0;
    if (r >= 1.0) {
      double x = std::arg(z) / (2.0 * std::numbers::pi);
      const double u = strip_.h_at(x - std::floor(x));
      return std::polar(1.0, 2.0 * std::numbers::pi * u);
    }
    const auto w = strip_coordinate(z);
    if (w.imag() >= 2.0) return z;
    const auto f = strip_.value(w.real(), w.imag());
    return std::polar(std::exp(-2.0 * std::numbers::pi * f.imag()),
                      2.0 * std::numbers::pi * f.real());
  }

  /** Newton solve of forward(z) = zeta; throws when the iteration stalls. */
  std::complex<double> inverse(std::complex<double> zeta, double tol = 1e-12,
                               int max_iter = 80) const {
    const double r = std::abs(zeta);
    if (r > 1.0 + 1e-12)
      throw std::invalid_argument("DiskExtension::inverse: target outside the closed disk");
    if (r == 0.0) return 0.0;
    if (r >= 1.0) {
      double u = std::arg(zeta) / (2.0 * std::numbers::pi);
      u -= std::floor(u);
      const double x = strip_.boundary_map().inverse(u);
      return std::polar(1.0, 2.0 * std::numbers::pi * x);
    }
    const double ut = [&] {
      double u = std::arg(zeta) / (2.0 * std::numbers::pi);
      return u - std::floor(u);
    }();
    const double vt = -std::log(r) / (2.0 * std::numbers::pi);
    if (vt >= 2.0) return zeta;  // identity region

    auto wrap = [](double d) { return d - std::round(d); };
    const auto& bm = strip_.boundary_map();
    const double x0 = bm.inverse(ut);
    // Im F(x, y) grows like y times the local slope of h, so seed y with the
    // symmetric slope at scale vt; multiplicative step clamps below keep the
    // iterate out of the y -> 0 regime where the partials cancel
    const double slope0 = std::clamp((bm(x0 + vt) - bm(x0 - vt)) / (2.0 * vt), 0.05, 20.0);
    double x = x0;
    double y = std::clamp(vt / slope0, 1e-9, 2.0);
    auto res = [&](double xx, double yy) {
      const auto f = strip_.value(xx, yy);
      return std::complex<double>(wrap(f.real() - ut), f.imag() - vt);
    };
    std::complex<double> rv = res(x, y);
    for (int it = 0; it < max_iter; ++it) {
      if (std::abs(rv) < tol)
        return std::polar(std::exp(-2.0 * std::numbers::pi * y),
                          2.0 * std::numbers::pi * x);
      const auto p = strip_.partials(x, y);
      const double det = p.ux * p.vy - p.uy * p.vx;
      const double dx = (p.vy * rv.real() - p.uy * rv.imag()) / det;
      const double dy = (-p.vx * rv.real() + p.ux * rv.imag()) / det;
      double step = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls) {
        const double xn = x - std::clamp(step * dx, -0.25, 0.25);
        const double yn = std::clamp(y - step * dy, 0.25 * y, std::min(4.0 * y, 2.2));
        const std::complex<double> rn = res(xn, yn);
        if (std::abs(rn) < std::abs(rv)) {
          x = xn;
          y = yn;
          rv = rn;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    if (std::abs(rv) < tol)
      return std::polar(std::exp(-2.0 * std::numbers::pi * y), 2.0 * std::numbers::pi * x);
    throw std::runtime_error(
        "DiskExtension::inverse: Newton did not converge for target (" +
        std::to_string(zeta.real()) + ", " + std::to_string(zeta.imag()) +
        "), residual " + std::to_string(std::abs(rv)));
  }

 private:
  StripExtension strip_;
};

// ---------------------------------------------------------------------------
// Rectangular dilatation grids

enum class Chart { strip, disk };

/**
 * Complex dilatation and distortion sampled on a rectangular grid of cell
 * centers.  Strip charts are 1-periodic in x and report identity (K = 1)
 * above the grid; disk charts cover a centred square.  Lookup is
 * piecewise-constant on cells.
 */
struct DilatationField {
  Chart chart = Chart::disk;
  std::size_t nx = 0, ny = 0;
  double x0 = 0.0, y0 = 0.0;  // cell center of node (0,0)
  double dx = 0.0, dy = 0.0;
  std::vector<std::complex<double>> mu;  // row-major [j*nx + i]
  std::vector<double> k;

  double x_min() const { return x0 - 0.5 * dx; }
  double x_max() const { return x0 + (double(nx) - 0.5) * dx; }
  double y_min() const { return y0 - 0.5 * dy; }
  double y_max() const { return y0 + (double(ny) - 0.5) * dy; }

  double k_at(double x, double y) const {
    if (chart == Chart::strip) {
      if (!(y > 0.0) || y >= y_max()) return 1.0;  // identity off the strip
      x -= std::floor(x);
    }
    const auto clamp_idx = [](double v, std::size_t n) {
      const auto i = std::ptrdiff_t(std::floor(v));
      return std::size_t(std::clamp<std::ptrdiff_t>(i, 0, std::ptrdiff_t(n) - 1));
    };
    const std::size_t i = clamp_idx((x - x_min()) / dx, nx);
    const std::size_t j = clamp_idx((y - y_min()) / dy, ny);
    return k[j * nx + i];
  }
};

/** Strip-chart dilatation grid of the averaged extension over (0, y_top]. */
inline DilatationField sample_strip_dilatation(const StripExtension& ext, std::size_t nx,
                                               std::size_t ny, double y_bottom = 1e-3,
                                               double y_top = 2.0) {
  if (!(0.0 < y_bottom && y_bottom < y_top))
    throw std::invalid_argument("sample_strip_dilatation: need 0 < y_bottom < y_top");
  DilatationField f;
  f.chart = Chart::strip;
  f.nx = nx;
  f.ny = ny;
  f.dx = 1.0 / double(nx);
  f.dy = (y_top - y_bottom) / double(ny);
  f.x0 = 0.5 * f.dx;
  f.y0 = y_bottom + 0.5 * f.dy;
  f.mu.resize(nx * ny);
  f.k.resize(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = f.x0 + double(i) * f.dx;
      const double y = f.y0 + double(j) * f.dy;
      const auto m = ext.mu(x, y);
      f.mu[j * nx + i] = m;
      f.k[j * nx + i] = (1.0 + std::abs(m)) / (1.0 - std::abs(m));
    }
  return f;
}

/** Disk-chart dilatation grid from solver-style cell-centered mu values. */
inline DilatationField dilatation_from_mu_grid(const std::vector<std::complex<double>>& mu,
                                               std::size_t n, double side = 4.0) {
  if (mu.size() != n * n)
    throw std::invalid_argument("dilatation_from_mu_grid: mu must be n*n values");
  DilatationField f;
  f.chart = Chart::disk;
  f.nx = f.ny = n;
  f.dx = f.dy = side / double(n);
  f.x0 = f.y0 = -0.5 * side + 0.5 * f.dx;
  f.mu = mu;
  f.k.resize(n * n);
  for (std::size_t idx = 0; idx < mu.size(); ++idx) {
    const double a = std::abs(mu[idx]);
    if (!(a < 1.0))
      throw std::runtime_error("dilatation_from_mu_grid: |mu| >= 1 at node " +
                               std::to_string(idx % n) + "," + std::to_string(idx / n));
    f.k[idx] = (1.0 + a) / (1.0 - a);
  }
  return f;
}

/**
 * Beltrami coefficient of the disk extension on an n x n grid of cell
 * centers over the square [-side/2, side/2]^2.  Cells straddling the unit
 * circle are averaged over subsamples^2 interior points so the coefficient
 * seen by a grid solver has no staircase boundary.
 */
inline std::vector<std::complex<double>> disk_mu_on_grid(const DiskExtension& ext,
                                                         std::size_t n, double side = 4.0,
                                                         int subsamples = 16) {
  const double h = side / double(n);
  std::vector<std::complex<double>> out(n * n, 0.0);
  for (std::size_t jy = 0; jy < n; ++jy) {
    for (std::size_t jx = 0; jx < n; ++jx) {
      const double cx = -0.5 * side + (double(jx) + 0.5) * h;
      const double cy = -0.5 * side + (double(jy) + 0.5) * h;
      const double corner = std::hypot(std::abs(cx) + 0.5 * h, std::abs(cy) + 0.5 * h);
      const double inner = std::hypot(std::max(0.0, std::abs(cx) - 0.5 * h),
                                      std::max(0.0, std::abs(cy) - 0.5 * h));
      std::complex<double> v = 0.0;
      if (corner <= 1.0) {
        v = ext.mu({cx, cy});
      } else if (inner < 1.0) {
        // straddles the circle: cell average
        std::complex<double> acc = 0.0;
        for (int sy = 0; sy < subsamples; ++sy)
          for (int sx = 0; sx < subsamples; ++sx) {
            const double px = cx + ((sx + 0.5) / double(subsamples) - 0.5) * h;
            const double py = cy + ((sy + 0.5) / double(subsamples) - 0.5) * h;
            acc += ext.mu({px, py});
          }
        v = acc / double(subsamples * subsamples);
      }
      out[jy * n + jx] = v;
    }
  }
  return out;
}

}  // namespace weldlab
