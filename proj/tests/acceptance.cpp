// Acceptance gates for the welding pipeline: eleven pinned checks, one
// pass/fail line each.  Exit status is the number of failed checks.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "weldlab/harness.hpp"

using namespace weldlab;

namespace {

int g_failures = 0;

void report(int k, bool ok, const std::string& detail) {
  std::printf("criterion %d %s - %s\n", k, ok ? "PASS" : "FAIL", detail.c_str());
  if (!ok) ++g_failures;
}

void run(int k, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [ok, detail] = body();
    report(k, ok, detail);
  } catch (const std::exception& e) {
    report(k, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// ellipse traced by z + 0.3 conj(z) on the unit circle
std::vector<std::complex<double>> ellipse_oracle(std::size_t n) {
  std::vector<std::complex<double>> pts(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double th = 2.0 * std::numbers::pi * double(k) / double(n);
    pts[k] = {1.3 * std::cos(th), 0.7 * std::sin(th)};
  }
  return pts;
}

WeldingCurve analytic_curve(std::size_t n, bool ellipse) {
  WeldingCurve c;
  for (std::size_t k = 0; k < n; ++k) {
    const double th = 2.0 * std::numbers::pi * double(k) / double(n);
    c.angles.push_back(th);
    c.points.push_back(ellipse ? std::complex<double>{1.3 * std::cos(th), 0.7 * std::sin(th)}
                               : std::polar(1.0, th));
  }
  return c;
}

}  // namespace

int main() {
  const std::string base = "/tmp/weldlab-acceptance";
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);

  // 1: sampled circle-field covariance matches the truncated series at four
  //    separations and the log-sine kernel within 0.05
  run(1, [] {
    ExperimentConfig c;
    c.n_modes = 4096;
    c.reps = 2000;
    c.seed = 1;
    const auto rec = detail::suite_covariance(c);
    double worst_z = 0.0, worst_trace = 0.0;
    for (const auto& row : rec.summary["rows"]) {
      worst_z = std::max(worst_z, std::abs(row["estimate"].get<double>() -
                                           row["truncated"].get<double>()) /
                                      row["stderr"].get<double>());
      worst_trace = std::max(worst_trace, std::abs(row["estimate"].get<double>() -
                                                   row["trace"].get<double>()));
    }
    const bool ok = rec.summary["within_3se"].get<bool>() &&
                    rec.summary["within_trace_tolerance"].get<bool>();
    return std::pair{ok, fmt("covariance, 4096 modes x 2000 reps: worst z = %.2f (need <= 3), "
                             "worst log-sine deviation = %.4f (need <= 0.05)",
                             worst_z, worst_trace)};
  });

  // 2: chaos interval masses are unbiased for |I| across three couplings
  run(2, [] {
    double worst_z = 0.0;
    bool ok = true;
    for (const double beta : {0.3, 0.5, 1.0}) {
      ExperimentConfig c;
      c.beta = beta;
      c.n_modes = 128;
      c.level = 8;
      c.reps = 10000;
      c.seed = 2;
      const auto rec = detail::suite_martingale(c);
      ok = ok && rec.summary["within_3se"].get<bool>();
      for (const auto& row : rec.summary["rows"])
        worst_z = std::max(worst_z, std::abs(row["estimate"].get<double>() -
                                             row["expected"].get<double>()) /
                                        row["stderr"].get<double>());
    }
    return std::pair{ok, fmt("interval means, beta in {0.3, 0.5, 1.0}, 10000 reps each: "
                             "worst z = %.2f (need <= 3)",
                             worst_z)};
  });

  // 3: fitted moment scaling slope at beta = 0.5, p = 1.5 is 1.40625 +- 0.1
  run(3, [] {
    ExperimentConfig c;
    c.beta = 0.5;
    c.n_modes = 4096;
    c.reps = 5000;
    c.seed = 3;
    const auto rec = detail::suite_moments(c);
    const double slope = rec.summary["slope"].get<double>();
    const double theory = rec.summary["theory"].get<double>();
    return std::pair{rec.summary["within_tolerance"].get<bool>(),
                     fmt("moment slope p = 1.5, beta = 0.5, 5000 reps: %.4f vs %.5f "
                         "(need within 0.1)",
                         slope, theory)};
  });

  // 4: negative moments stay flat across the mode-cutoff ladder
  run(4, [] {
    ExperimentConfig c;
    c.beta = 0.5;
    c.reps = 2000;
    c.seed = 4;
    const auto rec = detail::suite_negative_moments(c);
    double lo = 1.0, hi = 1.0;
    for (const auto& row : rec.summary["rows"])
      if (row.contains("ratio")) {
        lo = std::min(lo, row["ratio"].get<double>());
        hi = std::max(hi, row["ratio"].get<double>());
      }
    return std::pair{rec.summary["ratios_stable"].get<bool>(),
                     fmt("negative moments q in {0.5, 1}, cutoffs 256..2048: successive "
                         "ratios in [%.3f, %.3f] (need within [0.8, 1.25])",
                         lo, hi)};
  });

  // 5: radial quadrature is exact for K = 1 and exactly additive in the radius
  run(5, [] {
    const std::vector<std::complex<double>> zero(16 * 16, 0.0);
    const auto f = dilatation_from_mu_grid(zero, 16, 10.0);
    const double e = std::numbers::e;
    const double whole = lehto_integral(f, {0.0, 0.0}, 1.0, e).value;
    const double split = lehto_integral(f, {0.0, 0.0}, 1.0, 1.7).value +
                         lehto_integral(f, {0.0, 0.0}, 1.7, e).value;
    const double dev = std::abs(whole - 1.0 / (2.0 * std::numbers::pi));
    const double add = std::abs(split - whole);
    return std::pair{dev <= 1e-8 && add <= 1e-8,
                     fmt("unit-distortion annulus value off by %.2e, split-radius "
                         "additivity off by %.2e (both need <= 1e-8)",
                         dev, add)};
  });

  // 6: solver reproduces the closed-form disk-indicator map on a 512^2 grid
  run(6, [] {
    const std::size_t n = 512;
    const double side = 4.0, h = side / double(n);
    const auto map = solve_beltrami(indicator_disk_mu_grid(0.3, n));
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> z{-0.5 * side + (double(i) + 0.5) * h,
                                     -0.5 * side + (double(j) + 0.5) * h};
        worst = std::max(worst, std::abs(map.f[j * n + i] - disk_indicator_map(0.3, z)));
      }
    const auto curve = welding_curve(map, 1024);
    const double haus = curve_hausdorff(curve.points, ellipse_oracle(4096));
    return std::pair{worst <= 5e-3 && haus <= 5e-3,
                     fmt("indicator dilatation 0.3 at 512^2: max node error %.2e, curve "
                         "Hausdorff to ellipse %.2e (both need <= 5e-3)",
                         worst, haus)};
  });

  // 7 + 8: grid ladder tightens the welding round-trip, and every solved map
  //        clears the annulus distortion bound
  std::vector<std::string> ladder_fail, distortion_fail;
  int decreasing_seeds = 0;
  bool final_ok = true;
  double worst_final = 0.0;
  try {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      std::vector<double> errs;
      for (const std::size_t grid : {std::size_t(256), std::size_t(512), std::size_t(1024)}) {
        ExperimentConfig c;
        c.beta = 0.3;
        c.n_modes = 256;
        c.level = 8;
        c.plane_grid = grid;
        c.seed = seed;
        c.out_dir = base + "/ladder-s" + std::to_string(seed) + "-g" + std::to_string(grid);
        const auto rec = run_pipeline(c);
        errs.push_back(rec.summary["roundtrip"]["error"].get<double>());
        if (!rec.summary["distortion"]["holds"].get<bool>())
          distortion_fail.push_back("s" + std::to_string(seed) + "/g" + std::to_string(grid));
      }
      if (errs[0] > errs[1] && errs[1] > errs[2]) ++decreasing_seeds;
      else ladder_fail.push_back("s" + std::to_string(seed));
      worst_final = std::max(worst_final, errs[2]);
      final_ok = final_ok && errs[2] <= 0.05;
    }
    report(7, decreasing_seeds >= 9 && final_ok,
           fmt("round-trip ladder 256/512/1024, beta = 0.3: strictly decreasing on %d/10 "
               "seeds (need >= 9), worst final error %.4f (need <= 0.05)",
               decreasing_seeds, worst_final));
    report(8, distortion_fail.empty(),
           fmt("annulus distortion bound on all 30 ladder maps: %zu violations (need 0)",
               distortion_fail.size()));
  } catch (const std::exception& e) {
    report(7, false, std::string("exception: ") + e.what());
    report(8, false, "skipped: ladder runs failed");
  }

  // 9: small-radius clearance probability decays in the ring count
  run(9, [] {
    ExperimentConfig c;
    c.beta = 0.5;
    c.n_modes = 4096;
    c.reps = 2000;
    c.seed = 9;
    const auto rec = detail::suite_lehto_tail(c);
    std::string ps;
    for (const auto& row : rec.summary["rows"])
      ps += fmt("%s%.3f", ps.empty() ? "" : ", ", row["p_hat"].get<double>());
    const bool ok = rec.summary["non_increasing"].get<bool>() &&
                    rec.summary["wilson_separated"].get<bool>();
    return std::pair{ok, fmt("tail decay, rho = 1/8, 2000 reps: p-hat = {%s} non-increasing "
                             "with separated N = 1 and N = 4 Wilson intervals",
                             ps.c_str())};
  });

  // 10: every welded curve keeps a positive modulus exponent; smooth controls
  //     calibrate the estimator at 1
  run(10, [&] {
    double min_alpha = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      ExperimentConfig c;
      c.beta = 0.5;
      c.n_modes = 256;
      c.level = 8;
      c.plane_grid = 256;
      c.seed = seed;
      c.out_dir = base + "/holder-s" + std::to_string(seed);
      min_alpha = std::min(min_alpha,
                           run_pipeline(c).summary["alpha"]["estimate"].get<double>());
    }
    const double a_circle = holder_estimate(analytic_curve(1024, false)).alpha;
    const double a_ellipse = holder_estimate(analytic_curve(1024, true)).alpha;
    const bool controls = std::abs(a_circle - 1.0) <= 0.02 && std::abs(a_ellipse - 1.0) <= 0.02;
    return std::pair{min_alpha > 0.05 && controls,
                     fmt("modulus exponent over 100 seeds: min alpha %.4f (need > 0.05); "
                         "circle control %.4f, ellipse control %.4f (need 1 +- 0.02)",
                         min_alpha, a_circle, a_ellipse)};
  });

  // 11: the level resolved distortion integral keeps shrinking at the three
  //     finest Whitney levels on every seed
  run(11, [] {
    int bad = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const auto m = chaos_masses(sample_fourier_field(64, seed), 0.5, 10);
      const auto& s = k_integrability_probe(m).level_sums;
      const std::size_t n = s.size();
      if (!(s[n - 3] > s[n - 2] && s[n - 2] > s[n - 1])) ++bad;
    }
    return std::pair{bad == 0, fmt("Whitney level sums, beta = 0.5, 50 seeds: %d seeds with "
                                   "non-decreasing finest levels (need 0)",
                                   bad)};
  });

  std::printf("%d/11 criteria passed\n", 11 - g_failures);
  return g_failures;
}
