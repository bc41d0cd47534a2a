#pragma once

// Experiment configuration, the end-to-end pipeline (sample -> measure ->
// extend -> transfer -> truncate -> solve -> weld -> verify), the named
// statistical suites, and plot-table emission.  All statistics are
// deterministic under a fixed config; wall-clock timings are segregated
// into their own file so result files reproduce byte-for-byte.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "weldlab/io.hpp"
#include "weldlab/lehto.hpp"

namespace weldlab {

inline constexpr char kVersion[] = "weldlab 0.1.0";

// knot cells thinner than this fraction of the mean abort the solve chain
inline constexpr double kMinKnotCellFraction = 1e-12;

// ---------------------------------------------------------------------------
// Configuration

struct ExperimentConfig {
  double beta = 0.3;
  std::string backend = "fourier";  // fourier | band
  std::size_t n_modes = 256;        // fourier cutoff
  std::size_t band_levels = 9;      // band-ladder depth
  double rho = 0.5;                 // band-ladder ratio
  std::size_t level = 8;            // dyadic measure level
  std::size_t strip_grid = 256;     // strip-chart dilatation export
  std::size_t disk_grid = 256;      // disk-chart dilatation export
  std::size_t plane_grid = 256;     // solver grid (also the pipeline mu grid)
  std::vector<std::size_t> ell_ladder = {1, 2, 4, 8};
  std::size_t reps = 200;
  std::uint64_t seed = 1;
  double tol = 1e-10;        // solver fixed-point tolerance
  double tol_accept = 0.05;  // summary reporting tolerance
  bool override_beta_guard = false;
  std::string out_dir = "out";

  void validate() const {
    if (beta * beta >= 2.0 && !override_beta_guard)
      throw std::invalid_argument(
          "config: beta^2 >= 2 leaves the square-integrable phase; pass the override to "
          "proceed");
    if (backend != "fourier" && backend != "band")
      throw std::invalid_argument("config: backend must be fourier or band");
    for (const auto [name, g] : {std::pair<const char*, std::size_t>{"strip_grid", strip_grid},
                                 {"disk_grid", disk_grid},
                                 {"plane_grid", plane_grid}})
      if (g == 0 || (g & (g - 1)) != 0)
        throw std::invalid_argument(std::string("config: ") + name +
                                    " must be a power of two");
    if (reps < 1) throw std::invalid_argument("config: reps >= 1");
    if (ell_ladder.empty()) throw std::invalid_argument("config: ell_ladder non-empty");
    for (const auto ell : ell_ladder)
      if (ell < 1) throw std::invalid_argument("config: ladder entries must be >= 1");
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("config: rho in (0,1)");
    if (!(tol > 0.0)) throw std::invalid_argument("config: tol > 0");
  }

  /** Sorted key=value serialization; the basis of the config hash. */
  std::string canonical() const {
    std::ostringstream s;
    s << std::setprecision(17);
    s << "backend=" << backend << "\n";
    s << "band_levels=" << band_levels << "\n";
    s << "beta=" << beta << "\n";
    s << "disk_grid=" << disk_grid << "\n";
    s << "ell_ladder=";
    for (std::size_t i = 0; i < ell_ladder.size(); ++i)
      s << ell_ladder[i] << (i + 1 < ell_ladder.size() ? "," : "");
    s << "\n";
    s << "level=" << level << "\n";
    s << "n_modes=" << n_modes << "\n";
    s << "out_dir=" << out_dir << "\n";
    s << "override_beta_guard=" << (override_beta_guard ? "true" : "false") << "\n";
    s << "plane_grid=" << plane_grid << "\n";
    s << "reps=" << reps << "\n";
    s << "rho=" << rho << "\n";
    s << "seed=" << seed << "\n";
    s << "strip_grid=" << strip_grid << "\n";
    s << "tol=" << tol << "\n";
    s << "tol_accept=" << tol_accept << "\n";
    return s.str();
  }

  std::string hash() const {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(canonical());
    return s.str();
  }

  json to_json() const {
    json j;
    j["backend"] = backend;
    j["band_levels"] = band_levels;
    j["beta"] = beta;
    j["disk_grid"] = disk_grid;
    j["ell_ladder"] = ell_ladder;
    j["level"] = level;
    j["n_modes"] = n_modes;
    j["out_dir"] = out_dir;
    j["override_beta_guard"] = override_beta_guard;
    j["plane_grid"] = plane_grid;
    j["reps"] = reps;
    j["rho"] = rho;
    j["seed"] = seed;
    j["strip_grid"] = strip_grid;
    j["tol"] = tol;
    j["tol_accept"] = tol_accept;
    return j;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::size_t> parse_size_list(std::string v) {
  if (!v.empty() && v.front() == '[') v = v.substr(1);
  if (!v.empty() && v.back() == ']') v.pop_back();
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stoull(item));
  }
  return out;
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: boolean expected for " + key + ", got " + v);
}

}  // namespace detail

/** Applies one key=value pair; unknown keys are rejected by name. */
inline void apply_config_kv(ExperimentConfig& c, const std::string& key,
                            const std::string& value) {
  const std::string v = detail::trim(value);
  auto unquote = [&] {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
      return v.substr(1, v.size() - 2);
    return v;
  };
  if (key == "beta") c.beta = std::stod(v);
  else if (key == "backend") c.backend = unquote();
  else if (key == "n_modes") c.n_modes = std::stoull(v);
  else if (key == "band_levels") c.band_levels = std::stoull(v);
  else if (key == "rho") c.rho = std::stod(v);
  else if (key == "level") c.level = std::stoull(v);
  else if (key == "strip_grid") c.strip_grid = std::stoull(v);
  else if (key == "disk_grid") c.disk_grid = std::stoull(v);
  else if (key == "plane_grid") c.plane_grid = std::stoull(v);
  else if (key == "ell_ladder") c.ell_ladder = detail::parse_size_list(v);
  else if (key == "reps") c.reps = std::stoull(v);
  else if (key == "seed") c.seed = std::stoull(v);
  else if (key == "tol") c.tol = std::stod(v);
  else if (key == "tol_accept") c.tol_accept = std::stod(v);
  else if (key == "override_beta_guard") c.override_beta_guard = detail::parse_bool(v, key);
  else if (key == "out_dir") c.out_dir = unquote();
  else throw std::invalid_argument("config: unknown key " + key);
}

/**
 * Minimal TOML-style file: key = value lines, # comments, [section] headers
 * tolerated and flattened.  Precedence is CLI > file > defaults, so the
 * caller applies CLI overrides after this.
 */
inline ExperimentConfig load_config_file(const std::string& path,
                                         ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') continue;  // section headers carry no scope
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not key = value");
    apply_config_kv(base, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

// ---------------------------------------------------------------------------
// Run records

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunRecord {
  std::string suite;  // pipeline or suite name
  ExperimentConfig config;
  std::string config_hash;
  std::string version = kVersion;
  std::string seed_provenance;
  std::vector<StageTiming> timings;
  std::vector<std::string> artifacts;
  json summary;
  WeldingCurve curve;  // set by the pipeline; plot emission reads it

  /** Writes record.json (deterministic) and timings.json (wall clock). */
  std::string write(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    json rec;
    rec["schema"] = "weldlab-record/1";
    rec["suite"] = suite;
    rec["version"] = version;
    rec["config_hash"] = config_hash;
    rec["config"] = config.to_json();
    rec["seed_provenance"] = seed_provenance;
    rec["artifacts"] = artifacts;
    rec["summary"] = summary;
    const std::string rec_path = dir + "/" + suite + ".record.json";
    write_json(rec_path, rec);
    json tj;
    tj["config_hash"] = config_hash;
    tj["stages"] = json::array();
    for (const auto& t : timings) tj["stages"].push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    write_json(dir + "/" + suite + ".timings.json", tj);
    return rec_path;
  }
};

namespace detail {

class StageClock {
 public:
  explicit StageClock(RunRecord& rec) : rec_(rec) {}

  template <class Fn>
  auto run(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record(stage, t0);
      } else {
        auto out = fn();
        record(stage, t0);
        return out;
      }
    } catch (const std::exception& e) {
      record(stage, t0);
      throw std::runtime_error("stage " + stage + ": " + e.what());
    }
  }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point t0) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    rec_.timings.push_back({stage, dt.count()});
  }

  RunRecord& rec_;
};

inline FieldRealization sample_stage_field(const ExperimentConfig& c, std::uint64_t stream) {
  if (c.backend == "band")
    return sample_band_field(int(c.band_levels), c.seed, 8192, c.rho, stream);
  return sample_fourier_field(int(c.n_modes), c.seed, stream);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pipeline

/**
 * Full chain from one field draw to a verified welding: the RunRecord
 * carries the round-trip error, the curve regularity estimate, solver
 * residuals, and the annulus-distortion certificate.
 */
inline RunRecord run_pipeline(const ExperimentConfig& config) {
  config.validate();
  RunRecord rec;
  rec.suite = "pipeline";
  rec.config = config;
  rec.config_hash = config.hash();
  rec.seed_provenance = "root=" + std::to_string(config.seed) + "; stream=pipeline-field/0";
  detail::StageClock clock(rec);
  std::filesystem::create_directories(config.out_dir);

  const auto field = clock.run("sample", [&] {
    return detail::sample_stage_field(config, substream("pipeline-field"));
  });

  const auto measure = clock.run("measure", [&] {
    return chaos_masses(field, config.beta, int(config.level), 8, config.override_beta_guard);
  });
  const auto h = clock.run("measure", [&] { return CircleMap(measure, kMinKnotCellFraction); });

  const auto strip = clock.run("extend", [&] { return StripExtension(h); });
  const auto disk = clock.run("extend", [&] { return DiskExtension(strip); });

  const auto raw_mu = clock.run("transfer", [&] {
    return dilatation_from_mu_grid(disk_mu_on_grid(disk, config.plane_grid), config.plane_grid);
  });

  const std::size_t ell = config.ell_ladder.back();
  const auto trunc = clock.run("truncate", [&] {
    return truncate_dilatation(raw_mu, int(ell));
  });
  const std::string mu_path = config.out_dir + "/dilatation.bin";
  write_dilatation_grid(mu_path, trunc);
  rec.artifacts.push_back(mu_path);

  const auto map = clock.run("solve", [&] { return solve_beltrami(trunc, config.tol); });
  const std::string map_path = config.out_dir + "/plane_map.bin";
  write_plane_map(map_path, map);
  rec.artifacts.push_back(map_path);

  const auto curve = clock.run("weld", [&] { return welding_curve(map, 2048); });
  const auto factors = clock.run("weld", [&] {
    return conformal_factors(map, disk, 2 * config.plane_grid);
  });
  const std::string curve_path = config.out_dir + "/curve.csv";
  write_curve_csv(curve_path, curve, rec.config_hash);
  rec.artifacts.push_back(curve_path);
  rec.curve = curve;

  clock.run("verify", [&] {
    const auto rt = roundtrip_error(factors, h);
    const auto alpha = holder_estimate(curve);
    const auto rim = rim_fit(map);
    const int bad_cells = jacobian_orientation_violations(map);

    const auto lehto = lehto_integral(trunc, {0.0, 0.0}, 1.0, 2.0);
    std::vector<std::complex<double>> inner, outer;
    for (int k = 0; k < 512; ++k) {
      const double th = 2.0 * std::numbers::pi * double(k) / 512.0;
      inner.push_back(map.value_at(std::polar(1.0, th)));
      outer.push_back(map.value_at(std::polar(2.0, th)));
    }
    const auto distortion = annulus_distortion_check(lehto, inner, outer);

    json s;
    s["mass_total"] = measure.total;
    s["min_knot_cell_fraction"] = h.min_cell_fraction();
    s["ell"] = ell;
    s["solver"] = {{"residual", map.residual},
                   {"iterations", map.iterations},
                   {"mu_inf", map.mu_inf}};
    s["rim"] = {{"mean_abs_deviation", rim.mean_abs_deviation},
                {"rms_after_fit", rim.rms_after_fit}};
    s["jacobian_violations"] = bad_cells;
    s["roundtrip"] = {{"error", rt.error},
                      {"monotone", rt.monotone},
                      {"violations", rt.violations}};
    s["alpha"] = {{"estimate", alpha.alpha}, {"stderr", alpha.alpha_stderr}};
    s["distortion"] = {{"lehto", lehto.value},
                       {"d_inner", distortion.d_inner},
                       {"d_outer", distortion.d_outer},
                       {"ratio", distortion.ratio},
                       {"bound", distortion.bound},
                       {"holds", distortion.holds}};
    rec.summary = s;
  });
  return rec;
}

// ---------------------------------------------------------------------------
// Suites

namespace detail {

inline RunRecord suite_covariance(const ExperimentConfig& c) {
  RunRecord rec;
  rec.suite = "covariance";
  const std::vector<double> ds = {0.05, 0.1, 0.25, 0.5};
  json rows = json::array();
  bool all_within_se = true, all_within_trace = true;
  std::vector<std::vector<double>> per_d(ds.size());
  for (std::size_t rep = 0; rep < c.reps; ++rep) {
    const auto f = sample_fourier_field(int(c.n_modes), c.seed, substream("covariance", rep));
    for (std::size_t di = 0; di < ds.size(); ++di) {
      // quadratic-form estimator: E (A_n^2+B_n^2)/2 = 1 termwise
      double est = 0.0;
      for (std::size_t n = 1; n <= f.coef_a.size(); ++n)
        est += std::cos(2.0 * std::numbers::pi * double(n) * ds[di]) / double(n) *
               0.5 * (f.coef_a[n - 1] * f.coef_a[n - 1] + f.coef_b[n - 1] * f.coef_b[n - 1]);
      per_d[di].push_back(est);
    }
  }
  for (std::size_t di = 0; di < ds.size(); ++di) {
    const double est = mean(per_d[di]);
    const double se = stderr_of_mean(per_d[di]);
    const double trunc = covariance_truncated(int(c.n_modes), ds[di]);
    const double trace = covariance_oracle_trace(ds[di]);
    all_within_se = all_within_se && std::abs(est - trunc) <= 3.0 * se;
    all_within_trace = all_within_trace && std::abs(est - trace) <= 0.05;
    rows.push_back({{"d", ds[di]},
                    {"estimate", est},
                    {"stderr", se},
                    {"truncated", trunc},
                    {"trace", trace}});
  }
  rec.summary["rows"] = rows;
  rec.summary["within_3se"] = all_within_se;
  rec.summary["within_trace_tolerance"] = all_within_trace;
  return rec;
}

inline RunRecord suite_martingale(const ExperimentConfig& c) {
  RunRecord rec;
  rec.suite = "martingale";
  const std::vector<std::pair<double, double>> intervals = {{0.0, 0.5}, {0.0, 0.25}};
  std::vector<std::vector<double>> per_i(intervals.size());
  for (std::size_t rep = 0; rep < c.reps; ++rep) {
    const auto f = sample_stage_field(c, substream("martingale", rep));
    const auto m = chaos_masses(f, c.beta, int(c.level), 8, c.override_beta_guard);
    for (std::size_t ii = 0; ii < intervals.size(); ++ii)
      per_i[ii].push_back(interval_mass(m, intervals[ii].first, intervals[ii].second));
  }
  json rows = json::array();
  bool ok = true;
  for (std::size_t ii = 0; ii < intervals.size(); ++ii) {
    const double est = mean(per_i[ii]);
    const double se = stderr_of_mean(per_i[ii]);
    const double len = intervals[ii].second - intervals[ii].first;
    ok = ok && std::abs(est - len) <= 3.0 * se;
    rows.push_back({{"lo", intervals[ii].first},
                    {"hi", intervals[ii].second},
                    {"estimate", est},
                    {"stderr", se},
                    {"expected", len}});
  }
  rec.summary["rows"] = rows;
  rec.summary["within_3se"] = ok;
  return rec;
}

inline RunRecord suite_moments(const ExperimentConfig& c) {
  RunRecord rec;
  rec.suite = "moments";
  const double p = 1.5;
  const auto est = moment_scaling_estimate(c.beta, p, {3, 4, 5, 6, 7, 8}, int(c.reps),
                                           int(c.n_modes), c.seed);
  const double theory = p - c.beta * c.beta * (p * p - p) / 2.0;
  json rows = json::array();
  for (std::size_t i = 0; i < est.levels.size(); ++i)
    rows.push_back({{"level", est.levels[i]},
                    {"log_size", est.log_size[i]},
                    {"log_moment", est.log_moment[i]}});
  rec.summary["rows"] = rows;
  rec.summary["slope"] = est.slope;
  rec.summary["slope_stderr"] = est.slope_stderr;
  rec.summary["intercept"] = est.intercept;
  rec.summary["theory"] = theory;
  rec.summary["p"] = p;
  rec.summary["within_tolerance"] = std::abs(est.slope - theory) <= 0.1;
  return rec;
}

inline RunRecord suite_negative_moments(const ExperimentConfig& c) {
  RunRecord rec;
  rec.suite = "negative_moments";
  json rows = json::array();
  bool stable = true;
  for (const double q : {0.5, 1.0}) {
    const auto probe =
        negative_moment_probe(c.beta, q, {256, 512, 1024, 2048}, int(c.reps), c.seed);
    for (std::size_t i = 0; i < probe.cutoffs.size(); ++i) {
      json row = {{"q", q},
                  {"cutoff", probe.cutoffs[i]},
                  {"estimate", probe.estimate[i]},
                  {"stderr", probe.stderr_of_estimate[i]}};
      if (i > 0) {
        const double ratio = probe.estimate[i] / probe.estimate[i - 1];
        row["ratio"] = ratio;
        stable = stable && ratio >= 0.8 && ratio <= 1.25;
      }
      rows.push_back(row);
    }
  }
  rec.summary["rows"] = rows;
  rec.summary["ratios_stable"] = stable;
  return rec;
}

inline RunRecord suite_scaling(const ExperimentConfig& c) {
  RunRecord rec;
  rec.suite = "scaling";
  const auto probe = scaling_ratio_probe(c.beta, c.rho, c.rho, int(c.band_levels),
                                         int(c.reps), 8192, c.seed);
  rec.summary["ks"] = probe.ks;
  rec.summary["ks_critical"] = probe.ks_critical;
  rec.summary["lambda"] = probe.lambda;
  rec.summary["rho"] = probe.rho;
  rec.summary["bands"] = probe.bands;
  rec.summary["consistent"] = probe.consistent;
  return rec;
}

inline RunRecord suite_lehto_tail(const ExperimentConfig& c) {
  RunRecord rec;
  rec.suite = "lehto_tail";
  const double rho = 0.125;
  const int n_max = 4;
  const auto samples =
      lehto_tail_samples(c.beta, rho, n_max, int(c.reps), c.seed, int(c.n_modes));
  std::vector<double> first;
  for (const auto& row : samples) first.push_back(row[0]);
  const double delta = quantile(first, 0.3);
  json rows = json::array();
  double prev_p = 1.0;
  bool non_increasing = true;
  double lo1 = 0.0, hi4 = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const auto est = tail_estimate_from_samples(samples, n, delta, c.beta, rho, c.seed);
    if (n == 1) lo1 = est.wilson_lo;
    if (n == n_max) hi4 = est.wilson_hi;
    non_increasing = non_increasing && est.p_hat <= prev_p + 1e-12;
    prev_p = est.p_hat;
    rows.push_back({{"n", n},
                    {"hits", est.hits},
                    {"reps", est.reps},
                    {"p_hat", est.p_hat},
                    {"wilson_lo", est.wilson_lo},
                    {"wilson_hi", est.wilson_hi}});
  }
  rec.summary["rows"] = rows;
  rec.summary["delta"] = delta;
  rec.summary["non_increasing"] = non_increasing;
  rec.summary["wilson_separated"] = hi4 < lo1;
  return rec;
}

inline RunRecord suite_integrability(const ExperimentConfig& c) {
  RunRecord rec;
  rec.suite = "integrability";
  // the three finest Whitney levels must lie past the pair-count saturation
  // scale, where the uniform-measure level sums halve step by step
  if (c.level < 9)
    throw std::invalid_argument(
        "integrability suite: measure level >= 9 required for three informative "
        "Whitney levels");
  int violations = 0;
  json rows = json::array();
  for (std::size_t rep = 0; rep < c.reps; ++rep) {
    const auto f = sample_stage_field(c, substream("integrability", rep));
    const auto m = chaos_masses(f, c.beta, int(c.level), 8, c.override_beta_guard);
    const auto probe = k_integrability_probe(m);
    const auto& s = probe.level_sums;
    const std::size_t n = s.size();
    const bool decreasing = s[n - 3] > s[n - 2] && s[n - 2] > s[n - 1];
    if (!decreasing) ++violations;
    rows.push_back({{"rep", rep},
                    {"total", probe.total},
                    {"finest", {s[n - 3], s[n - 2], s[n - 1]}},
                    {"decreasing", decreasing}});
  }
  rec.summary["rows"] = rows;
  rec.summary["violations"] = violations;
  return rec;
}

inline RunRecord suite_welding(const ExperimentConfig& c) {
  RunRecord rec;
  rec.suite = "welding";
  json rows = json::array();
  double prev = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  for (const std::size_t g : {c.plane_grid, 2 * c.plane_grid}) {
    ExperimentConfig stage = c;
    stage.plane_grid = g;
    stage.out_dir = c.out_dir + "/welding-g" + std::to_string(g);
    const auto sub = run_pipeline(stage);
    const double err = sub.summary["roundtrip"]["error"].get<double>();
    decreasing = decreasing && err < prev;
    prev = err;
    rows.push_back({{"grid", g},
                    {"roundtrip_error", err},
                    {"alpha", sub.summary["alpha"]["estimate"].get<double>()},
                    {"residual", sub.summary["solver"]["residual"].get<double>()}});
    for (const auto& a : sub.artifacts) rec.artifacts.push_back(a);
    rec.curve = sub.curve;
  }
  rec.summary["rows"] = rows;
  rec.summary["decreasing"] = decreasing;
  return rec;
}

}  // namespace detail

/** Dispatches one named statistical suite and writes its record files. */
inline RunRecord run_suite(const std::string& name, const ExperimentConfig& config) {
  config.validate();
  RunRecord rec;
  if (name == "covariance") rec = detail::suite_covariance(config);
  else if (name == "martingale") rec = detail::suite_martingale(config);
  else if (name == "moments") rec = detail::suite_moments(config);
  else if (name == "negative_moments") rec = detail::suite_negative_moments(config);
  else if (name == "scaling") rec = detail::suite_scaling(config);
  else if (name == "lehto_tail") rec = detail::suite_lehto_tail(config);
  else if (name == "integrability") rec = detail::suite_integrability(config);
  else if (name == "welding") rec = detail::suite_welding(config);
  else
    throw std::invalid_argument(
        "run_suite: unknown suite " + name +
        " (covariance, martingale, moments, negative_moments, scaling, lehto_tail, "
        "integrability, welding)");
  rec.config = config;
  rec.config_hash = config.hash();
  rec.seed_provenance =
      "root=" + std::to_string(config.seed) + "; stream=" + rec.suite + "/<rep>";
  rec.summary["suite"] = rec.suite;
  return rec;
}

/** Writes plot-ready CSV tables next to a record's other outputs. */
inline std::vector<std::string> emit_plots(const RunRecord& rec) {
  const std::string dir = rec.config.out_dir + "/plots";
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  const auto& s = rec.summary;
  if (!rec.curve.points.empty()) {
    const std::string p = dir + "/curve_trace.csv";
    write_curve_csv(p, rec.curve, rec.config_hash);
    files.push_back(p);
  }
  if (rec.suite == "covariance" && s.contains("rows")) {
    std::vector<std::vector<double>> rows;
    for (const auto& r : s["rows"])
      rows.push_back({r["d"].get<double>(), r["estimate"].get<double>(),
                      r["stderr"].get<double>(), r["truncated"].get<double>(),
                      r["trace"].get<double>()});
    const std::string p = dir + "/covariance.csv";
    write_csv(p, {"d", "estimate", "stderr", "truncated", "trace"}, rows, rec.config_hash);
    files.push_back(p);
  }
  if (rec.suite == "moments" && s.contains("rows")) {
    // fitted line next to the closed-form exponent line
    std::vector<std::vector<double>> rows;
    const double slope = s["slope"].get<double>();
    const double intercept = s["intercept"].get<double>();
    const double theory = s["theory"].get<double>();
    double theory_anchor = 0.0;
    if (!s["rows"].empty())
      theory_anchor = s["rows"][0]["log_moment"].get<double>() -
                      theory * s["rows"][0]["log_size"].get<double>();
    for (const auto& r : s["rows"]) {
      const double lx = r["log_size"].get<double>(), ly = r["log_moment"].get<double>();
      rows.push_back({r["level"].get<double>(), lx, ly, intercept + slope * lx,
                      theory_anchor + theory * lx});
    }
    const std::string p = dir + "/moment_fit.csv";
    write_csv(p, {"level", "log_size", "log_moment", "fit", "theory"}, rows,
              rec.config_hash);
    files.push_back(p);
  }
  if (rec.suite == "lehto_tail" && s.contains("rows")) {
    std::vector<std::vector<double>> rows;
    for (const auto& r : s["rows"])
      rows.push_back({r["n"].get<double>(), r["p_hat"].get<double>(),
                      r["wilson_lo"].get<double>(), r["wilson_hi"].get<double>()});
    const std::string p = dir + "/tail_decay.csv";
    write_csv(p, {"n", "p_hat", "wilson_lo", "wilson_hi"}, rows, rec.config_hash);
    files.push_back(p);
  }
  return files;
}

}  // namespace weldlab
