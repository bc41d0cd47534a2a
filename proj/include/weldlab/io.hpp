#pragma once

// File formats: binary grids for dilatation fields and solved plane maps,
// CSV dumps for inspection and plotting, and the versioned JSON results
// schema.  Binary payloads are raw little-endian doubles; the sandbox and
// every intended consumer are little-endian.

#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "weldlab/beltrami.hpp"

namespace weldlab {

using json = nlohmann::ordered_json;

inline constexpr char kResultsSchema[] = "weldlab-results/1";

namespace detail {

inline std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

inline std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  return f;
}

template <class T>
void put(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& f, const std::string& path) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!f) throw std::runtime_error("truncated grid file: " + path);
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Binary grids

/**
 * Dilatation grid file: magic "WLGRID01", chart tag (0 strip, 1 disk),
 * dims, origin, spacing, then interleaved complex mu.
 */
inline void write_dilatation_grid(const std::string& path, const DilatationField& f) {
  auto out = detail::open_out(path, true);
  out.write("WLGRID01", 8);
  detail::put(out, std::uint32_t(f.chart == Chart::disk ? 1 : 0));
  detail::put(out, std::uint32_t(f.nx));
  detail::put(out, std::uint32_t(f.ny));
  detail::put(out, f.x0);
  detail::put(out, f.y0);
  detail::put(out, f.dx);
  detail::put(out, f.dy);
  for (const auto& m : f.mu) {
    detail::put(out, m.real());
    detail::put(out, m.imag());
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline DilatationField read_dilatation_grid(const std::string& path) {
  auto in = detail::open_in(path, true);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "WLGRID01", 8) != 0)
    throw std::runtime_error("not a dilatation grid file: " + path);
  DilatationField f;
  f.chart = detail::get<std::uint32_t>(in, path) == 1 ? Chart::disk : Chart::strip;
  f.nx = detail::get<std::uint32_t>(in, path);
  f.ny = detail::get<std::uint32_t>(in, path);
  f.x0 = detail::get<double>(in, path);
  f.y0 = detail::get<double>(in, path);
  f.dx = detail::get<double>(in, path);
  f.dy = detail::get<double>(in, path);
  f.mu.resize(std::size_t(f.nx) * f.ny);
  f.k.resize(f.mu.size());
  for (std::size_t i = 0; i < f.mu.size(); ++i) {
    const double re = detail::get<double>(in, path);
    const double im = detail::get<double>(in, path);
    f.mu[i] = {re, im};
    const double a = std::abs(f.mu[i]);
    if (!(a < 1.0))
      throw std::runtime_error("grid file holds |mu| >= 1 at node " + std::to_string(i) +
                               ": " + path);
    f.k[i] = (1.0 + a) / (1.0 - a);
  }
  return f;
}

/** Solved plane map file: magic "WLMAP001", n, side, solve stats, f, mu. */
inline void write_plane_map(const std::string& path, const PlaneMapGrid& g) {
  auto out = detail::open_out(path, true);
  out.write("WLMAP001", 8);
  detail::put(out, std::uint32_t(g.n));
  detail::put(out, g.side);
  detail::put(out, g.residual);
  detail::put(out, std::int32_t(g.iterations));
  detail::put(out, g.mu_inf);
  for (const auto& v : g.f) {
    detail::put(out, v.real());
    detail::put(out, v.imag());
  }
  for (const auto& v : g.mu) {
    detail::put(out, v.real());
    detail::put(out, v.imag());
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline PlaneMapGrid read_plane_map(const std::string& path) {
  auto in = detail::open_in(path, true);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "WLMAP001", 8) != 0)
    throw std::runtime_error("not a plane map file: " + path);
  PlaneMapGrid g;
  g.n = detail::get<std::uint32_t>(in, path);
  g.side = detail::get<double>(in, path);
  g.residual = detail::get<double>(in, path);
  g.iterations = detail::get<std::int32_t>(in, path);
  g.mu_inf = detail::get<double>(in, path);
  g.f.resize(g.n * g.n);
  g.mu.resize(g.n * g.n);
  for (auto* vec : {&g.f, &g.mu})
    for (auto& v : *vec) {
      const double re = detail::get<double>(in, path);
      const double im = detail::get<double>(in, path);
      v = {re, im};
    }
  return g;
}

// ---------------------------------------------------------------------------
// CSV dumps

/** Rows of doubles under a comma-separated header line. */
inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows,
                      const std::string& config_hash = {}) {
  auto out = detail::open_out(path, false);
  out << std::setprecision(17);
  if (!config_hash.empty()) out << "# config " << config_hash << "\n";
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? ',' : '\n');
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? ',' : '\n');
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_curve_csv(const std::string& path, const WeldingCurve& c,
                            const std::string& config_hash = {}) {
  std::vector<std::vector<double>> rows;
  rows.reserve(c.points.size());
  for (std::size_t i = 0; i < c.points.size(); ++i)
    rows.push_back({c.angles[i], c.points[i].real(), c.points[i].imag()});
  write_csv(path, {"theta", "re", "im"}, rows, config_hash);
}

inline void write_dilatation_csv(const std::string& path, const DilatationField& f,
                                 const std::string& config_hash = {}) {
  std::vector<std::vector<double>> rows;
  rows.reserve(f.mu.size());
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) {
      const std::size_t idx = j * f.nx + i;
      rows.push_back({f.x0 + double(i) * f.dx, f.y0 + double(j) * f.dy,
                      f.mu[idx].real(), f.mu[idx].imag(), f.k[idx]});
    }
  write_csv(path, {"x", "y", "re_mu", "im_mu", "k"}, rows, config_hash);
}

// ---------------------------------------------------------------------------
// JSON results

inline void write_json(const std::string& path, const json& j) {
  auto out = detail::open_out(path, false);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline json read_json(const std::string& path) {
  auto in = detail::open_in(path, false);
  json j;
  in >> j;
  return j;
}

/** Point-estimate result row: {estimate, stderr, reps, seed, config}. */
inline json estimate_result(const std::string& name, double estimate, double stderr_of,
                            std::uint64_t reps, std::uint64_t seed,
                            const std::string& config_hash) {
  json j;
  j["schema"] = kResultsSchema;
  j["name"] = name;
  j["estimate"] = estimate;
  j["stderr"] = stderr_of;
  j["reps"] = reps;
  j["seed"] = seed;
  j["config"] = config_hash;
  return j;
}

/** Tail-probability result row: counts plus the Wilson interval. */
inline json tail_result(const std::string& name, std::uint64_t hits, std::uint64_t reps,
                        double p_hat, double wilson_lo, double wilson_hi,
                        std::uint64_t seed, const std::string& config_hash) {
  json j;
  j["schema"] = kResultsSchema;
  j["name"] = name;
  j["hits"] = hits;
  j["reps"] = reps;
  j["p_hat"] = p_hat;
  j["wilson_lo"] = wilson_lo;
  j["wilson_hi"] = wilson_hi;
  j["seed"] = seed;
  j["config"] = config_hash;
  return j;
}

}  // namespace weldlab
