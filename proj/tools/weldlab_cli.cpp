// Command-line front end: sampling, measuring, extending, solving, welding,
// statistical suites, and the full pipeline, driven by one config with
// CLI > file > defaults precedence.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weldlab/harness.hpp"

namespace {

using weldlab::ExperimentConfig;

void emit_record(weldlab::RunRecord& rec) {
  const std::string path = rec.write(rec.config.out_dir);
  for (const auto& p : weldlab::emit_plots(rec)) std::cout << "plot " << p << "\n";
  std::cout << "record " << path << "\n";
}

int cmd_sample(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto field = weldlab::detail::sample_stage_field(cfg, weldlab::substream("cli-sample"));
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  if (field.backend == weldlab::FieldBackend::fourier) {
    header = {"n", "a", "b"};
    for (std::size_t n = 0; n < field.coef_a.size(); ++n)
      rows.push_back({double(n + 1), field.coef_a[n], field.coef_b[n]});
  } else {
    header = {"t", "x"};
    for (std::size_t j = 0; j < field.band_values.size(); ++j)
      rows.push_back({double(j) / double(field.band_values.size()), field.band_values[j]});
  }
  const std::string path = cfg.out_dir + "/field.csv";
  weldlab::write_csv(path, header, rows, cfg.hash());
  std::cout << "variance " << field.variance << "\n" << "wrote " << path << "\n";
  return 0;
}

int cmd_measure(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto field = weldlab::detail::sample_stage_field(cfg, weldlab::substream("cli-sample"));
  const auto m =
      weldlab::chaos_masses(field, cfg.beta, int(cfg.level), 8, cfg.override_beta_guard);
  const auto masses = weldlab::interval_masses(m, int(cfg.level));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < masses.size(); ++i) rows.push_back({double(i), masses[i]});
  const std::string path = cfg.out_dir + "/masses.csv";
  weldlab::write_csv(path, {"index", "mass"}, rows, cfg.hash());
  std::cout << "total " << m.total << "\n" << "wrote " << path << "\n";
  return 0;
}

int cmd_extend(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto field = weldlab::detail::sample_stage_field(cfg, weldlab::substream("cli-sample"));
  const auto m =
      weldlab::chaos_masses(field, cfg.beta, int(cfg.level), 8, cfg.override_beta_guard);
  const weldlab::CircleMap h(m, weldlab::kMinKnotCellFraction);
  const weldlab::StripExtension strip(h);
  const auto strip_field =
      weldlab::sample_strip_dilatation(strip, cfg.strip_grid, cfg.strip_grid / 2);
  weldlab::write_dilatation_grid(cfg.out_dir + "/strip_mu.bin", strip_field);
  weldlab::write_dilatation_csv(cfg.out_dir + "/strip_mu.csv", strip_field, cfg.hash());
  const weldlab::DiskExtension disk(strip);
  const auto disk_field = weldlab::dilatation_from_mu_grid(
      weldlab::disk_mu_on_grid(disk, cfg.disk_grid), cfg.disk_grid);
  weldlab::write_dilatation_grid(cfg.out_dir + "/disk_mu.bin", disk_field);
  weldlab::write_dilatation_csv(cfg.out_dir + "/disk_mu.csv", disk_field, cfg.hash());
  std::cout << "wrote " << cfg.out_dir << "/strip_mu.bin " << cfg.out_dir << "/disk_mu.bin\n";
  return 0;
}

int cmd_solve(const ExperimentConfig& cfg, const std::string& in_grid) {
  std::filesystem::create_directories(cfg.out_dir);
  weldlab::DilatationField mu;
  if (!in_grid.empty()) {
    mu = weldlab::read_dilatation_grid(in_grid);
  } else {
    const auto field =
        weldlab::detail::sample_stage_field(cfg, weldlab::substream("cli-sample"));
    const auto m =
        weldlab::chaos_masses(field, cfg.beta, int(cfg.level), 8, cfg.override_beta_guard);
    const weldlab::CircleMap h(m, weldlab::kMinKnotCellFraction);
    const weldlab::StripExtension strip(h);
    const weldlab::DiskExtension disk(strip);
    mu = weldlab::dilatation_from_mu_grid(weldlab::disk_mu_on_grid(disk, cfg.plane_grid),
                                          cfg.plane_grid);
  }
  const auto trunc = weldlab::truncate_dilatation(mu, int(cfg.ell_ladder.back()));
  const auto map = weldlab::solve_beltrami(trunc, cfg.tol);
  weldlab::write_plane_map(cfg.out_dir + "/plane_map.bin", map);
  std::cout << "residual " << map.residual << "\niterations " << map.iterations
            << "\nwrote " << cfg.out_dir << "/plane_map.bin\n";
  return 0;
}

int cmd_pipeline(const ExperimentConfig& cfg, bool verbose_summary) {
  auto rec = weldlab::run_pipeline(cfg);
  emit_record(rec);
  if (verbose_summary) {
    std::cout << "roundtrip " << rec.summary["roundtrip"]["error"].get<double>() << "\n";
    std::cout << "alpha " << rec.summary["alpha"]["estimate"].get<double>() << "\n";
    std::cout << "residual " << rec.summary["solver"]["residual"].get<double>() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conformal welding of multiplicative-chaos circle maps"};
  app.require_subcommand(1);
  app.fallthrough(true);

  std::string config_file, out_dir, backend, in_grid, suite_name;
  double beta = 0.0, tol = 0.0;
  std::uint64_t modes = 0, level = 0, grid = 0, ell = 0, reps = 0, seed = 0;
  bool override_guard = false;

  app.add_option("--config", config_file, "config file (key = value lines)");
  app.add_option("--beta", beta, "chaos inverse temperature");
  app.add_option("--modes", modes, "fourier mode cutoff");
  app.add_option("--level", level, "dyadic measure level");
  app.add_option("--grid", grid, "grid size (sets strip, disk, and plane grids)");
  app.add_option("--ell", ell, "dilatation truncation index");
  app.add_option("--reps", reps, "replicate count");
  app.add_option("--seed", seed, "root seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--tol", tol, "solver tolerance");
  app.add_option("--backend", backend, "field backend: fourier | band");
  app.add_flag("--override-beta-guard", override_guard,
               "permit beta^2 >= 2 (outside the square-integrable phase)");

  auto* sc_sample = app.add_subcommand("sample", "draw one field realization");
  auto* sc_measure = app.add_subcommand("measure", "chaos masses at the dyadic level");
  auto* sc_extend = app.add_subcommand("extend", "export strip and disk dilatation grids");
  auto* sc_solve = app.add_subcommand("solve", "solve the truncated plane map");
  sc_solve->add_option("--in", in_grid, "solve a dilatation grid file instead of sampling");
  auto* sc_weld = app.add_subcommand("weld", "pipeline run reporting the round-trip");
  auto* sc_suite = app.add_subcommand("suite", "run one statistical suite");
  sc_suite->add_option("name", suite_name,
                       "covariance | martingale | moments | negative_moments | scaling | "
                       "lehto_tail | integrability | welding")
      ->required();
  auto* sc_pipeline = app.add_subcommand("pipeline", "full run with plot emission");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg;
    if (!config_file.empty()) cfg = weldlab::load_config_file(config_file);
    if (app.count("--beta")) cfg.beta = beta;
    if (app.count("--modes")) cfg.n_modes = modes;
    if (app.count("--level")) cfg.level = level;
    if (app.count("--grid")) cfg.strip_grid = cfg.disk_grid = cfg.plane_grid = grid;
    if (app.count("--ell")) cfg.ell_ladder = {ell};
    if (app.count("--reps")) cfg.reps = reps;
    if (app.count("--seed")) cfg.seed = seed;
    if (app.count("--out")) cfg.out_dir = out_dir;
    if (app.count("--tol")) cfg.tol = tol;
    if (app.count("--backend")) cfg.backend = backend;
    if (override_guard) cfg.override_beta_guard = true;
    cfg.validate();

    if (sc_sample->parsed()) return cmd_sample(cfg);
    if (sc_measure->parsed()) return cmd_measure(cfg);
    if (sc_extend->parsed()) return cmd_extend(cfg);
    if (sc_solve->parsed()) return cmd_solve(cfg, in_grid);
    if (sc_weld->parsed()) return cmd_pipeline(cfg, true);
    if (sc_pipeline->parsed()) return cmd_pipeline(cfg, false);
    if (sc_suite->parsed()) {
      auto rec = weldlab::run_suite(suite_name, cfg);
      emit_record(rec);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
