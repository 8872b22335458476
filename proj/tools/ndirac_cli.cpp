// ndirac: command-line driver for the ground-state solver and the
// diagnostics suite.

#include "ndirac/io.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>

namespace {

using namespace ndirac;
namespace fs = std::filesystem;

constexpr int kExitNotConverged = 2;
constexpr int kExitUsage = 64;
constexpr int kExitSoftware = 70;
constexpr int kExitIo = 74;

int run_solve(const std::string& config_path, const std::string& out_override, bool force) {
  RunConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  cfg.solver.force = force;
  const ProblemModel model = build_model(cfg);
  const GroundStateResult r = minimize_ground_state(model, cfg.solver);
  write_solve_outputs(cfg.output_dir, r, cfg);
  std::printf("c = %.12g\n", r.c);
  std::printf("iterations = %d  converged = %s  wall = %.2fs\n", r.iterations, r.converged ? "yes" : "no", r.wall_time);
  std::printf("residual_full = %.3e  r_self = %.3e  r_minus = %.3e\n", r.residual_full, r.residual.r_self,
              r.residual.r_minus);
  std::printf("t_check = %.10f  fiber_unique = %s\n", r.t_check, r.fiber_unique ? "yes" : "no");
  std::printf("outputs in %s\n", cfg.output_dir.c_str());
  if (r.no_descent) std::fprintf(stderr, "stopped: no descent direction accepted\n");
  return r.converged ? 0 : kExitNotConverged;
}

int run_check(const std::string& config_path, const std::string& out_override) {
  RunConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  const ProblemModel model = build_model(cfg);
  const DiagnosticsReport rep = run_suite(model, cfg.seed);
  write_atomic(fs::path(cfg.output_dir) / "report.json", report_json(rep));
  for (const auto& c : rep.checks)
    std::printf("%-4s %-20s margin %+.3e  samples %zu\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.margin,
                c.samples);
  std::printf("%s (%.2fs), report in %s\n", rep.all_pass() ? "all checks pass" : "some checks FAILED", rep.wall_time,
              (fs::path(cfg.output_dir) / "report.json").c_str());
  return rep.all_pass() ? 0 : 1;
}

int run_project(const std::string& config_path, const std::string& field_path) {
  const RunConfig cfg = load_config(config_path);
  const ProblemModel model = build_model(cfg);
  const StoredField stored = read_field(field_path);
  if (!(stored.field.grid() == model.grid()))
    throw ConfigError("field grid does not match the config grid");
  if (stored.a != cfg.a) std::fprintf(stderr, "warning: field was stored with a = %g, config has a = %g\n", stored.a, cfg.a);
  const SpinorField u = to_physical(stored.field);
  InnerResult r;
  bool converged = true;
  try {
    r = inner_maximize(u, model, cfg.solver.inner);
  } catch (const InnerMaxIterations& e) {
    r = e.best();
    converged = false;
    std::fprintf(stderr, "%s\n", e.what());
  }
  const SpinorField u_minus = project_minus(model.space(), to_frequency(u));
  SpinorField dv = r.point.v;
  dv -= u_minus;
  const double um = graph_norm(model.space(), u_minus);
  std::printf("t* = %.12f\n", r.point.t);
  std::printf("value = %.12g\n", r.value);
  std::printf("r_self = %.3e  r_minus = %.3e  dt = %.3e\n", r.residual.r_self, r.residual.r_minus, r.dt);
  std::printf("|v* - u-| / |u-| = %.3e\n", um > 0.0 ? graph_norm(model.space(), dv) / um : graph_norm(model.space(), dv));
  std::printf("unique = %s  iterations = %d\n", r.unique ? "yes" : "no", r.iterations);
  return converged ? 0 : kExitNotConverged;
}

int run_spectrum(const std::string& config_path) {
  const RunConfig cfg = load_config(config_path);
  const Grid grid(cfg.n, cfg.L);
  const SpectralSpace space(grid, cfg.a);
  const double kmax = M_PI * (cfg.n / 2) / cfg.L;
  const double bound = std::sqrt(cfg.a * cfg.a + 3.0 * kmax * kmax);
  const auto lam = space.lambdas();
  const auto [lo, hi] = std::minmax_element(lam.begin(), lam.end());
  std::set<long long> distinct;
  for (double l : lam) distinct.insert(std::llround(l * 1e9));
  std::printf("lambda range [%.12g, %.12g]\n", cfg.a, bound);
  std::printf("lambda on grid: min %.12g  max %.12g\n", *lo, *hi);
  std::printf("frequency modes %zu  distinct lambda %zu\n", grid.points(), distinct.size());
  std::printf("dim E+ = %zu  dim E- = %zu\n", 2 * grid.points(), 2 * grid.points());
  return 0;
}

int run_profile(const std::string& field_path, int bins) {
  const StoredField stored = read_field(field_path);
  std::fputs(profile_csv(stored.field, bins).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of the nonlinear Dirac equation on a periodic box"};
  app.require_subcommand(1);

  std::string config, field, out;
  bool force = false;
  int bins = 0;

  auto* solve = app.add_subcommand("solve", "minimize over the Nehari set; writes summary.json, field.bin, trace.csv, profile.csv");
  solve->add_option("config", config, "config file")->required();
  solve->add_option("--out", out, "output directory (overrides output.dir)");
  solve->add_flag("--force", force, "skip the model condition checks");

  auto* check = app.add_subcommand("check", "run the diagnostics suite; writes report.json");
  check->add_option("config", config, "config file")->required();
  check->add_option("--out", out, "output directory (overrides output.dir)");

  auto* project = app.add_subcommand("project", "maximize over the fiber of a stored field");
  project->add_option("config", config, "config file")->required();
  project->add_option("field", field, "field.bin")->required();

  auto* spectrum = app.add_subcommand("spectrum", "print the lambda range and mode counts");
  spectrum->add_option("config", config, "config file")->required();

  auto* profile = app.add_subcommand("profile", "radially binned |u| of a stored field as CSV");
  profile->add_option("field", field, "field.bin")->required();
  profile->add_option("--bins", bins, "number of radial bins (default: width dx)")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*solve) return run_solve(config, out, force);
    if (*check) return run_check(config, out);
    if (*project) return run_project(config, field);
    if (*spectrum) return run_spectrum(config);
    if (*profile) return run_profile(field, bins);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const ModelRejected& e) {
    std::fprintf(stderr, "model rejected: %s (use --force to override)\n", e.what());
    return kExitUsage;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSoftware;
  }
  return kExitUsage;
}
