// dsnld-sim: config-driven experiment runner.
//
// Exit codes: 0 all tolerances pass, 1 tolerance fail, 2 config error,
// 3 IO error.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dsnld/config.hpp"
#include "dsnld/errors.hpp"
#include "dsnld/io.hpp"

namespace {

struct Overrides {
  int threads = -1;
  std::string output_dir;
  long particles = -1;
  int realizations = -1;
  double dt = 0.0;
  double t_end = 0.0;
  double kappa = -1.0;
  long seed_env = -1, seed_particles = -1, seed_initial = -1;
  bool dry_run = false;
};

void apply_overrides(dsnld::RunConfig& cfg, const Overrides& o) {
  if (const char* env = std::getenv("DSNLD_SIM_OUT")) cfg.output_dir = env;
  if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
  if (o.threads >= 0) cfg.threads = o.threads;
  if (o.particles >= 0) cfg.n_particles = static_cast<int>(o.particles);
  if (o.realizations >= 0) cfg.realizations = o.realizations;
  if (o.dt > 0) cfg.dt = o.dt;
  if (o.t_end > 0) cfg.t_end = o.t_end;
  if (o.kappa >= 0) cfg.kappa = o.kappa;
  if (o.seed_env >= 0) cfg.seeds.env = static_cast<std::uint64_t>(o.seed_env);
  if (o.seed_particles >= 0) cfg.seeds.particles = static_cast<std::uint64_t>(o.seed_particles);
  if (o.seed_initial >= 0) cfg.seeds.initial = static_cast<std::uint64_t>(o.seed_initial);
}

int run(const std::string& subcommand, const std::string& config_path, const Overrides& o) {
  dsnld::RunConfig cfg;
  try {
    cfg = dsnld::load_config_file(config_path);
    if (cfg.experiment != subcommand)
      throw dsnld::ConfigError("config names experiment '" + cfg.experiment +
                               "' but subcommand is '" + subcommand + "'");
    apply_overrides(cfg, o);
  } catch (const dsnld::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const dsnld::InvalidGridError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  if (o.dry_run) {
    std::printf("config OK: experiment=%s grid=%d dt=%g t_end=%g\n", cfg.experiment.c_str(),
                cfg.grid.n_points, cfg.dt, cfg.t_end);
    return 0;
  }

#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif

  try {
    const dsnld::ExperimentReport report = dsnld::dispatch_experiment(cfg);
    dsnld::write_outputs(report, cfg.output_dir);
    for (const auto& m : report.metrics)
      std::printf("%-32s %14.6g  %s %-12.6g  %s\n", m.name.c_str(), m.value,
                  m.comparator.c_str(), m.tolerance, m.pass ? "pass" : "FAIL");
    std::printf("%s: %s (outputs in %s)\n", report.experiment_id.c_str(),
                report.passed() ? "PASS" : "FAIL", cfg.output_dir.c_str());
    return report.passed() ? 0 : 1;
  } catch (const dsnld::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const dsnld::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "run failed: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quenched particle and grid solvers for a stochastic porous-media equation"};
  app.require_subcommand(1);

  Overrides o;
  std::string config_path;
  const std::vector<std::string> experiments = {
      "representation", "kappa-sweep", "fp-uniqueness", "filter-demo",
      "moment-bounds",  "solve-spde",  "solve-particles"};

  std::vector<CLI::App*> subs;
  for (const auto& name : experiments) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("config", config_path, "JSON config file")->required();
    sub->add_flag("--dry-run", o.dry_run, "validate the config and exit");
    sub->add_option("--threads", o.threads, "cap the worker pool");
    sub->add_option("--output-dir", o.output_dir, "override the output directory");
    sub->add_option("--particles", o.particles, "override particles.count");
    sub->add_option("--realizations", o.realizations, "override realizations");
    sub->add_option("--dt", o.dt, "override time.dt");
    sub->add_option("--t-end", o.t_end, "override time.t_end");
    sub->add_option("--kappa", o.kappa, "override kappa");
    sub->add_option("--seed-env", o.seed_env, "override seeds.env");
    sub->add_option("--seed-particles", o.seed_particles, "override seeds.particles");
    sub->add_option("--seed-initial", o.seed_initial, "override seeds.initial");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) return run(experiments[i], config_path, o);
  return 2;
}
