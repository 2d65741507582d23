// dsnld-bench: timing comparison between the OpenMP kernels and their
// serial reference implementations (KDE scatter, particle step, diffusion
// step), with a consistency column.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dsnld/kde.hpp"
#include "dsnld/mckean.hpp"
#include "dsnld/oracles.hpp"
#include "dsnld/spde.hpp"

using namespace dsnld;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const std::chrono::duration<double, std::milli> d = std::chrono::steady_clock::now() - start;
  return d.count() / reps;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

void report(const char* name, double serial_ms, double parallel_ms, double dev) {
  std::printf("%-18s serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   max|diff| %.3g\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms, dev);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif

  const GridSpec grid(20.0, 2048);
  const int np = 400000;
  const auto x0 = InitialLaw::gaussian_law(0.0, 1.0);
  ParticleEnsemble ens = sample_initial(x0, np, 7);
  for (int p = 0; p < np; ++p) ens.log_weights[p] = 0.05 * std::sin(0.1 * p);

  {
    const double h = silverman_bandwidth(ens);
    const auto serial = weighted_kde_serial(ens, grid, h);
    const auto parallel = weighted_kde(ens, grid, h);
    report("weighted_kde", time_ms([&] { (void)weighted_kde_serial(ens, grid, h); }, 3),
           time_ms([&] { (void)weighted_kde(ens, grid, h); }, 3),
           max_abs_diff(serial.values, parallel.values));
  }

  {
    NoiseModel model({Coefficient::zero(), Coefficient::gaussian_bump(0.5, 0.0, 1.0)});
    const auto real = sample_noise(model, uniform_time_grid(1.0, 0.01), 11);
    const DensityField sigma = field_from_function(grid, [](double) { return 1.0; });
    const auto serial = quenched_step_serial(ens, sigma, 0.01, model, real, 0);
    const auto parallel = quenched_step(ens, sigma, 0.01, model, real, 0);
    report("quenched_step",
           time_ms([&] { (void)quenched_step_serial(ens, sigma, 0.01, model, real, 0); }, 5),
           time_ms([&] { (void)quenched_step(ens, sigma, 0.01, model, real, 0); }, 5),
           std::max(max_abs_diff(serial.positions, parallel.positions),
                    max_abs_diff(serial.log_weights, parallel.log_weights)));
  }

  {
    const auto spec = NonlinearitySpec::power_law(2.0, 2.0);
    const DensityField field = barenblatt_field(2.0, 1.0, grid);
    SolverConfig config;
    config.grid = grid;
    const auto serial = diffusion_step_serial(field, spec, 0.0, 0.05, config);
    const auto parallel = diffusion_step(field, spec, 0.0, 0.05, config);
    report("diffusion_step",
           time_ms([&] { (void)diffusion_step_serial(field, spec, 0.0, 0.05, config); }, 5),
           time_ms([&] { (void)diffusion_step(field, spec, 0.0, 0.05, config); }, 5),
           max_abs_diff(serial.values, parallel.values));
  }
  return 0;
}
