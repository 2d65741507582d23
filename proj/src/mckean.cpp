#include "dsnld/mckean.hpp"

#include <algorithm>
#include <cmath>

#include "dsnld/errors.hpp"

namespace dsnld {

namespace {

DensityField coefficient_field(const NonlinearitySpec& spec, double kappa,
                               const DensityField& density) {
  DensityField a(density.grid, density.time_stamp);
  const int n = density.grid.n_points;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) a.values[j] = phi_kappa_eval(spec, kappa, density.values[j]);
  return a;
}

}  // namespace

McKeanResult evolve_mckean(const McKeanParams& params, const NoiseModel& model,
                           const NoiseRealization& real, const InitialLaw& x0,
                           const GridSpec& grid, std::span<const double> snapshot_times) {
  if (params.n_particles < 1) throw DomainError("evolve_mckean needs particles");
  if (params.kappa < 0) throw DomainError("evolve_mckean needs kappa >= 0");
  check_time_grid(real.time_grid);

  std::vector<int> snap_index;
  snap_index.reserve(snapshot_times.size());
  for (double t : snapshot_times) snap_index.push_back(real.index_of(t));

  McKeanResult result;
  result.ensemble = sample_initial(x0, params.n_particles, params.initial_seed);
  result.ensemble.particle_seed = params.particle_seed;
  const int m = real.num_steps();
  const double ess_floor = params.ess_floor_fraction * params.n_particles;
  const double dx_floor = 1.5 * grid.dx();  // resolution floor against aliasing

  for (int n = 0; n <= m; ++n) {
    const double t = real.time_grid[n];
    const double h = params.bandwidth > 0
                         ? params.bandwidth
                         : std::max(silverman_bandwidth(result.ensemble), dx_floor);
    KdeDiagnostics kdiag;
    DensityField estimate = weighted_kde(result.ensemble, grid, h, &kdiag);
    estimate.time_stamp = t;

    const double ess = effective_sample_size(result.ensemble);
    if (params.ess_floor_fraction > 0 && ess < ess_floor)
      throw EssCollapseError(ess, ess_floor, t);

    result.diag.times.push_back(t);
    result.diag.ess.push_back(ess);
    result.diag.mass.push_back(total_mass(estimate));
    result.diag.bandwidths.push_back(h);
    result.diag.out_of_domain.push_back(kdiag.out_of_domain);

    if (std::find(snap_index.begin(), snap_index.end(), n) != snap_index.end()) {
      if (n == 0) {
        DensityField analytic = x0.density_field(grid);
        analytic.time_stamp = t;
        result.snapshots.push_back(std::move(analytic));
      } else {
        result.snapshots.push_back(estimate);
      }
    }
    if (n == m) break;

    const double dt = real.dt(n);
    DensityField coeff = coefficient_field(params.spec, params.kappa, estimate);
    ParticleEnsemble next = quenched_step(result.ensemble, coeff, dt, model, real, n);
    for (int sweep = 1; sweep < params.picard_sweeps; ++sweep) {
      // re-freeze on the midpoint estimate; the RNG counters are those of
      // step n, so every sweep re-steps the same increments
      DensityField endpoint = weighted_kde(next, grid, h);
      DensityField mid(grid, t);
      for (int j = 0; j < grid.n_points; ++j)
        mid.values[j] = 0.5 * (estimate.values[j] + endpoint.values[j]);
      coeff = coefficient_field(params.spec, params.kappa, mid);
      next = quenched_step(result.ensemble, coeff, dt, model, real, n);
    }
    result.ensemble = std::move(next);
  }
  return result;
}

}  // namespace dsnld
