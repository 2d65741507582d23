#ifndef DSNLD_MCKEAN_HPP
#define DSNLD_MCKEAN_HPP

#include <span>
#include <vector>

#include "dsnld/kde.hpp"
#include "dsnld/nonlinearity.hpp"
#include "dsnld/particle.hpp"

// Self-consistent time marching of the doubly stochastic particle system.
// At each macro step t_n:
//   (i)   X_hat(t_n, .) = weighted KDE of the ensemble,
//   (ii)  coefficient field a(xi) = Phi_kappa(X_hat(t_n, xi)),
//   (iii) one quenched Euler-Maruyama step with that frozen coefficient.
// One pass per step by default (frozen-coefficient marching); an optional
// number of Picard sweeps re-freezes the coefficient on the average of the
// start- and end-of-step estimates. Weights are never resampled: the object
// of interest is the weighted law itself, so only the ESS is monitored.

namespace dsnld {

struct McKeanParams {
  NonlinearitySpec spec;
  double kappa = 0.0;
  int n_particles = 0;
  std::uint64_t initial_seed = 0;   // "initial" stream: positions at t = 0
  std::uint64_t particle_seed = 0;  // "particles" stream: Brownian drivers
  double ess_floor_fraction = 0.0;  // 0 disables the collapse guard
  double bandwidth = 0.0;           // 0 = weighted Silverman rule
  int picard_sweeps = 1;
};

struct TrajectoryDiagnostics {
  std::vector<double> times;
  std::vector<double> ess;
  std::vector<double> mass;             // weighted KDE mass per macro step
  std::vector<double> bandwidths;
  std::vector<int> out_of_domain;
};

struct McKeanResult {
  std::vector<DensityField> snapshots;
  ParticleEnsemble ensemble;  // state at t_end
  TrajectoryDiagnostics diag;
};

/// March the ensemble over the realization's macro grid, returning density
/// snapshots at the requested instants (grid instants only). The t = 0
/// snapshot is the analytic x_0 density. Throws EssCollapseError when the
/// effective sample size drops below ess_floor_fraction * n_particles.
McKeanResult evolve_mckean(const McKeanParams& params, const NoiseModel& model,
                           const NoiseRealization& real, const InitialLaw& x0,
                           const GridSpec& grid, std::span<const double> snapshot_times);

}  // namespace dsnld

#endif
