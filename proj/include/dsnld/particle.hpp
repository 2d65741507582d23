#ifndef DSNLD_PARTICLE_HPP
#define DSNLD_PARTICLE_HPP

#include <cstdint>
#include <vector>

#include "dsnld/grid.hpp"
#include "dsnld/noise_env.hpp"

// The omega_1 layer: particle positions Y^p driven by their own Brownian
// increments, plus the running log of the Doleans exponential weight
// Z^p = E_t(int mu(ds, Y^p_s)) accumulated along each path. The weighted
// empirical measure of the ensemble estimates the mu-marginal weighted law.

namespace dsnld {

struct ParticleEnsemble {
  std::vector<double> positions;    // Y^p
  std::vector<double> log_weights;  // log Z^p, all zero at t = 0
  std::uint64_t particle_seed = 0;
  double time_stamp = 0.0;

  int count() const { return static_cast<int>(positions.size()); }
};

/// Initial law x_0. All kinds have an evaluable density.
struct InitialLaw {
  enum class Kind { gaussian, uniform, barenblatt_profile, table_density };

  Kind kind = Kind::gaussian;
  double mean = 0.0, sd = 1.0;      // gaussian
  double a = -1.0, b = 1.0;         // uniform
  double m = 2.0, t_init = 1.0;     // barenblatt
  std::vector<std::pair<double, double>> table;  // (xi, density)

  static InitialLaw gaussian_law(double mean, double sd);
  static InitialLaw uniform_law(double a, double b);
  static InitialLaw barenblatt_law(double m, double t_init);
  /// Unnormalized tables are accepted; normalization is applied with a
  /// warning on stderr.
  static InitialLaw table_law(std::vector<std::pair<double, double>> samples);

  double density(double xi) const;
  DensityField density_field(const GridSpec& grid) const;
};

/// i.i.d. positions from x_0, all weights 1. Deterministic in seed.
ParticleEnsemble sample_initial(const InitialLaw& x0, int n_particles, std::uint64_t seed);

/// (sum Z)^2 / sum Z^2, in [1, N] (0 with a warning if all weights
/// underflow to zero).
double effective_sample_size(const ParticleEnsemble& ens);

/// One Euler-Maruyama step under a frozen diffusion coefficient, quenched
/// on the environment realization. Per particle, in this order:
///   1. sigma_p = a(Y^p) read at the pre-move position (linear interpolation),
///   2. log Z^p += log-Doleans increment at the pre-move position,
///   3. Y^p += sigma_p * sqrt(dt) * xi_p with xi_p from the particle stream.
/// Both evaluations use the Ito left-point rule.
ParticleEnsemble quenched_step(const ParticleEnsemble& ens, const DensityField& diffusivity,
                               double dt, const NoiseModel& model, const NoiseRealization& real,
                               int step);

/// Plain-loop reference used by tests and the benchmark.
ParticleEnsemble quenched_step_serial(const ParticleEnsemble& ens, const DensityField& diffusivity,
                                      double dt, const NoiseModel& model,
                                      const NoiseRealization& real, int step);

}  // namespace dsnld

#endif
