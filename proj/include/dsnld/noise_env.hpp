#ifndef DSNLD_NOISE_ENV_HPP
#define DSNLD_NOISE_ENV_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dsnld/coefficients.hpp"

// Colored noise environment
//
//   mu(t, xi) = sum_{i=1..N} e^i(xi) W^i_t + e^0(xi) t
//
// with independent Brownian drivers W^1..W^N. One NoiseRealization is one
// quenched environment path: the increments dW^i over a macro time grid,
// reproducible from (seed, grid, N). The same realization is shared by the
// grid solver and the particle solver so their outputs are comparable path
// by path, not merely in law.

namespace dsnld {

struct NoiseCheck {
  std::string name;
  bool pass;
  double worst;  // worst sampled violation (negative means margin)
};

/// Coefficients e^0..e^N; index 0 is the drift coefficient (W^0_t = t).
struct NoiseModel {
  std::vector<Coefficient> coeffs;  // size N+1, coeffs[0] = e^0

  NoiseModel() : coeffs{Coefficient::zero()} {}
  explicit NoiseModel(std::vector<Coefficient> c);

  int num_drivers() const { return static_cast<int>(coeffs.size()) - 1; }
  const Coefficient& drift() const { return coeffs[0]; }
  const Coefficient& driver(int i) const { return coeffs[static_cast<std::size_t>(i) + 1]; }

  bool is_zero() const;

  /// Indices i with e^i not in H^1 (and nonzero); echoed into run metadata.
  std::vector<int> h1_violations() const;

  /// Sample each coefficient densely on [lo, hi] and compare against the
  /// stored sup norms.
  std::vector<NoiseCheck> validate(double lo, double hi, int n_samples) const;
};

/// One sampled environment path on a macro time grid.
struct NoiseRealization {
  std::vector<double> time_grid;   // t_0 = 0 < ... < t_M = T
  std::vector<double> increments;  // row-major M x N, dW^i_n at [n*N + i]
  std::uint64_t seed = 0;
  std::string generator_id;

  int num_steps() const { return static_cast<int>(time_grid.size()) - 1; }
  int num_drivers() const { return n_drivers; }
  double dt(int n) const { return time_grid[static_cast<std::size_t>(n) + 1] - time_grid[n]; }
  double dw(int n, int i) const {
    return increments[static_cast<std::size_t>(n) * num_drivers() + i];
  }

  /// Cumulative path W^i at a grid instant. Refuses to interpolate.
  double cumulative(int i, double t) const;

  /// Grid index of instant t, or a throw if t is not a grid point.
  int index_of(double t) const;

  int n_drivers = 0;
};

/// Draw the Brownian increments for the given model over `time_grid`.
/// Deterministic in (seed, grid, number of drivers).
NoiseRealization sample_noise(const NoiseModel& model, std::vector<double> time_grid,
                              std::uint64_t seed);

/// Increment of mu over step n at position xi:
///   sum_{i>=1} e^i(xi) dW^i_n + e^0(xi) dt_n.
double mu_increment(const NoiseModel& model, const NoiseRealization& real, int n, double xi);

/// Increment of log E_t(int mu(ds, Y_s)) over step n, evaluated at the
/// pre-move position y (Ito left-point rule):
///   sum_{i>=1} e^i(y) dW^i_n - 1/2 sum_{i>=1} e^i(y)^2 dt_n + e^0(y) dt_n.
double log_doleans_increment(const NoiseModel& model, const NoiseRealization& real, int n,
                             double y);

/// H^1-multiplier constant sqrt(2) * (||e||_inf^2 + ||e'||_inf^2)^{1/2}.
double multiplier_constant(const Coefficient& e);

/// Helper shared with the particle module: strictly increasing, starts at 0.
void check_time_grid(const std::vector<double>& grid);

/// Uniform macro grid 0, dt, 2dt, ..., T (requires T/dt integral).
std::vector<double> uniform_time_grid(double t_end, double dt);

}  // namespace dsnld

#endif
