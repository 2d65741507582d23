#ifndef DSNLD_SPDE_HPP
#define DSNLD_SPDE_HPP

#include <functional>
#include <span>
#include <vector>

#include "dsnld/grid.hpp"
#include "dsnld/noise_env.hpp"
#include "dsnld/nonlinearity.hpp"

// Direct quenched solver for
//
//   dX = (1/2) d^2/dxi^2 psi_kappa(X) dt + X dmu          (porous media)
//   dz = d^2/dxi^2 (a z) dt + z dmu                       (Fokker-Planck)
//
// by Lie splitting per macro step: an explicit substepped conservative
// diffusion step under a CFL bound, followed by the exact pointwise
// solution of the pure-noise sub-equation dX = X dmu. Note the
// Fokker-Planck diffusion carries no 1/2 factor; callers bridging the two
// equations pass a = (1/2) Phi^2.

namespace dsnld {

struct SolverConfig {
  GridSpec grid;
  double cfl_safety = 0.9;          // in (0, 1]
  int min_substeps = 1;             // floor on diffusion substeps per macro step
  double boundary_tolerance = 1e-6; // abort when edge mass exceeds this fraction
};

struct StepDiagnostics {
  int substeps = 0;
  double dt_sub = 0.0;
  double clamp_deficit = 0.0;  // mass clamped away at 0, never rescaled back
};

/// Advance dX/dt = (1/2) d^2 psi_kappa(X) by `dt` with automatic
/// substepping: dt_sub <= cfl_safety * dx^2 / max psi_kappa', the slope
/// estimated by divided differences of psi_kappa over the current value
/// range. Conservative periodic stencil; monotone under the CFL bound.
/// A zero slope estimate on a non-constant field returns the field
/// unchanged (fully degenerate region).
DensityField diffusion_step(const DensityField& field, const NonlinearitySpec& spec, double kappa,
                            double dt, const SolverConfig& config,
                            StepDiagnostics* diag = nullptr);

DensityField diffusion_step_serial(const DensityField& field, const NonlinearitySpec& spec,
                                   double kappa, double dt, const SolverConfig& config,
                                   StepDiagnostics* diag = nullptr);

/// Exact pointwise solution of dX = X dmu over macro step n:
///   X(xi_j) *= exp(sum_i e^i(xi_j) dW^i_n - 1/2 sum_i e^i(xi_j)^2 dt
///                  + e^0(xi_j) dt).
/// Strictly positivity-preserving.
DensityField noise_step_exact(const DensityField& field, const NoiseModel& model,
                              const NoiseRealization& real, int n);

struct SolveDiagnostics {
  std::vector<double> times;
  std::vector<double> mass;
  std::vector<double> clamp_deficit;
  long total_substeps = 0;
  double max_boundary_fraction = 0.0;
};

struct SpdeResult {
  std::vector<DensityField> snapshots;
  SolveDiagnostics diag;
};

/// Lie splitting over the realization's macro grid; snapshots at the
/// requested grid instants. x0 must be non-negative with finite mass.
/// Throws DomainTooSmallError when the boundary-mass monitor trips.
SpdeResult solve_spde(const SolverConfig& config, const NonlinearitySpec& spec, double kappa,
                      const NoiseModel& model, const NoiseRealization& real,
                      const DensityField& x0, std::span<const double> snapshot_times);

/// Bounded measurable coefficient a(t, xi) >= 0 for the Fokker-Planck
/// equation, sampled on the grid once per macro step.
class FpCoefficient {
 public:
  /// Time-independent profile.
  static FpCoefficient static_profile(DensityField profile);

  /// Sampled from a function of (t, xi) at every macro instant.
  static FpCoefficient from_function(const std::function<double(double, double)>& a,
                                     const GridSpec& grid, std::span<const double> time_grid);

  /// Per-macro-step profiles (e.g. harvested from a porous-media run).
  static FpCoefficient per_step(std::vector<DensityField> profiles);

  const std::vector<double>& at_step(int n) const {
    return profiles_[static_cast<std::size_t>(time_varying_ ? n : 0)].values;
  }
  const GridSpec& grid() const { return profiles_.front().grid; }
  double max_value() const { return max_value_; }

 private:
  FpCoefficient(std::vector<DensityField> p, bool tv);
  std::vector<DensityField> profiles_;
  bool time_varying_ = false;
  double max_value_ = 0.0;
};

/// Same splitting for dz = d^2((a z)) dt + z dmu (no 1/2 factor; the CFL
/// bound uses max a). Linear in z0.
SpdeResult solve_fokker_planck(const SolverConfig& config, const FpCoefficient& a,
                               const NoiseModel& model, const NoiseRealization& real,
                               const DensityField& z0, std::span<const double> snapshot_times);

}  // namespace dsnld

#endif
