#ifndef DSNLD_EXPERIMENTS_HPP
#define DSNLD_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsnld/mckean.hpp"
#include "dsnld/noise_env.hpp"
#include "dsnld/nonlinearity.hpp"
#include "dsnld/particle.hpp"
#include "dsnld/spde.hpp"

// Scripted experiments: each one realizes a convergence / uniqueness /
// moment statement as a falsifiable numerical check and emits a
// machine-readable report. Every experiment is deterministic given its
// parameters (seeds included).

namespace dsnld {

struct Seeds {
  std::uint64_t env = 0;
  std::uint64_t particles = 0;
  std::uint64_t initial = 0;
};

/// Per-realization seed for the environment path of run r.
std::uint64_t omega_seed(std::uint64_t seed, int r);

struct MetricEntry {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string comparator;  // "<=", ">=", "within"
  bool pass = false;
};

struct SnapshotRecord {
  std::string label;  // e.g. "grid", "particle"
  int omega = 0;
  DensityField field;
};

struct ExperimentReport {
  std::string experiment_id;
  nlohmann::json config_echo;
  nlohmann::json metadata;  // generator id, H^1 flags, solver counters
  std::vector<MetricEntry> metrics;
  nlohmann::json details;   // curves and per-omega values
  std::vector<SnapshotRecord> snapshots;
  std::vector<std::pair<std::string, std::string>> extra_files;  // name -> bytes

  bool passed() const;
  nlohmann::json to_json() const;  // everything except snapshots/extra files
};

/// Parameters shared by every experiment.
struct ExperimentBase {
  NoiseModel model;
  GridSpec grid{20.0, 1024};
  double t_end = 1.0;
  double dt = 1e-2;
  std::vector<double> snapshot_times;  // defaults to {t_end}
  Seeds seeds;
  double cfl_safety = 0.9;
  int min_substeps = 1;
  double boundary_tolerance = 1e-6;

  std::vector<double> time_grid() const;
  SolverConfig solver_config() const;
  SolverConfig solver_config(const GridSpec& g) const;
};

// --- representation -------------------------------------------------------

struct RepresentationParams {
  ExperimentBase base;
  NonlinearitySpec spec;
  double kappa = 0.0;
  InitialLaw x0;
  int n_particles = 100000;
  int realizations = 8;
  double ess_floor_fraction = 0.0;
  double bandwidth = 0.0;
  int picard_sweeps = 1;
  double tol_terminal_l1 = 0.08;
  bool keep_snapshots = true;
};

/// Runs the grid solver and the weighted particle solver on the SAME
/// environment path, omega by omega, and checks the median terminal L1
/// distance between the grid solution and the particle weighted KDE.
ExperimentReport run_representation_check(const RepresentationParams& params);

// --- kappa sweep -----------------------------------------------------------

struct KappaSweepParams {
  ExperimentBase base;
  NonlinearitySpec spec;
  std::vector<double> kappa_list;  // descending; last entry is the reference
  InitialLaw x0;
  int realizations = 8;
  double tol_slope = 0.8;
};

/// Solves the regularized equation along a descending kappa ladder on
/// identical noise paths and measures, against the smallest kappa,
///   (a) sup_t ||X^k - X^ref||^2_{H^-1}   (must decrease, slope >= tol)
///   (b) int dt ||psi(X^k) - psi(X^ref)||^2_{L2}
///   (c) kappa int (X^k - X^ref)^2.
ExperimentReport run_kappa_sweep(const KappaSweepParams& params);

// --- Fokker-Planck uniqueness surrogate -------------------------------------

struct FpCoefficientSpec {
  enum class Kind { constant, indicator, bump, half_phi_sq };
  Kind kind = Kind::constant;
  double value = 0.5;                  // constant
  double lo = 0.0, hi = 1.0;           // indicator values
  double x1 = -1.0, x2 = 1.0;          // indicator support
  double base = 0.0, amplitude = 1.0, center = 0.0, width = 1.0;  // bump
  NonlinearitySpec spec;               // half_phi_sq: harvested from a
  double kappa = 0.0;                  //   porous-media run on the same path
  InitialLaw harvest_x0;

  /// Sample the coefficient on a grid (static kinds only).
  DensityField profile(const GridSpec& grid) const;
};

struct FpUniquenessParams {
  ExperimentBase base;
  FpCoefficientSpec coefficient;
  InitialLaw z0;
  double tol_fp = 1e-2;
};

/// Refinement study for the linear Fokker-Planck equation: variants at
/// (n, 2n) nodes and (1, 2) forced substeps must all sit within tol_fp of
/// the Richardson-extrapolated limit. Scheme-level convergence to one limit
/// is the computable face of uniqueness (consistency, not uniqueness).
ExperimentReport run_fp_uniqueness(const FpUniquenessParams& params);

// --- filtering demo ----------------------------------------------------------

struct FilterParams {
  ExperimentBase base;        // base.model holds the observation functions e^i
  double sigma_base = 1.0;    // signal diffusion sigma(xi) = sigma_base + bump
  Coefficient sigma_bump = Coefficient::zero();
  InitialLaw x0;
  int n_particles = 50000;
  double bandwidth = 0.0;
  double tol_l1 = 0.1;
  bool informative = true;    // assert posterior variance < prior variance
};

/// Simulates a hidden signal and its observation paths, feeds the
/// observation increments as the environment into both the grid Zakai
/// solver (a = sigma^2/2) and the weighted particle system, normalizes both
/// and compares the conditional densities.
ExperimentReport run_filter_demo(const FilterParams& params);

// --- moment bounds -----------------------------------------------------------

struct MomentBoundsParams {
  ExperimentBase base;
  double diffusivity = 1.0;  // constant particle sigma
  InitialLaw x0;
  int n_particles = 1000;
  int realizations = 256;
};

/// Monte Carlo estimates of E[M_t], E[M_t^2] and the weighted mass over
/// (omega, particles), checked against the martingale identity and the
/// exponential bounds exp(3T sum ||e^i||^2) and exp(T ||e^0||).
ExperimentReport run_moment_bounds(const MomentBoundsParams& params);

// --- plain solve runs ---------------------------------------------------------

struct SolveSpdeParams {
  ExperimentBase base;
  NonlinearitySpec spec;
  double kappa = 0.0;
  InitialLaw x0;
  bool dump_noise = false;  // attach the cumulative W^1..W^N path as CSV
};
ExperimentReport run_solve_spde(const SolveSpdeParams& params);

struct SolveParticlesParams {
  ExperimentBase base;
  NonlinearitySpec spec;
  double kappa = 0.0;
  InitialLaw x0;
  int n_particles = 100000;
  double ess_floor_fraction = 0.0;
  double bandwidth = 0.0;
  int picard_sweeps = 1;
  bool dump_noise = false;
};
ExperimentReport run_solve_particles(const SolveParticlesParams& params);

// --- diagnostics ---------------------------------------------------------------

/// Smooth compactly supported test function exp(1 - 1/(1 - z^2)),
/// z = (xi - center)/width.
struct BumpTestFunction {
  double center = 0.0;
  double width = 1.0;
  double value(double xi) const;
  double second(double xi) const;
};

/// Residual of the weak form of the equation, assembled from a trajectory
/// of snapshots at every macro instant, quadrature on the grid and the
/// realization's increments; O(dt + dx^2) under refinement.
double edist_residual(const std::vector<DensityField>& trajectory, const NonlinearitySpec& spec,
                      double kappa, const NoiseModel& model, const NoiseRealization& real,
                      const BumpTestFunction& phi);

// small statistics helpers shared with the tests
double median(std::vector<double> v);
struct MeanStderr {
  double mean;
  double stderr_;
};
MeanStderr mean_stderr(const std::vector<double>& v);
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dsnld

#endif
