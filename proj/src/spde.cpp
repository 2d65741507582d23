#include "dsnld/spde.hpp"

#include <algorithm>
#include <cmath>

#include "dsnld/errors.hpp"

namespace dsnld {

namespace {

/// Max divided difference of psi_kappa over the field's value range,
/// sampled at 257 points. Returns 0 on a flat range with flat psi.
double slope_estimate(const NonlinearitySpec& spec, double kappa, const DensityField& field) {
  double lo = field.values[0], hi = field.values[0];
  for (double v : field.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi <= lo) hi = lo + std::max(1e-12, 1e-12 * std::abs(lo));
  constexpr int kSamples = 256;
  const double du = (hi - lo) / kSamples;
  double worst = 0.0;
  double prev = psi_kappa_eval(spec, kappa, lo);
  for (int k = 1; k <= kSamples; ++k) {
    const double cur = psi_kappa_eval(spec, kappa, lo + k * du);
    worst = std::max(worst, (cur - prev) / du);
    prev = cur;
  }
  return worst;
}

/// One conservative FTCS substep x_j += lam * (g_{j+1} - 2 g_j + g_{j-1})
/// with periodic wraparound; g precomputed.
void laplacian_substep(const std::vector<double>& x, const std::vector<double>& g, double lam,
                       std::vector<double>& out, bool parallel) {
  const int n = static_cast<int>(x.size());
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
      const int jl = j == 0 ? n - 1 : j - 1;
      const int jr = j == n - 1 ? 0 : j + 1;
      out[j] = x[j] + lam * (g[jr] - 2.0 * g[j] + g[jl]);
    }
  } else {
    for (int j = 0; j < n; ++j) {
      const int jl = j == 0 ? n - 1 : j - 1;
      const int jr = j == n - 1 ? 0 : j + 1;
      out[j] = x[j] + lam * (g[jr] - 2.0 * g[j] + g[jl]);
    }
  }
}

DensityField diffusion_impl(const DensityField& field, const NonlinearitySpec& spec, double kappa,
                            double dt, const SolverConfig& config, StepDiagnostics* diag,
                            bool parallel) {
  if (!(dt > 0)) throw DomainError("diffusion_step needs dt > 0");
  field.check_finite("diffusion_step");
  const int n = field.grid.n_points;
  const double dx = field.grid.dx();

  const double slope = slope_estimate(spec, kappa, field);
  if (slope <= 0.0) {
    if (diag) *diag = {0, 0.0, 0.0};
    DensityField out = field;
    out.time_stamp += dt;
    return out;
  }
  const double dt_max = config.cfl_safety * dx * dx / slope;
  const int substeps = std::max(config.min_substeps, static_cast<int>(std::ceil(dt / dt_max)));
  const double dt_sub = dt / substeps;
  const double lam = dt_sub / (2.0 * dx * dx);

  DensityField out = field;
  std::vector<double> g(n), next(n);
  for (int s = 0; s < substeps; ++s) {
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (int j = 0; j < n; ++j) g[j] = psi_kappa_eval(spec, kappa, out.values[j]);
    } else {
      for (int j = 0; j < n; ++j) g[j] = psi_kappa_eval(spec, kappa, out.values[j]);
    }
    laplacian_substep(out.values, g, lam, next, parallel);
    out.values.swap(next);
  }
  const double deficit = clamp_negative(out);
  out.time_stamp = field.time_stamp + dt;
  if (diag) *diag = {substeps, dt_sub, deficit};
  return out;
}

}  // namespace

DensityField diffusion_step(const DensityField& field, const NonlinearitySpec& spec, double kappa,
                            double dt, const SolverConfig& config, StepDiagnostics* diag) {
  return diffusion_impl(field, spec, kappa, dt, config, diag, true);
}

DensityField diffusion_step_serial(const DensityField& field, const NonlinearitySpec& spec,
                                   double kappa, double dt, const SolverConfig& config,
                                   StepDiagnostics* diag) {
  return diffusion_impl(field, spec, kappa, dt, config, diag, false);
}

DensityField noise_step_exact(const DensityField& field, const NoiseModel& model,
                              const NoiseRealization& real, int n) {
  if (n < 0 || n >= real.num_steps()) throw IndexError("noise_step_exact: step out of range");
  DensityField out = field;
  const int nn = field.grid.n_points;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nn; ++j)
    out.values[j] *= std::exp(log_doleans_increment(model, real, n, field.grid.node(j)));
  out.time_stamp = real.time_grid[static_cast<std::size_t>(n) + 1];
  return out;
}

namespace {

SpdeResult splitting_loop(const SolverConfig& config, const NoiseModel& model,
                          const NoiseRealization& real, const DensityField& x0,
                          std::span<const double> snapshot_times, bool require_nonneg,
                          const std::function<DensityField(const DensityField&, int,
                                                           StepDiagnostics*)>& diffuse) {
  if (!(x0.grid == config.grid)) throw GridMismatchError("initial field is not on the solver grid");
  check_time_grid(real.time_grid);
  x0.check_finite("solve: x0");
  if (require_nonneg) {
    double lo = 0.0, peak = 0.0;
    for (double v : x0.values) {
      lo = std::min(lo, v);
      peak = std::max(peak, std::abs(v));
    }
    if (lo < -1e-12 * std::max(peak, 1.0)) throw DomainError("initial field must be non-negative");
  }

  std::vector<int> snap_index;
  for (double t : snapshot_times) snap_index.push_back(real.index_of(t));

  SpdeResult result;
  DensityField state = x0;
  state.time_stamp = 0.0;
  const int m = real.num_steps();
  for (int n = 0; n <= m; ++n) {
    result.diag.times.push_back(state.time_stamp);
    result.diag.mass.push_back(total_mass(state));
    const double bf = boundary_mass_fraction(state);
    result.diag.max_boundary_fraction = std::max(result.diag.max_boundary_fraction, bf);
    if (bf > config.boundary_tolerance) throw DomainTooSmallError(bf, state.time_stamp);
    if (std::find(snap_index.begin(), snap_index.end(), n) != snap_index.end())
      result.snapshots.push_back(state);
    if (n == m) break;

    StepDiagnostics sd;
    state = diffuse(state, n, &sd);
    state = noise_step_exact(state, model, real, n);
    result.diag.total_substeps += sd.substeps;
    result.diag.clamp_deficit.push_back(sd.clamp_deficit);
  }
  return result;
}

}  // namespace

SpdeResult solve_spde(const SolverConfig& config, const NonlinearitySpec& spec, double kappa,
                      const NoiseModel& model, const NoiseRealization& real,
                      const DensityField& x0, std::span<const double> snapshot_times) {
  return splitting_loop(config, model, real, x0, snapshot_times, true,
                        [&](const DensityField& f, int n, StepDiagnostics* sd) {
                          return diffusion_step(f, spec, kappa, real.dt(n), config, sd);
                        });
}

FpCoefficient::FpCoefficient(std::vector<DensityField> p, bool tv)
    : profiles_(std::move(p)), time_varying_(tv) {
  for (const auto& field : profiles_)
    for (double v : field.values) {
      if (!std::isfinite(v)) throw NumericError("FpCoefficient: non-finite value");
      if (v < 0.0) throw DomainError("FpCoefficient: a must be non-negative");
      max_value_ = std::max(max_value_, v);
    }
}

FpCoefficient FpCoefficient::static_profile(DensityField profile) {
  std::vector<DensityField> p;
  p.push_back(std::move(profile));
  return FpCoefficient(std::move(p), false);
}

FpCoefficient FpCoefficient::from_function(const std::function<double(double, double)>& a,
                                           const GridSpec& grid,
                                           std::span<const double> time_grid) {
  std::vector<DensityField> p;
  for (double t : time_grid)
    p.push_back(field_from_function(grid, [&](double xi) { return a(t, xi); }, t));
  return FpCoefficient(std::move(p), true);
}

FpCoefficient FpCoefficient::per_step(std::vector<DensityField> profiles) {
  return FpCoefficient(std::move(profiles), true);
}

SpdeResult solve_fokker_planck(const SolverConfig& config, const FpCoefficient& a,
                               const NoiseModel& model, const NoiseRealization& real,
                               const DensityField& z0, std::span<const double> snapshot_times) {
  if (!(a.grid() == config.grid))
    throw GridMismatchError("coefficient field is not on the solver grid");
  const double dx = config.grid.dx();
  const int nn = config.grid.n_points;
  const double a_max = a.max_value();

  auto diffuse = [&](const DensityField& f, int n, StepDiagnostics* sd) {
    const double dt = real.dt(n);
    if (a_max <= 0.0) {
      if (sd) *sd = {0, 0.0, 0.0};
      DensityField out = f;
      out.time_stamp += dt;
      return out;
    }
    // dz/dt = d^2((a z)), exactly as printed: no 1/2 factor
    const double dt_max = config.cfl_safety * dx * dx / (2.0 * a_max);
    const int substeps = std::max(config.min_substeps, static_cast<int>(std::ceil(dt / dt_max)));
    const double dt_sub = dt / substeps;
    const double lam = dt_sub / (dx * dx);
    const std::vector<double>& av = a.at_step(n);

    DensityField out = f;
    std::vector<double> g(nn), next(nn);
    for (int s = 0; s < substeps; ++s) {
#pragma omp parallel for schedule(static)
      for (int j = 0; j < nn; ++j) g[j] = av[j] * out.values[j];
      laplacian_substep(out.values, g, lam, next, true);
      out.values.swap(next);
    }
    out.time_stamp = f.time_stamp + dt;
    if (sd) *sd = {substeps, dt_sub, 0.0};
    return out;
  };
  return splitting_loop(config, model, real, z0, snapshot_times, false, diffuse);
}

}  // namespace dsnld
