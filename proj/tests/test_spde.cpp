#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dsnld/errors.hpp"
#include "dsnld/experiments.hpp"
#include "dsnld/oracles.hpp"
#include "dsnld/spde.hpp"

using namespace dsnld;

namespace {

const GridSpec kGrid(20.0, 2048);

SolverConfig config_for(const GridSpec& g) {
  SolverConfig c;
  c.grid = g;
  return c;
}

}  // namespace

TEST_CASE("diffusion_step leaves a constant field unchanged") {
  const auto f = field_from_function(kGrid, [](double) { return 0.7; });
  const auto out = diffusion_step(f, NonlinearitySpec::linear(), 0.0, 0.1, config_for(kGrid));
  CHECK(out.values == f.values);
}

TEST_CASE("diffusion_step advances the heat equation to O(dx^2)") {
  const double v = 1.0, dt = 0.05;
  const auto f = gaussian_field(kGrid, 0.0, std::sqrt(v));
  StepDiagnostics diag;
  const auto out = diffusion_step(f, NonlinearitySpec::linear(), 0.0, dt, config_for(kGrid), &diag);
  CHECK(diag.substeps >= 100);  // CFL-bound substepping engaged
  const auto expected = gaussian_field(kGrid, 0.0, std::sqrt(v + dt));
  CHECK(l1_distance(out, expected) < 1e-4);
}

TEST_CASE("diffusion_step conserves mass to relative 1e-12") {
  const auto spec = NonlinearitySpec::power_law(2.0, 1.0);
  const auto f = barenblatt_field(2.0, 1.0, kGrid);
  const double m0 = total_mass(f);
  const auto out = diffusion_step(f, spec, 0.0, 0.05, config_for(kGrid));
  CHECK(std::abs(total_mass(out) - m0) <= 1e-12 * m0);
}

TEST_CASE("Barenblatt profile is a near fixed point of diffusion_step") {
  const auto spec = NonlinearitySpec::power_law(2.0, 1.0);
  const double dt = 0.01;
  const auto f = barenblatt_field(2.0, 1.0, kGrid);
  const auto out = diffusion_step(f, spec, 0.0, dt, config_for(kGrid));
  const auto expected = barenblatt_field(2.0, 1.0 + dt, kGrid);
  // O(dx) at the free boundary dominates the interior O(dx^2)
  CHECK(l1_distance(out, expected) < kGrid.dx());
}

TEST_CASE("monotone data stay bounded by their initial maximum") {
  const auto spec = NonlinearitySpec::power_law(2.0, 1.0);
  const auto f = barenblatt_field(2.0, 1.0, kGrid);
  double m0 = 0.0;
  for (double x : f.values) m0 = std::max(m0, x);
  const auto out = diffusion_step(f, spec, 0.0, 0.25, config_for(kGrid));
  for (double x : out.values) {
    CHECK(x <= m0 * (1 + 1e-12));
    CHECK(x >= 0.0);
  }
}

TEST_CASE("fully degenerate region returns the field unchanged") {
  const auto spec = NonlinearitySpec::stefan(0.5, 1.0, 2.0);
  // everything below u_c: psi' estimate is zero, nothing moves
  const auto f = field_from_function(
      kGrid, [](double xi) { return 0.3 * std::exp(-0.5 * xi * xi) + 0.05; });
  StepDiagnostics diag;
  const auto out = diffusion_step(f, spec, 0.0, 0.1, config_for(kGrid), &diag);
  CHECK(diag.substeps == 0);
  CHECK(out.values == f.values);
}

TEST_CASE("serial and parallel diffusion steps agree bitwise") {
  const auto spec = NonlinearitySpec::power_law(2.0, 1.0);
  const auto f = barenblatt_field(2.0, 1.0, kGrid);
  const auto a = diffusion_step(f, spec, 0.0, 0.05, config_for(kGrid));
  const auto b = diffusion_step_serial(f, spec, 0.0, 0.05, config_for(kGrid));
  CHECK(a.values == b.values);
}

TEST_CASE("noise_step_exact multiplies by the pathwise exponential") {
  NoiseModel model{{Coefficient::zero(), Coefficient::constant(0.8)}};
  const auto real = sample_noise(model, uniform_time_grid(1.0, 0.25), 17);
  const auto f = gaussian_field(kGrid, 0.0, 1.0);
  const auto out = noise_step_exact(f, model, real, 1);
  const double factor = std::exp(0.8 * real.dw(1, 0) - 0.5 * 0.64 * 0.25);
  for (int j = 0; j < kGrid.n_points; ++j)
    CHECK(out.values[j] == doctest::Approx(f.values[j] * factor).epsilon(1e-14));
  CHECK(total_mass(out) == doctest::Approx(total_mass(f) * factor).epsilon(1e-13));
}

TEST_CASE("noise_step_exact: zero model and pure drift") {
  const auto f = gaussian_field(kGrid, 0.0, 1.0);
  const auto zero_real = sample_noise(NoiseModel{}, uniform_time_grid(1.0, 0.5), 2);
  const auto same = noise_step_exact(f, NoiseModel{}, zero_real, 0);
  CHECK(same.values == f.values);

  NoiseModel drift{{Coefficient::constant(1.0)}};
  const auto real = sample_noise(drift, uniform_time_grid(1.0, 0.5), 2);
  const auto out = noise_step_exact(f, drift, real, 0);
  for (int j = 0; j < kGrid.n_points; j += 97)
    CHECK(out.values[j] == doctest::Approx(f.values[j] * std::exp(0.5)).epsilon(1e-14));
}

TEST_CASE("solve_spde: heat evolution to L1 below 1e-3") {
  const GridSpec grid(20.0, 1024);
  const auto real = sample_noise(NoiseModel{}, uniform_time_grid(0.25, 1e-3), 1);
  const auto x0 = gaussian_field(grid, 0.0, 1.0);
  const std::vector<double> snaps = {0.25};
  const auto res = solve_spde(config_for(grid), NonlinearitySpec::linear(), 0.0, NoiseModel{}, real,
                              x0, snaps);
  CHECK(l1_distance(res.snapshots.back(), heat_convolution(x0, 0.25)) < 1e-3);
}

TEST_CASE("product ansatz: constant-driver linear solution is noise factor times heat") {
  NoiseModel model{{Coefficient::zero(), Coefficient::constant(0.5)}};
  const double T = 0.5;
  const auto real = sample_noise(model, uniform_time_grid(T, 1e-3), 311);
  const auto x0 = gaussian_field(kGrid, 0.0, 1.0);
  const std::vector<double> snaps = {T};
  const auto res =
      solve_spde(config_for(kGrid), NonlinearitySpec::linear(), 0.0, model, real, x0, snaps);
  const auto exact = linear_exact(x0, {0.0, 0.5}, real, T);
  double peak = 0.0;
  for (double v : exact.values) peak = std::max(peak, std::abs(v));
  for (int j = 0; j < kGrid.n_points; ++j) {
    if (std::abs(exact.values[j]) < 1e-6 * peak) continue;
    CHECK(res.snapshots.back().values[j] ==
          doctest::Approx(exact.values[j]).epsilon(1e-3));
  }
}

TEST_CASE("stochastic mass identity for constant coefficients") {
  NoiseModel model{{Coefficient::constant(0.3), Coefficient::constant(0.7),
                    Coefficient::constant(-0.4)}};
  const double T = 0.5;
  const auto real = sample_noise(model, uniform_time_grid(T, 0.01), 99);
  const auto x0 = gaussian_field(kGrid, 0.0, 1.0);
  const std::vector<double> snaps = {T};
  const auto res =
      solve_spde(config_for(kGrid), NonlinearitySpec::linear(), 0.0, model, real, x0, snaps);
  const double log_factor = 0.7 * real.cumulative(0, T) - 0.5 * 0.49 * T -
                            0.4 * real.cumulative(1, T) - 0.5 * 0.16 * T + 0.3 * T;
  const double ratio = total_mass(res.snapshots.back()) / total_mass(x0);
  CHECK(ratio == doctest::Approx(std::exp(log_factor)).epsilon(1e-10));
}

TEST_CASE("Lie splitting is first order against a fine-step reference") {
  // spatially varying drift coefficient so the sub-operators do not commute
  NoiseModel model{{Coefficient::gaussian_bump(0.8, 0.0, 1.0)}};
  const GridSpec grid(10.0, 1024);
  const auto x0 = gaussian_field(grid, 0.0, 1.0);
  const double T = 0.4;
  auto run_at = [&](double dt) {
    const auto real = sample_noise(model, uniform_time_grid(T, dt), 5);
    const std::vector<double> snaps = {T};
    return solve_spde(config_for(grid), NonlinearitySpec::linear(), 0.0, model, real, x0, snaps)
        .snapshots.back();
  };
  const auto ref = run_at(0.0025);
  const double e1 = l1_distance(run_at(0.04), ref);
  const double e2 = l1_distance(run_at(0.02), ref);
  CHECK(e1 / e2 > 1.7);
  CHECK(e1 / e2 < 2.3);
}

TEST_CASE("comparison principle: ordered data stay ordered") {
  const auto spec = NonlinearitySpec::power_law(2.0, 2.0);
  auto lo = gaussian_field(kGrid, 0.0, 1.0);
  for (double& v : lo.values) v *= 0.5;
  auto hi = lo;
  for (int j = 0; j < kGrid.n_points; ++j)
    hi.values[j] += 0.3 * std::exp(-0.1 * kGrid.node(j) * kGrid.node(j));
  const auto real = sample_noise(NoiseModel{}, uniform_time_grid(0.5, 0.01), 1);
  const std::vector<double> snaps = {0.5};
  const auto a = solve_spde(config_for(kGrid), spec, 0.0, NoiseModel{}, real, lo, snaps);
  const auto b = solve_spde(config_for(kGrid), spec, 0.0, NoiseModel{}, real, hi, snaps);
  for (int j = 0; j < kGrid.n_points; ++j)
    CHECK(a.snapshots.back().values[j] <= b.snapshots.back().values[j] + 1e-13);
}

TEST_CASE("boundary-mass monitor aborts on a too-small box") {
  const GridSpec tiny(2.0, 64);
  const auto x0 = gaussian_field(tiny, 0.0, 1.0);
  const auto real = sample_noise(NoiseModel{}, uniform_time_grid(1.0, 0.01), 1);
  const std::vector<double> snaps = {1.0};
  CHECK_THROWS_AS(
      solve_spde(config_for(tiny), NonlinearitySpec::linear(), 0.0, NoiseModel{}, real, x0, snaps),
      DomainTooSmallError);
}

TEST_CASE("solve_spde rejects signed initial data") {
  auto x0 = gaussian_field(kGrid, 0.0, 1.0);
  x0.values[100] = -0.5;
  const auto real = sample_noise(NoiseModel{}, uniform_time_grid(0.1, 0.05), 1);
  const std::vector<double> snaps = {0.1};
  CHECK_THROWS_AS(
      solve_spde(config_for(kGrid), NonlinearitySpec::linear(), 0.0, NoiseModel{}, real, x0, snaps),
      DomainError);
}

TEST_CASE("Fokker-Planck with a = 1/2 reduces to the linear porous-media solve") {
  const GridSpec grid(20.0, 1024);
  NoiseModel model{{Coefficient::zero(), Coefficient::gaussian_bump(0.4, 0.5, 1.0)}};
  const auto real = sample_noise(model, uniform_time_grid(0.25, 0.005), 8);
  const auto x0 = gaussian_field(grid, 0.0, 1.0);
  const std::vector<double> snaps = {0.25};
  const auto pm =
      solve_spde(config_for(grid), NonlinearitySpec::linear(), 0.0, model, real, x0, snaps);
  const auto a = FpCoefficient::static_profile(field_from_function(grid, [](double) { return 0.5; }));
  const auto fp = solve_fokker_planck(config_for(grid), a, model, real, x0, snaps);
  double peak = 0.0;
  for (double v : pm.snapshots.back().values) peak = std::max(peak, v);
  for (int j = 0; j < grid.n_points; ++j)
    CHECK(std::abs(fp.snapshots.back().values[j] - pm.snapshots.back().values[j]) <= 1e-12 * peak);
}

TEST_CASE("Fokker-Planck with a = 0 is the pure noise multiplication, bitwise") {
  const GridSpec grid(20.0, 1024);
  NoiseModel model{{Coefficient::zero(), Coefficient::gaussian_bump(0.6, 0.0, 1.0)}};
  const auto real = sample_noise(model, uniform_time_grid(0.2, 0.05), 3);
  const auto z0 = gaussian_field(grid, 0.0, 1.0);
  const std::vector<double> snaps = {0.2};
  const auto a = FpCoefficient::static_profile(DensityField(grid));
  const auto fp = solve_fokker_planck(config_for(grid), a, model, real, z0, snaps);
  DensityField manual = z0;
  for (int n = 0; n < real.num_steps(); ++n) manual = noise_step_exact(manual, model, real, n);
  CHECK(fp.snapshots.back().values == manual.values);
}

TEST_CASE("Fokker-Planck solution is linear in z0") {
  const GridSpec grid(20.0, 1024);
  NoiseModel model{{Coefficient::zero(), Coefficient::gaussian_bump(0.5, 0.0, 1.0)}};
  const auto real = sample_noise(model, uniform_time_grid(0.25, 0.0125), 4);
  const auto a = FpCoefficient::static_profile(
      field_from_function(grid, [](double xi) { return xi > 0 ? 0.6 : 0.1; }));
  const auto z1 = gaussian_field(grid, -1.0, 0.8);
  const auto z2 = gaussian_field(grid, 1.5, 1.2);
  const double alpha = 1.3, beta = -0.3;
  DensityField combo(grid);
  for (int j = 0; j < grid.n_points; ++j)
    combo.values[j] = alpha * z1.values[j] + beta * z2.values[j];
  const std::vector<double> snaps = {0.25};
  const auto s1 = solve_fokker_planck(config_for(grid), a, model, real, z1, snaps);
  const auto s2 = solve_fokker_planck(config_for(grid), a, model, real, z2, snaps);
  const auto sc = solve_fokker_planck(config_for(grid), a, model, real, combo, snaps);
  double peak = 0.0;
  for (double v : sc.snapshots.back().values) peak = std::max(peak, std::abs(v));
  for (int j = 0; j < grid.n_points; ++j) {
    const double super =
        alpha * s1.snapshots.back().values[j] + beta * s2.snapshots.back().values[j];
    CHECK(std::abs(sc.snapshots.back().values[j] - super) <= 1e-10 * peak);
  }
}

TEST_CASE("negative Fokker-Planck coefficient is a domain error") {
  const GridSpec grid(20.0, 1024);
  CHECK_THROWS_AS(
      FpCoefficient::static_profile(field_from_function(grid, [](double xi) { return xi; })),
      DomainError);
}

TEST_CASE("weak-form residual is first order for a deterministic environment") {
  // drift-only environment: no Ito-correction fluctuation, clean O(dt + dx^2)
  NoiseModel model{{Coefficient::gaussian_bump(0.6, 0.0, 1.0)}};
  const BumpTestFunction phi{0.5, 3.0};
  const auto spec = NonlinearitySpec::power_law(2.0, 1.0);

  auto residual_at = [&](int n_points, double dt) {
    const GridSpec grid(10.0, n_points);
    const auto tg = uniform_time_grid(0.25, dt);
    const auto real = sample_noise(model, tg, 21);
    const auto x0 = barenblatt_field(2.0, 1.0, grid);
    const auto res = solve_spde(config_for(grid), spec, 0.0, model, real, x0, tg);
    return edist_residual(res.snapshots, spec, 0.0, model, real, phi);
  };
  const double coarse = residual_at(512, 0.025);
  const double fine = residual_at(1024, 0.0125);
  CHECK(coarse < 0.05);
  CHECK(fine < coarse / 1.6);
}

TEST_CASE("weak-form residual vanishes under refinement with Brownian drivers") {
  // pathwise the residual also carries an O(sqrt(dt)) quadratic-variation
  // remainder, so the decay is measured as an average over realizations
  NoiseModel model{{Coefficient::zero(), Coefficient::gaussian_bump(0.5, 0.0, 1.0)}};
  const BumpTestFunction phi{0.5, 3.0};
  const auto spec = NonlinearitySpec::power_law(2.0, 1.0);

  auto residual_at = [&](int n_points, double dt, std::uint64_t seed) {
    const GridSpec grid(10.0, n_points);
    const auto tg = uniform_time_grid(0.25, dt);
    const auto real = sample_noise(model, tg, seed);
    const auto x0 = barenblatt_field(2.0, 1.0, grid);
    const auto res = solve_spde(config_for(grid), spec, 0.0, model, real, x0, tg);
    return edist_residual(res.snapshots, spec, 0.0, model, real, phi);
  };
  double coarse = 0.0, fine = 0.0;
  for (std::uint64_t seed = 100; seed < 106; ++seed) {
    coarse += residual_at(512, 0.025, seed);
    fine += residual_at(1024, 0.00625, seed);  // 4x refinement in time
  }
  CHECK(coarse / 6.0 < 0.05);
  CHECK(fine < coarse / 1.6);
}
