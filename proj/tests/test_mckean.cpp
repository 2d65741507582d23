#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dsnld/errors.hpp"
#include "dsnld/experiments.hpp"
#include "dsnld/mckean.hpp"
#include "dsnld/oracles.hpp"

using namespace dsnld;

namespace {

const GridSpec kGrid(20.0, 1024);

McKeanParams basic_params(int np) {
  McKeanParams p;
  p.spec = NonlinearitySpec::linear();
  p.n_particles = np;
  p.initial_seed = 3;
  p.particle_seed = 2;
  return p;
}

}  // namespace

TEST_CASE("linear nonlinearity without environment tracks the heat evolution") {
  const auto real = sample_noise(NoiseModel{}, uniform_time_grid(1.0, 0.01), 1);
  auto params = basic_params(100000);
  const std::vector<double> snaps = {0.5, 1.0};
  const auto res =
      evolve_mckean(params, NoiseModel{}, real, InitialLaw::gaussian_law(0.0, 1.0), kGrid, snaps);
  REQUIRE(res.snapshots.size() == 2);
  CHECK(l1_distance(res.snapshots[0], gaussian_field(kGrid, 0.0, std::sqrt(1.5))) < 0.05);
  CHECK(l1_distance(res.snapshots[1], gaussian_field(kGrid, 0.0, std::sqrt(2.0))) < 0.05);
}

TEST_CASE("zero environment keeps every weight exactly 1 (classical McKean)") {
  const auto real = sample_noise(NoiseModel{}, uniform_time_grid(0.5, 0.05), 1);
  auto params = basic_params(2000);
  const std::vector<double> snaps = {0.5};
  const auto res =
      evolve_mckean(params, NoiseModel{}, real, InitialLaw::gaussian_law(0.0, 1.0), kGrid, snaps);
  for (double lw : res.ensemble.log_weights) CHECK(lw == 0.0);
  for (double ess : res.diag.ess) CHECK(ess == doctest::Approx(2000.0));
}

TEST_CASE("quenched coupling: identical realization and seeds give bit-identical runs") {
  NoiseModel model{{Coefficient::zero(), Coefficient::gaussian_bump(0.4, 0.0, 1.0)}};
  const auto real = sample_noise(model, uniform_time_grid(0.5, 0.025), 123);
  auto params = basic_params(5000);
  params.spec = NonlinearitySpec::power_law(2.0, 2.0);
  params.kappa = 0.01;
  const std::vector<double> snaps = {0.25, 0.5};
  const auto a = evolve_mckean(params, model, real, InitialLaw::gaussian_law(0.0, 1.0), kGrid, snaps);
  const auto b = evolve_mckean(params, model, real, InitialLaw::gaussian_law(0.0, 1.0), kGrid, snaps);
  CHECK(a.ensemble.positions == b.ensemble.positions);
  CHECK(a.ensemble.log_weights == b.ensemble.log_weights);
  for (std::size_t k = 0; k < snaps.size(); ++k)
    CHECK(a.snapshots[k].values == b.snapshots[k].values);
}

TEST_CASE("weighted-mass martingale: MC mean of the KDE mass is 1 at every snapshot") {
  NoiseModel model{{Coefficient::zero(), Coefficient::gaussian_bump(0.5, 0.0, 1.0)}};
  const auto grid_t = uniform_time_grid(0.5, 0.05);
  const std::vector<double> snaps = {0.25, 0.5};
  std::vector<std::vector<double>> mass(snaps.size());
  for (int r = 0; r < 48; ++r) {
    const auto real = sample_noise(model, grid_t, omega_seed(11, r));
    auto params = basic_params(2000);
    params.initial_seed = omega_seed(5, r);
    params.particle_seed = omega_seed(6, r);
    const auto res =
        evolve_mckean(params, model, real, InitialLaw::gaussian_law(0.0, 1.0), kGrid, snaps);
    for (std::size_t k = 0; k < snaps.size(); ++k)
      mass[k].push_back(total_mass(res.snapshots[k]));
  }
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const auto ms = mean_stderr(mass[k]);
    INFO("t=", snaps[k]);
    CHECK(std::abs(ms.mean - 1.0) <= 4.0 * ms.stderr_);
  }
}

TEST_CASE("weighted mass stays under the exp(T ||e0||) bound") {
  NoiseModel model{{Coefficient::constant(0.4), Coefficient::gaussian_bump(0.3, 0.0, 1.0)}};
  const double T = 0.5;
  const auto grid_t = uniform_time_grid(T, 0.05);
  std::vector<double> terminal_mass;
  for (int r = 0; r < 32; ++r) {
    const auto real = sample_noise(model, grid_t, omega_seed(31, r));
    auto params = basic_params(1000);
    params.initial_seed = omega_seed(32, r);
    params.particle_seed = omega_seed(33, r);
    const std::vector<double> snaps = {T};
    const auto res =
        evolve_mckean(params, model, real, InitialLaw::gaussian_law(0.0, 1.0), kGrid, snaps);
    terminal_mass.push_back(total_mass(res.snapshots.back()));
  }
  const auto ms = mean_stderr(terminal_mass);
  const double bound = std::exp(T * model.drift().sup());
  CHECK(ms.mean <= bound * (1.0 + 4.0 * ms.stderr_ / ms.mean));
}

TEST_CASE("ESS floor aborts with a collapse report") {
  NoiseModel model{{Coefficient::zero(), Coefficient::gaussian_bump(1.0, 0.0, 0.5)}};
  const auto real = sample_noise(model, uniform_time_grid(0.5, 0.05), 9);
  auto params = basic_params(500);
  params.ess_floor_fraction = 0.999999;  // trips on the first weight spread
  const std::vector<double> snaps = {0.5};
  CHECK_THROWS_AS(
      evolve_mckean(params, model, real, InitialLaw::gaussian_law(0.0, 1.0), kGrid, snaps),
      EssCollapseError);
}

TEST_CASE("porous-media smoke run against the self-similar profile") {
  auto params = basic_params(20000);
  params.spec = NonlinearitySpec::power_law(2.0, 1.0);
  params.kappa = 1e-3;
  const double T = 0.25;
  const auto real = sample_noise(NoiseModel{}, uniform_time_grid(T, 0.0125), 1);
  const std::vector<double> snaps = {T};
  const auto res = evolve_mckean(params, NoiseModel{}, real, InitialLaw::barenblatt_law(2.0, 1.0),
                                 kGrid, snaps);
  CHECK(l1_distance(res.snapshots.back(), barenblatt_field(2.0, 1.0 + T, kGrid)) < 0.12);
}

TEST_CASE("KDE estimate is stable under bandwidth halving") {
  // density-existence surrogate: halving h moves the estimate by no more
  // than twice the Monte Carlo error bar (measured between half-ensembles)
  NoiseModel model{{Coefficient::zero(), Coefficient::gaussian_bump(0.4, 0.0, 1.0)}};
  const auto real = sample_noise(model, uniform_time_grid(0.5, 0.025), 19);
  auto params = basic_params(40000);
  params.spec = NonlinearitySpec::power_law(2.0, 1.0);
  params.kappa = 1e-2;
  const std::vector<double> snaps = {0.5};
  const auto res = evolve_mckean(params, model, real, InitialLaw::barenblatt_law(2.0, 1.0), kGrid,
                                 snaps);
  const auto& ens = res.ensemble;
  const double h = silverman_bandwidth(ens);
  const double change = l1_distance(weighted_kde(ens, kGrid, h), weighted_kde(ens, kGrid, 0.5 * h));

  ParticleEnsemble lo, hi;
  lo.particle_seed = hi.particle_seed = ens.particle_seed;
  for (int p = 0; p < ens.count(); ++p) {
    auto& half = p % 2 == 0 ? lo : hi;
    half.positions.push_back(ens.positions[p]);
    half.log_weights.push_back(ens.log_weights[p]);
  }
  const double mc_bar = l1_distance(weighted_kde(lo, kGrid, h), weighted_kde(hi, kGrid, h));
  CHECK(change < 2.0 * mc_bar);
}

TEST_CASE("an extra Picard sweep stays consistent with the one-pass march") {
  auto one = basic_params(20000);
  one.spec = NonlinearitySpec::power_law(2.0, 1.0);
  one.kappa = 1e-2;
  auto two = one;
  two.picard_sweeps = 2;
  const auto real = sample_noise(NoiseModel{}, uniform_time_grid(0.25, 0.025), 1);
  const std::vector<double> snaps = {0.25};
  const auto x0 = InitialLaw::barenblatt_law(2.0, 1.0);
  const auto a = evolve_mckean(one, NoiseModel{}, real, x0, kGrid, snaps);
  const auto b = evolve_mckean(two, NoiseModel{}, real, x0, kGrid, snaps);
  CHECK(l1_distance(a.snapshots.back(), b.snapshots.back()) < 0.05);
}
