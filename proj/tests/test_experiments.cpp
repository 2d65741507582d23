#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dsnld/errors.hpp"
#include "dsnld/experiments.hpp"
#include "dsnld/oracles.hpp"
#include "dsnld/rng.hpp"

using namespace dsnld;

namespace {

ExperimentBase small_base() {
  ExperimentBase b;
  b.grid = GridSpec(20.0, 1024);
  b.t_end = 0.5;
  b.dt = 0.01;
  b.snapshot_times = {0.25, 0.5};
  b.seeds = {101, 102, 103};
  return b;
}

}  // namespace

TEST_CASE("representation check degenerates to the deterministic comparison") {
  RepresentationParams p;
  p.base = small_base();  // zero noise model
  p.spec = NonlinearitySpec::linear();
  p.x0 = InitialLaw::gaussian_law(0.0, 1.0);
  p.n_particles = 20000;
  p.realizations = 1;
  p.tol_terminal_l1 = 0.08;
  p.keep_snapshots = false;
  const auto rep = run_representation_check(p);
  CHECK(rep.passed());
  REQUIRE(rep.metrics.size() == 1);
  CHECK(rep.metrics[0].value < 0.08);
}

TEST_CASE("representation check is deterministic and passes on a small stochastic case") {
  RepresentationParams p;
  p.base = small_base();
  p.base.model =
      NoiseModel{{Coefficient::zero(), Coefficient::constant(0.5)}};
  p.spec = NonlinearitySpec::linear();
  p.x0 = InitialLaw::gaussian_law(0.0, 1.0);
  p.n_particles = 20000;
  p.realizations = 3;
  p.tol_terminal_l1 = 0.12;
  p.keep_snapshots = false;
  const auto a = run_representation_check(p);
  const auto b = run_representation_check(p);
  CHECK(a.passed());
  CHECK(a.to_json().dump() == b.to_json().dump());
}

TEST_CASE("doubling the particle count does not degrade the median distance") {
  RepresentationParams p;
  p.base = small_base();
  p.base.model = NoiseModel{{Coefficient::zero(), Coefficient::gaussian_bump(0.5, 0.0, 1.4)}};
  p.spec = NonlinearitySpec::linear();
  p.x0 = InitialLaw::gaussian_law(0.0, 1.0);
  p.n_particles = 20000;
  p.realizations = 5;
  p.keep_snapshots = false;
  const auto small = run_representation_check(p);
  p.n_particles = 40000;
  const auto big = run_representation_check(p);
  CHECK(big.metrics[0].value <= 1.1 * small.metrics[0].value);
}

TEST_CASE("kappa sweep: regularized solutions approach the reference monotonically") {
  KappaSweepParams p;
  p.base = small_base();
  p.base.model = NoiseModel{{Coefficient::zero(), Coefficient::gaussian_bump(0.3, 0.0, 1.0)}};
  p.base.snapshot_times.clear();  // default ladder of snapshot instants
  p.spec = NonlinearitySpec::stefan(0.5, 1.0, 2.0);
  p.x0 = InitialLaw::gaussian_law(0.0, 0.4);  // peak ~1, above u_c
  p.kappa_list = {0.2, 0.1, 0.05, 0.025, 0.0125};
  p.realizations = 3;
  const auto rep = run_kappa_sweep(p);
  for (const auto& m : rep.metrics) {
    INFO(m.name, " value=", m.value, " tol=", m.tolerance);
    CHECK(m.pass);
  }
}

TEST_CASE("kappa sweep rejects a non-descending ladder") {
  KappaSweepParams p;
  p.base = small_base();
  p.spec = NonlinearitySpec::stefan(0.5, 1.0, 2.0);
  p.x0 = InitialLaw::gaussian_law(0.0, 0.4);
  p.kappa_list = {0.05, 0.1};
  CHECK_THROWS_AS(run_kappa_sweep(p), ConfigError);
}

TEST_CASE("identical kappas give identically zero ladder metrics") {
  const auto base = small_base();
  const auto tg = base.time_grid();
  const auto real = sample_noise(base.model, tg, 5);
  const auto spec = NonlinearitySpec::stefan(0.5, 1.0, 2.0);
  const auto x0 = InitialLaw::gaussian_law(0.0, 0.4).density_field(base.grid);
  const std::vector<double> snaps = {0.5};
  const auto a = solve_spde(base.solver_config(), spec, 0.05, base.model, real, x0, snaps);
  const auto b = solve_spde(base.solver_config(), spec, 0.05, base.model, real, x0, snaps);
  CHECK(l1_distance(a.snapshots.back(), b.snapshots.back()) == 0.0);
}

TEST_CASE("fp uniqueness: constant coefficient matches the heat oracle") {
  FpUniquenessParams p;
  p.base = small_base();
  p.base.model = NoiseModel{};  // mu = 0
  p.coefficient.kind = FpCoefficientSpec::Kind::constant;
  p.coefficient.value = 0.5;
  p.z0 = InitialLaw::gaussian_law(0.0, 1.0);
  const auto rep = run_fp_uniqueness(p);
  CHECK(rep.passed());
  // the extrapolated field is stored as a snapshot; compare to the oracle
  REQUIRE(!rep.snapshots.empty());
  const auto heat = heat_convolution(p.z0.density_field(p.base.grid), p.base.t_end);
  CHECK(l1_distance(rep.snapshots.front().field, heat) < 1e-3);
}

TEST_CASE("fp uniqueness: discontinuous coefficient still converges to one limit") {
  FpUniquenessParams p;
  p.base = small_base();
  p.base.model = NoiseModel{{Coefficient::zero(), Coefficient::gaussian_bump(0.4, 0.0, 1.0)}};
  p.coefficient.kind = FpCoefficientSpec::Kind::indicator;
  p.coefficient.lo = 0.1;
  p.coefficient.hi = 0.6;
  p.coefficient.x1 = -1.0;
  p.coefficient.x2 = 1.0;
  p.z0 = InitialLaw::gaussian_law(0.0, 1.0);
  const auto rep = run_fp_uniqueness(p);
  for (const auto& m : rep.metrics) {
    INFO(m.name, " value=", m.value);
    CHECK(m.pass);
  }
}

TEST_CASE("fp uniqueness: zero coefficient collapses all variants onto one field") {
  FpUniquenessParams p;
  p.base = small_base();
  p.base.model = NoiseModel{{Coefficient::zero(), Coefficient::gaussian_bump(0.5, 0.0, 1.0)}};
  p.coefficient.kind = FpCoefficientSpec::Kind::constant;
  p.coefficient.value = 0.0;  // exact noise step only
  p.z0 = InitialLaw::gaussian_law(0.0, 1.0);
  const auto rep = run_fp_uniqueness(p);
  // variants agree bitwise; the extrapolated field differs only by the
  // rounding of (4x - x) / 3
  CHECK(rep.metrics[0].value < 1e-15);
  for (const auto& d : rep.details.at("pairwise_l1")) CHECK(d.at("l1").get<double>() == 0.0);
}

TEST_CASE("filter demo: uninformative observations reproduce the prior") {
  FilterParams p;
  p.base = small_base();
  p.base.model = NoiseModel{{Coefficient::zero(), Coefficient::sigmoid(0.0, 1.0, 0.0)}};
  p.sigma_base = 1.0;
  p.sigma_bump = Coefficient::gaussian_bump(0.5, 0.0, std::sqrt(0.5));
  p.x0 = InitialLaw::gaussian_law(0.0, 1.0);
  p.n_particles = 20000;
  p.tol_l1 = 0.08;
  p.informative = false;
  const auto rep = run_filter_demo(p);
  CHECK(rep.passed());
  // with zero observation functions the posterior equals the prior
  CHECK(rep.details.at("posterior_variance").get<double>() ==
        doctest::Approx(rep.details.at("prior_variance").get<double>()).epsilon(1e-9));
}

TEST_CASE("filter demo: informative observations shrink the posterior, oracle-checked") {
  FilterParams p;
  p.base = small_base();
  p.base.model = NoiseModel{{Coefficient::zero(), Coefficient::sigmoid(2.0, 2.0, 0.0)}};
  p.sigma_base = 1.0;
  p.sigma_bump = Coefficient::gaussian_bump(0.5, 0.0, std::sqrt(0.5));
  p.x0 = InitialLaw::gaussian_law(0.0, 1.0);
  p.n_particles = 30000;
  p.tol_l1 = 0.1;
  p.informative = true;
  const auto rep = run_filter_demo(p);
  for (const auto& m : rep.metrics) {
    INFO(m.name, " value=", m.value, " tol=", m.tolerance);
    CHECK(m.pass);
  }

  // brute-force importance-sampling oracle for the posterior variance at T:
  // independent Euler paths under the reference measure, weighted by the
  // Doleans exponential along the recorded signal/observation path.
  const auto tg = p.base.time_grid();
  const int m_steps = static_cast<int>(tg.size()) - 1;
  std::vector<double> signal = rep.details.at("signal_path").get<std::vector<double>>();
  NoiseRealization obs = sample_noise(p.base.model, tg, p.base.seeds.env);
  for (int n = 0; n < m_steps; ++n)
    obs.increments[n] += p.base.model.driver(0)(signal[n]) * obs.dt(n);

  const auto istream = rng::Stream::derive(909, "initial");
  const auto bstream = rng::Stream::derive(909, "particles");
  const int n_oracle = 200000;
  double sw = 0.0, swy = 0.0, swyy = 0.0;
  auto sigma = [&](double xi) { return p.sigma_base + p.sigma_bump(xi); };
  for (int q = 0; q < n_oracle; ++q) {
    double y = rng::inverse_normal_cdf(istream.uniform(q));
    double lw = 0.0;
    const auto path_stream = bstream.substream(q);
    for (int n = 0; n < m_steps; ++n) {
      const double e = p.base.model.driver(0)(y);
      lw += e * obs.dw(n, 0) - 0.5 * e * e * obs.dt(n);
      y += sigma(y) * std::sqrt(obs.dt(n)) * path_stream.gaussian(n);
    }
    const double w = std::exp(lw);
    sw += w;
    swy += w * y;
    swyy += w * y * y;
  }
  const double oracle_mean = swy / sw;
  const double oracle_var = swyy / sw - oracle_mean * oracle_mean;
  CHECK(rep.details.at("posterior_variance").get<double>() ==
        doctest::Approx(oracle_var).epsilon(0.08));
  CHECK(rep.details.at("posterior_mean").get<double>() ==
        doctest::Approx(oracle_mean).epsilon(0.15));
}

TEST_CASE("moment bounds: trivial model is exactly the unit martingale") {
  MomentBoundsParams p;
  p.base = small_base();  // all coefficients zero
  p.x0 = InitialLaw::gaussian_law(0.0, 1.0);
  p.n_particles = 200;
  p.realizations = 8;
  const auto rep = run_moment_bounds(p);
  CHECK(rep.passed());
  CHECK(rep.details.at("martingale_mean").get<double>() == 1.0);
  CHECK(rep.details.at("second_moment").get<double>() == 1.0);
}

TEST_CASE("moment bounds: constant driver suite passes") {
  MomentBoundsParams p;
  p.base = small_base();
  p.base.t_end = 1.0;
  p.base.model = NoiseModel{{Coefficient::zero(), Coefficient::constant(1.0)}};
  p.x0 = InitialLaw::gaussian_law(0.0, 1.0);
  p.n_particles = 300;
  p.realizations = 64;
  const auto rep = run_moment_bounds(p);
  for (const auto& m : rep.metrics) {
    INFO(m.name, " value=", m.value, " tol=", m.tolerance);
    CHECK(m.pass);
  }
}

TEST_CASE("experiment reports are deterministic given the config") {
  MomentBoundsParams p;
  p.base = small_base();
  p.base.model = NoiseModel{{Coefficient::zero(), Coefficient::gaussian_bump(0.5, 0.0, 1.0)}};
  p.x0 = InitialLaw::gaussian_law(0.0, 1.0);
  p.n_particles = 100;
  p.realizations = 8;
  const auto a = run_moment_bounds(p);
  const auto b = run_moment_bounds(p);
  CHECK(a.to_json().dump() == b.to_json().dump());
}

TEST_CASE("bump test function second derivative matches finite differences") {
  const BumpTestFunction phi{0.3, 2.0};
  for (double xi : {-1.5, -0.4, 0.3, 1.0, 2.0}) {
    const double fd = (phi.value(xi + 1e-5) - 2.0 * phi.value(xi) + phi.value(xi - 1e-5)) / 1e-10;
    CHECK(phi.second(xi) == doctest::Approx(fd).epsilon(1e-4));
  }
  CHECK(phi.value(0.3 + 2.0) == 0.0);
  CHECK(phi.second(0.3 + 2.0) == 0.0);
}
