#include "dsnld/noise_env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dsnld/errors.hpp"
#include "dsnld/rng.hpp"

namespace dsnld {

NoiseModel::NoiseModel(std::vector<Coefficient> c) : coeffs(std::move(c)) {
  if (coeffs.empty()) coeffs.push_back(Coefficient::zero());
}

bool NoiseModel::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const Coefficient& e) { return e.is_zero(); });
}

std::vector<int> NoiseModel::h1_violations() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    if (!coeffs[i].in_h1()) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<NoiseCheck> NoiseModel::validate(double lo, double hi, int n_samples) const {
  std::vector<NoiseCheck> checks;
  const double step = (hi - lo) / (n_samples - 1);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const Coefficient& e = coeffs[i];
    double worst0 = -e.sup(), worst1 = -e.sup_d1(), worst2 = -e.sup_d2();
    bool finite = true;
    for (int k = 0; k < n_samples; ++k) {
      const double xi = lo + k * step;
      const double v = e(xi), v1 = e.d1(xi), v2 = e.d2(xi);
      if (!std::isfinite(v) || !std::isfinite(v1) || !std::isfinite(v2)) finite = false;
      // a hair of slack for rounding in the analytic extrema
      worst0 = std::max(worst0, std::abs(v) - e.sup() * (1 + 1e-12));
      worst1 = std::max(worst1, std::abs(v1) - e.sup_d1() * (1 + 1e-12));
      worst2 = std::max(worst2, std::abs(v2) - e.sup_d2() * (1 + 1e-12));
    }
    char name[64];
    std::snprintf(name, sizeof(name), "e%zu_bounded", i);
    checks.push_back({name, finite && worst0 <= 0 && worst1 <= 0 && worst2 <= 0,
                      std::max({worst0, worst1, worst2})});
  }
  return checks;
}

void check_time_grid(const std::vector<double>& grid) {
  if (grid.size() < 2) throw InvalidGridError("time grid needs at least two instants");
  if (grid.front() != 0.0) throw InvalidGridError("time grid must start at 0");
  for (std::size_t n = 1; n < grid.size(); ++n)
    if (!(grid[n] > grid[n - 1])) throw InvalidGridError("time grid must be strictly increasing");
}

std::vector<double> uniform_time_grid(double t_end, double dt) {
  if (!(t_end > 0) || !(dt > 0)) throw InvalidGridError("t_end and dt must be positive");
  const double steps = t_end / dt;
  const int m = static_cast<int>(std::lround(steps));
  if (m < 1 || std::abs(steps - m) > 1e-9 * steps)
    throw InvalidGridError("t_end must be an integer multiple of dt");
  std::vector<double> grid(static_cast<std::size_t>(m) + 1);
  for (int n = 0; n <= m; ++n) grid[n] = t_end * n / m;
  grid[m] = t_end;
  return grid;
}

NoiseRealization sample_noise(const NoiseModel& model, std::vector<double> time_grid,
                              std::uint64_t seed) {
  check_time_grid(time_grid);
  const int n_drivers = model.num_drivers();
  const int m = static_cast<int>(time_grid.size()) - 1;

  NoiseRealization real;
  real.seed = seed;
  real.generator_id = std::string(rng::kGeneratorId);
  real.n_drivers = n_drivers;
  real.increments.resize(static_cast<std::size_t>(m) * n_drivers);

  const auto stream = rng::Stream::derive(seed, "environment");
  for (int n = 0; n < m; ++n) {
    const double sd = std::sqrt(time_grid[static_cast<std::size_t>(n) + 1] - time_grid[n]);
    for (int i = 0; i < n_drivers; ++i) {
      const std::uint64_t counter = static_cast<std::uint64_t>(n) * n_drivers + i;
      real.increments[static_cast<std::size_t>(n) * n_drivers + i] = sd * stream.gaussian(counter);
    }
  }
  real.time_grid = std::move(time_grid);
  return real;
}

int NoiseRealization::index_of(double t) const {
  const double tol = 1e-9 * std::max(1.0, time_grid.back());
  auto it = std::lower_bound(time_grid.begin(), time_grid.end(), t - tol);
  if (it == time_grid.end() || std::abs(*it - t) > tol)
    throw InvalidGridError("instant " + std::to_string(t) + " is not on the realization grid");
  return static_cast<int>(it - time_grid.begin());
}

double NoiseRealization::cumulative(int i, double t) const {
  const int idx = index_of(t);
  double w = 0.0;
  for (int n = 0; n < idx; ++n) w += dw(n, i);
  return w;
}

double mu_increment(const NoiseModel& model, const NoiseRealization& real, int n, double xi) {
  if (n < 0 || n >= real.num_steps()) throw IndexError("step index out of range");
  double out = model.drift()(xi) * real.dt(n);
  for (int i = 0; i < real.num_drivers(); ++i) out += model.driver(i)(xi) * real.dw(n, i);
  return out;
}

double log_doleans_increment(const NoiseModel& model, const NoiseRealization& real, int n,
                             double y) {
  if (n < 0 || n >= real.num_steps()) throw IndexError("step index out of range");
  const double dt = real.dt(n);
  double out = model.drift()(y) * dt;
  for (int i = 0; i < real.num_drivers(); ++i) {
    const double e = model.driver(i)(y);
    out += e * real.dw(n, i) - 0.5 * e * e * dt;
  }
  return out;
}

double multiplier_constant(const Coefficient& e) {
  const double a = e.sup(), b = e.sup_d1();
  return std::sqrt(2.0 * (a * a + b * b));
}

}  // namespace dsnld
