#include "dsnld/particle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dsnld/errors.hpp"
#include "dsnld/oracles.hpp"
#include "dsnld/rng.hpp"

namespace dsnld {

InitialLaw InitialLaw::gaussian_law(double mean, double sd) {
  if (!(sd > 0)) throw DomainError("gaussian initial law needs sd > 0");
  InitialLaw law;
  law.kind = Kind::gaussian;
  law.mean = mean;
  law.sd = sd;
  return law;
}

InitialLaw InitialLaw::uniform_law(double a, double b) {
  if (!(b > a)) throw DomainError("uniform initial law needs b > a");
  InitialLaw law;
  law.kind = Kind::uniform;
  law.a = a;
  law.b = b;
  return law;
}

InitialLaw InitialLaw::barenblatt_law(double m, double t_init) {
  if (!(m > 1) || !(t_init > 0)) throw DomainError("barenblatt initial law needs m > 1, t > 0");
  InitialLaw law;
  law.kind = Kind::barenblatt_profile;
  law.m = m;
  law.t_init = t_init;
  return law;
}

InitialLaw InitialLaw::table_law(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) throw DomainError("table density needs at least two samples");
  double mass = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].first > samples[i - 1].first))
      throw DomainError("table density abscissae must be strictly increasing");
    if (samples[i].second < 0 || samples[i - 1].second < 0)
      throw DomainError("table density must be non-negative");
    mass += 0.5 * (samples[i].second + samples[i - 1].second) *
            (samples[i].first - samples[i - 1].first);
  }
  if (!(mass > 0)) throw DomainError("table density has zero mass");
  if (std::abs(mass - 1.0) > 1e-9) {
    std::fprintf(stderr, "[dsnld] table density mass %.6g != 1, normalizing\n", mass);
    for (auto& s : samples) s.second /= mass;
  }
  InitialLaw law;
  law.kind = Kind::table_density;
  law.table = std::move(samples);
  return law;
}

double InitialLaw::density(double xi) const {
  switch (kind) {
    case Kind::gaussian: {
      const double z = (xi - mean) / sd;
      return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
    }
    case Kind::uniform: return (xi >= a && xi <= b) ? 1.0 / (b - a) : 0.0;
    case Kind::barenblatt_profile: return barenblatt_value(m, t_init, xi);
    case Kind::table_density: {
      if (table.empty() || xi <= table.front().first || xi >= table.back().first) return 0.0;
      auto it = std::lower_bound(table.begin(), table.end(), xi,
                                 [](const auto& s, double v) { return s.first < v; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = (xi - lo.first) / (hi.first - lo.first);
      return lo.second + w * (hi.second - lo.second);
    }
  }
  return 0.0;
}

DensityField InitialLaw::density_field(const GridSpec& grid) const {
  return field_from_function(grid, [this](double xi) { return density(xi); });
}

namespace {

/// Numeric inverse CDF on [lo, hi] built from the law's density; used for
/// kinds without a closed-form quantile.
class TabulatedQuantile {
 public:
  TabulatedQuantile(const InitialLaw& law, double lo, double hi, int cells = 8192)
      : lo_(lo), step_((hi - lo) / cells) {
    cdf_.resize(static_cast<std::size_t>(cells) + 1, 0.0);
    double prev = law.density(lo);
    for (int i = 1; i <= cells; ++i) {
      const double cur = law.density(lo + i * step_);
      cdf_[i] = cdf_[i - 1] + 0.5 * (prev + cur) * step_;
      prev = cur;
    }
    const double total = cdf_.back();
    for (auto& c : cdf_) c /= total;
  }

  double operator()(double u) const {
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return lo_;
    const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    if (i >= cdf_.size()) return lo_ + step_ * (cdf_.size() - 1);
    const double c0 = cdf_[i - 1], c1 = cdf_[i];
    const double w = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    return lo_ + step_ * (static_cast<double>(i - 1) + w);
  }

 private:
  double lo_, step_;
  std::vector<double> cdf_;
};

}  // namespace

ParticleEnsemble sample_initial(const InitialLaw& x0, int n_particles, std::uint64_t seed) {
  if (n_particles < 1) throw DomainError("need at least one particle");
  ParticleEnsemble ens;
  ens.particle_seed = seed;
  ens.positions.resize(n_particles);
  ens.log_weights.assign(n_particles, 0.0);  // Z_0 = 1

  const auto stream = rng::Stream::derive(seed, "initial");
  switch (x0.kind) {
    case InitialLaw::Kind::gaussian:
      for (int p = 0; p < n_particles; ++p)
        ens.positions[p] = x0.mean + x0.sd * stream.gaussian(p);
      break;
    case InitialLaw::Kind::uniform:
      for (int p = 0; p < n_particles; ++p)
        ens.positions[p] = x0.a + (x0.b - x0.a) * stream.uniform(p);
      break;
    case InitialLaw::Kind::barenblatt_profile: {
      const double r = barenblatt_support_radius(x0.m, x0.t_init);
      TabulatedQuantile q(x0, -r, r);
      for (int p = 0; p < n_particles; ++p) ens.positions[p] = q(stream.uniform(p));
      break;
    }
    case InitialLaw::Kind::table_density: {
      TabulatedQuantile q(x0, x0.table.front().first, x0.table.back().first);
      for (int p = 0; p < n_particles; ++p) ens.positions[p] = q(stream.uniform(p));
      break;
    }
  }
  return ens;
}

double effective_sample_size(const ParticleEnsemble& ens) {
  double s1 = 0.0, s2 = 0.0;
  for (double lw : ens.log_weights) {
    const double z = std::exp(lw);
    s1 += z;
    s2 += z * z;
  }
  if (s2 <= 0.0) {
    std::fprintf(stderr, "[dsnld] all particle weights are zero\n");
    return 0.0;
  }
  return s1 * s1 / s2;
}

namespace {

/// Steps particles [begin, end); returns the index of the first particle
/// with a non-finite diffusivity, or -1. No throwing here so the parallel
/// caller can surface the error outside the OpenMP region.
inline int step_range(const ParticleEnsemble& ens, ParticleEnsemble& out,
                      const DensityField& diffusivity, double dt, const NoiseModel& model,
                      const NoiseRealization& real, int step, const rng::Stream& stream, int begin,
                      int end) {
  const double sqdt = std::sqrt(dt);
  for (int p = begin; p < end; ++p) {
    const double y = ens.positions[p];
    const double sigma = diffusivity.interpolate(y);
    if (!std::isfinite(sigma)) return p;
    out.log_weights[p] = ens.log_weights[p] + log_doleans_increment(model, real, step, y);
    out.positions[p] = y + sigma * sqdt * stream.substream(p).gaussian(step);
  }
  return -1;
}

constexpr int kStepBlock = 8192;

ParticleEnsemble step_impl(const ParticleEnsemble& ens, const DensityField& diffusivity, double dt,
                           const NoiseModel& model, const NoiseRealization& real, int step,
                           bool parallel) {
  if (!(dt > 0)) throw DomainError("quenched_step needs dt > 0");
  const int n = ens.count();
  ParticleEnsemble out;
  out.particle_seed = ens.particle_seed;
  out.time_stamp = ens.time_stamp + dt;
  out.positions.resize(n);
  out.log_weights.resize(n);
  const auto stream = rng::Stream::derive(ens.particle_seed, "particles");

  int bad = -1;
  if (parallel) {
    const int nblocks = (n + kStepBlock - 1) / kStepBlock;
#pragma omp parallel for schedule(static)
    for (int b = 0; b < nblocks; ++b) {
      const int r = step_range(ens, out, diffusivity, dt, model, real, step, stream, b * kStepBlock,
                               std::min(n, (b + 1) * kStepBlock));
      if (r >= 0) {
#pragma omp critical
        bad = bad < 0 ? r : std::min(bad, r);
      }
    }
  } else {
    bad = step_range(ens, out, diffusivity, dt, model, real, step, stream, 0, n);
  }
  if (bad >= 0)
    throw NumericError("quenched_step: non-finite diffusivity at xi=" +
                       std::to_string(ens.positions[bad]));
  return out;
}

}  // namespace

ParticleEnsemble quenched_step(const ParticleEnsemble& ens, const DensityField& diffusivity,
                               double dt, const NoiseModel& model, const NoiseRealization& real,
                               int step) {
  return step_impl(ens, diffusivity, dt, model, real, step, true);
}

ParticleEnsemble quenched_step_serial(const ParticleEnsemble& ens, const DensityField& diffusivity,
                                      double dt, const NoiseModel& model,
                                      const NoiseRealization& real, int step) {
  return step_impl(ens, diffusivity, dt, model, real, step, false);
}

}  // namespace dsnld
