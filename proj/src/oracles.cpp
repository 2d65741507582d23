#include "dsnld/oracles.hpp"

#include <cmath>

#include "dsnld/errors.hpp"
#include "dsnld/spectral.hpp"

namespace dsnld {

namespace {

struct BarenblattShape {
  double alpha, k, C;
};

BarenblattShape barenblatt_shape(double m) {
  const double alpha = 1.0 / (m + 1.0);
  const double k = alpha * (m - 1.0) / (2.0 * m);
  // unit mass: C^{p + 1/2} * k^{-1/2} * B(1/2, p+1) = 1 with p = 1/(m-1)
  const double p = 1.0 / (m - 1.0);
  const double beta = std::sqrt(M_PI) * std::tgamma(p + 1.0) / std::tgamma(p + 1.5);
  const double C = std::pow(std::sqrt(k) / beta, 1.0 / (p + 0.5));
  return {alpha, k, C};
}

}  // namespace

double barenblatt_value(double m, double t, double xi) {
  if (!(m > 1)) throw DomainError("barenblatt needs m > 1");
  if (!(t > 0)) throw DomainError("barenblatt needs t > 0");
  const auto [alpha, k, C] = barenblatt_shape(m);
  const double s = 0.5 * t;  // 1/2-Laplacian normalization
  const double sa = std::pow(s, -alpha);
  const double core = C - k * xi * xi * sa * sa;
  if (core <= 0.0) return 0.0;
  return sa * std::pow(core, 1.0 / (m - 1.0));
}

double barenblatt_support_radius(double m, double t) {
  if (!(m > 1) || !(t > 0)) throw DomainError("barenblatt needs m > 1, t > 0");
  const auto [alpha, k, C] = barenblatt_shape(m);
  return std::sqrt(C / k) * std::pow(0.5 * t, alpha);
}

DensityField barenblatt_field(double m, double t, const GridSpec& grid) {
  return field_from_function(grid, [&](double xi) { return barenblatt_value(m, t, xi); }, t);
}

DensityField heat_convolution(const DensityField& x0, double t) {
  if (t < 0) throw DomainError("heat_convolution needs t >= 0");
  if (t == 0) return x0;
  DensityField out = spectral_apply(x0, [t](double k) { return std::exp(-0.5 * k * k * t); });
  out.time_stamp = x0.time_stamp + t;
  return out;
}

DensityField linear_exact(const DensityField& x0, const std::vector<double>& constants,
                          const NoiseRealization& real, double t) {
  if (constants.empty()) throw DomainError("linear_exact needs c_0..c_N");
  if (static_cast<int>(constants.size()) != real.num_drivers() + 1)
    throw DomainError("linear_exact: constants do not match the realization's driver count");
  if (t == 0) return x0;
  double log_factor = constants[0] * t;
  for (int i = 1; i < static_cast<int>(constants.size()); ++i) {
    const double c = constants[i];
    log_factor += c * real.cumulative(i - 1, t) - 0.5 * c * c * t;
  }
  DensityField out = heat_convolution(x0, t);
  const double factor = std::exp(log_factor);
  for (double& v : out.values) v *= factor;
  return out;
}

}  // namespace dsnld
