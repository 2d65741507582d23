#ifndef DSNLD_ORACLES_HPP
#define DSNLD_ORACLES_HPP

#include <vector>

#include "dsnld/grid.hpp"
#include "dsnld/noise_env.hpp"

// Closed-form reference solutions used as ground truth by tests and
// acceptance runs.

namespace dsnld {

/// Unit-mass self-similar solution of du/dt = (1/2) d^2/dxi^2 (u^m), m > 1:
/// the textbook profile for coefficient 1 evaluated at time t/2,
///   u(t, xi) = s^{-a} (C - k xi^2 s^{-2a})_+^{1/(m-1)},  s = t/2,
/// a = 1/(m+1), k = (m-1) a / (2m), C fixed by unit mass via Gamma functions.
double barenblatt_value(double m, double t, double xi);

/// Edge of the compact support at time t (u vanishes for |xi| beyond it).
double barenblatt_support_radius(double m, double t);

DensityField barenblatt_field(double m, double t, const GridSpec& grid);

/// Convolution with the Gaussian kernel of variance t (the semigroup of
/// (1/2) d^2/dxi^2), computed spectrally. t = 0 is the identity.
DensityField heat_convolution(const DensityField& x0, double t);

/// Exact solution of the linear equation (psi(u) = u) with constant noise
/// coefficients e^i = c_i:
///   exp(sum_{i>=1} c_i W^i_t - 1/2 sum_{i>=1} c_i^2 t + c_0 t)
///     * heat_convolution(x0, t),
/// with W^i_t read off the realization's cumulative path (grid instants
/// only; interpolation is refused).
DensityField linear_exact(const DensityField& x0, const std::vector<double>& constants,
                          const NoiseRealization& real, double t);

}  // namespace dsnld

#endif
