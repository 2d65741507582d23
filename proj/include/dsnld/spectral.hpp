#ifndef DSNLD_SPECTRAL_HPP
#define DSNLD_SPECTRAL_HPP

#include <functional>
#include <span>

#include "dsnld/grid.hpp"

// Fourier-side tools on the periodic grid. Mode j carries wavenumber
// k_j = pi * j / L for j = -n/2 .. n/2-1 (layout: j and j-n share a slot as
// usual for the DFT). Coefficients are normalized so that the s = 0 norm
// equals the discrete L2 norm sqrt(dx * sum f^2) exactly (Parseval).
//
// This periodic H^s is a surrogate for the whole-line norm; for fields whose
// mass stays away from the box edge the two differ by boundary terms only,
// which the tests pin down on Gaussians against quadrature.

namespace dsnld {

/// Discrete ||f||_{H^s} = || (I - Laplacian)^{s/2} f ||_{L2},
/// computed as (dx/n) sum_j (1 + k_j^2)^s |F_j|^2 under the hood.
double sobolev_norm(std::span<const double> values, const GridSpec& grid, double s);

/// Multiply the Fourier coefficients by a real symbol g(k) and transform
/// back; used for the heat semigroup and smoothing filters.
DensityField spectral_apply(const DensityField& field, const std::function<double(double)>& symbol);

}  // namespace dsnld

#endif
