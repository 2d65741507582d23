#ifndef DSNLD_KDE_HPP
#define DSNLD_KDE_HPP

#include "dsnld/grid.hpp"
#include "dsnld/particle.hpp"

// Weighted Gaussian kernel density estimation on the periodic grid:
//
//   X_hat(xi_j) = (1/N_p) sum_p Z^p K_h(xi_j - Y^p).
//
// The kernel is truncated at 8 standard deviations (relative tail mass
// ~1e-15) and evaluated with a multiplicative recurrence along the node
// window, two exp() calls per particle. Results are independent of thread
// count: particles are reduced in fixed-size blocks whose partial grids are
// combined in block order. Accurate mass reproduction needs h >~ dx.

namespace dsnld {

struct KdeDiagnostics {
  int out_of_domain = 0;  // particles outside [-L, L], still binned periodically
};

DensityField weighted_kde(const ParticleEnsemble& ens, const GridSpec& grid, double bandwidth,
                          KdeDiagnostics* diag = nullptr);

/// Textbook per-node evaluation, used as the reference in tests and the
/// benchmark.
DensityField weighted_kde_serial(const ParticleEnsemble& ens, const GridSpec& grid,
                                 double bandwidth, KdeDiagnostics* diag = nullptr);

/// Weighted Silverman rule h = 1.06 * sigma_w * ESS^{-1/5}, with the
/// weighted standard deviation and the effective sample size of the
/// ensemble.
double silverman_bandwidth(const ParticleEnsemble& ens);

}  // namespace dsnld

#endif
