#include "dsnld/kde.hpp"

#include <algorithm>
#include <cmath>

#include "dsnld/errors.hpp"

namespace dsnld {

namespace {

constexpr double kTruncSigmas = 8.0;  // relative tail mass ~1e-15
constexpr int kKdeBlock = 8192;

struct KernelWindow {
  int radius;       // nodes on each side of the nearest node
  double inv_2h2;   // 1 / (2 h^2)
  double q;         // exp(-dx^2 / h^2), recurrence second factor
};

KernelWindow make_window(const GridSpec& grid, double h) {
  const double dx = grid.dx();
  int r = static_cast<int>(std::ceil(kTruncSigmas * h / dx));
  r = std::clamp(r, 1, grid.n_points / 2 - 1);
  return {r, 1.0 / (2.0 * h * h), std::exp(-dx * dx / (h * h))};
}

/// Scatter particles [begin, end) into `buf` (length n, preallocated, not
/// cleared here). Gaussian kernel values along the window come from the
/// two-term multiplicative recurrence
///   K(o+1)/K(o) = exp(-(2 d_o dx + dx^2) / (2 h^2)),
/// two exp() calls per particle. Returns the out-of-domain count.
int scatter_range(const ParticleEnsemble& ens, const GridSpec& grid, const KernelWindow& win,
                  double* buf, int begin, int end) {
  const double dx = grid.dx();
  const double L = grid.half_width;
  const int n = grid.n_points;
  int out_of_domain = 0;
  for (int p = begin; p < end; ++p) {
    const double raw = ens.positions[p];
    const double y = grid.wrap(raw);
    if (raw < -L || raw >= L) ++out_of_domain;
    const double w = std::exp(ens.log_weights[p]);
    const int j0 = static_cast<int>(std::lround((y + L) / dx));
    const double d_start = (-L + (j0 - win.radius) * dx) - y;
    double g = w * std::exp(-d_start * d_start * win.inv_2h2);
    double ratio = std::exp(-(2.0 * d_start * dx + dx * dx) * win.inv_2h2);
    int j = j0 - win.radius;
    while (j < 0) j += n;
    for (int o = 0; o <= 2 * win.radius; ++o) {
      buf[j] += g;
      g *= ratio;
      ratio *= win.q;
      if (++j == n) j = 0;
    }
  }
  return out_of_domain;
}

}  // namespace

DensityField weighted_kde(const ParticleEnsemble& ens, const GridSpec& grid, double bandwidth,
                          KdeDiagnostics* diag) {
  if (!(bandwidth > 0)) throw DomainError("weighted_kde needs bandwidth > 0");
  for (double lw : ens.log_weights)
    if (!std::isfinite(lw)) throw NumericError("weighted_kde: non-finite log-weight");
  const int n = grid.n_points;
  const int np = ens.count();
  const KernelWindow win = make_window(grid, bandwidth);

  // Fixed-size particle blocks with per-block partial grids, combined in
  // block order: the result does not depend on the thread count.
  const int nblocks = (np + kKdeBlock - 1) / kKdeBlock;
  std::vector<std::vector<double>> partial(nblocks);
  std::vector<int> ood(nblocks, 0);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < nblocks; ++b) {
    partial[b].assign(n, 0.0);
    ood[b] = scatter_range(ens, grid, win, partial[b].data(), b * kKdeBlock,
                           std::min(np, (b + 1) * kKdeBlock));
  }

  DensityField out(grid, ens.time_stamp);
  const double norm = 1.0 / (np * bandwidth * std::sqrt(2.0 * M_PI));
  for (int b = 0; b < nblocks; ++b)
    for (int j = 0; j < n; ++j) out.values[j] += partial[b][j];
  for (int j = 0; j < n; ++j) out.values[j] *= norm;

  if (diag) {
    diag->out_of_domain = 0;
    for (int b = 0; b < nblocks; ++b) diag->out_of_domain += ood[b];
  }
  return out;
}

DensityField weighted_kde_serial(const ParticleEnsemble& ens, const GridSpec& grid,
                                 double bandwidth, KdeDiagnostics* diag) {
  if (!(bandwidth > 0)) throw DomainError("weighted_kde needs bandwidth > 0");
  const int n = grid.n_points;
  const double dx = grid.dx();
  const double L = grid.half_width;
  const KernelWindow win = make_window(grid, bandwidth);
  DensityField out(grid, ens.time_stamp);
  int out_of_domain = 0;
  for (int p = 0; p < ens.count(); ++p) {
    const double raw = ens.positions[p];
    const double y = grid.wrap(raw);
    if (raw < -L || raw >= L) ++out_of_domain;
    const double w = std::exp(ens.log_weights[p]);
    const int j0 = static_cast<int>(std::lround((y + L) / dx));
    for (int o = -win.radius; o <= win.radius; ++o) {
      const double d = (-L + (j0 + o) * dx) - y;
      const int j = ((j0 + o) % n + n) % n;
      out.values[j] += w * std::exp(-d * d * win.inv_2h2);
    }
  }
  const double norm = 1.0 / (ens.count() * bandwidth * std::sqrt(2.0 * M_PI));
  for (double& v : out.values) v *= norm;
  if (diag) diag->out_of_domain = out_of_domain;
  return out;
}

double silverman_bandwidth(const ParticleEnsemble& ens) {
  double s1 = 0.0, s2 = 0.0, sy = 0.0;
  for (int p = 0; p < ens.count(); ++p) {
    const double z = std::exp(ens.log_weights[p]);
    s1 += z;
    s2 += z * z;
    sy += z * ens.positions[p];
  }
  if (!(s1 > 0)) throw NumericError("silverman_bandwidth: total weight is zero");
  const double mean = sy / s1;
  double var = 0.0;
  for (int p = 0; p < ens.count(); ++p) {
    const double d = ens.positions[p] - mean;
    var += std::exp(ens.log_weights[p]) * d * d;
  }
  var /= s1;
  const double ess = s1 * s1 / s2;
  return 1.06 * std::sqrt(var) * std::pow(ess, -0.2);
}

}  // namespace dsnld
