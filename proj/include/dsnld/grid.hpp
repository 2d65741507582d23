#ifndef DSNLD_GRID_HPP
#define DSNLD_GRID_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "dsnld/errors.hpp"

namespace dsnld {

/// Uniform periodic grid on [-L, L): nodes xi_j = -L + j * dx,
/// j = 0 .. n_points-1, with n_points a power of two.
struct GridSpec {
  double half_width = 0.0;
  int n_points = 0;

  GridSpec() = default;
  GridSpec(double half_width_, int n_points_) : half_width(half_width_), n_points(n_points_) {
    if (!(half_width > 0)) throw InvalidGridError("grid half-width must be positive");
    if (n_points < 64 || (n_points & (n_points - 1)) != 0)
      throw InvalidGridError("n_points must be a power of two, at least 64");
  }

  double dx() const { return 2.0 * half_width / n_points; }
  double node(int j) const { return -half_width + j * dx(); }

  /// Wrap a position into [-L, L).
  double wrap(double xi) const {
    const double span = 2.0 * half_width;
    double y = std::fmod(xi + half_width, span);
    if (y < 0) y += span;
    return y - half_width;
  }

  bool operator==(const GridSpec& o) const {
    return half_width == o.half_width && n_points == o.n_points;
  }
};

/// Grid values of a density X(t, .) for one noise realization.
struct DensityField {
  GridSpec grid;
  std::vector<double> values;
  double time_stamp = 0.0;

  DensityField() = default;
  DensityField(const GridSpec& g, double t = 0.0)
      : grid(g), values(static_cast<std::size_t>(g.n_points), 0.0), time_stamp(t) {}
  DensityField(const GridSpec& g, std::vector<double> v, double t);

  /// Periodic linear interpolation at an arbitrary position.
  double interpolate(double xi) const {
    const double dx = grid.dx();
    const double s = (grid.wrap(xi) + grid.half_width) / dx;
    const int j = static_cast<int>(s);  // 0 .. n-1
    const double w = s - j;
    const int jn = j + 1 == grid.n_points ? 0 : j + 1;
    return (1.0 - w) * values[j] + w * values[jn];
  }

  void check_finite(const char* what) const;
};

/// dx * sum of values.
double total_mass(const DensityField& field);

/// dx * sum |a - b|; requires matching grids.
double l1_distance(const DensityField& a, const DensityField& b);

/// Fraction of |mass| in the outermost band of the box (width L/16 per side)
/// relative to total |mass|; the domain-size monitor.
double boundary_mass_fraction(const DensityField& field);

/// Mean and variance of the probability density the field represents
/// (field is normalized internally).
struct FieldMoments {
  double mean;
  double variance;
};
FieldMoments field_moments(const DensityField& field);

/// Clamp negative values to zero in place; returns the clamped mass
/// dx * sum max(0, -value) as a diagnostic. Never rescales.
double clamp_negative(DensityField& field);

/// Evaluate a function on the grid nodes.
template <class F>
DensityField field_from_function(const GridSpec& grid, F&& f, double t = 0.0) {
  DensityField out(grid, t);
  for (int j = 0; j < grid.n_points; ++j) out.values[j] = f(grid.node(j));
  return out;
}

/// Normalized Gaussian density sampled on the grid.
DensityField gaussian_field(const GridSpec& grid, double mean, double sd);

}  // namespace dsnld

#endif
