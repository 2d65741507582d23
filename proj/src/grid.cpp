#include "dsnld/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dsnld {

DensityField::DensityField(const GridSpec& g, std::vector<double> v, double t)
    : grid(g), values(std::move(v)), time_stamp(t) {
  if (static_cast<int>(values.size()) != g.n_points)
    throw GridMismatchError("field length does not match grid");
}

void DensityField::check_finite(const char* what) const {
  for (int j = 0; j < grid.n_points; ++j)
    if (!std::isfinite(values[j]))
      throw NumericError(std::string(what) + ": non-finite value at xi=" +
                         std::to_string(grid.node(j)));
}

double total_mass(const DensityField& field) {
  double s = 0.0;
  for (double v : field.values) s += v;
  return s * field.grid.dx();
}

double l1_distance(const DensityField& a, const DensityField& b) {
  if (!(a.grid == b.grid)) throw GridMismatchError("l1_distance: fields live on different grids");
  double s = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) s += std::abs(a.values[j] - b.values[j]);
  return s * a.grid.dx();
}

double boundary_mass_fraction(const DensityField& field) {
  const int n = field.grid.n_points;
  const int band = std::max(1, n / 32);
  double edge = 0.0, total = 0.0;
  for (int j = 0; j < n; ++j) {
    const double a = std::abs(field.values[j]);
    total += a;
    if (j < band || j >= n - band) edge += a;
  }
  return total > 0 ? edge / total : 0.0;
}

FieldMoments field_moments(const DensityField& field) {
  double m0 = 0.0, m1 = 0.0;
  for (int j = 0; j < field.grid.n_points; ++j) {
    m0 += field.values[j];
    m1 += field.values[j] * field.grid.node(j);
  }
  const double mean = m1 / m0;
  double m2 = 0.0;
  for (int j = 0; j < field.grid.n_points; ++j) {
    const double d = field.grid.node(j) - mean;
    m2 += field.values[j] * d * d;
  }
  return {mean, m2 / m0};
}

double clamp_negative(DensityField& field) {
  double deficit = 0.0;
  for (double& v : field.values)
    if (v < 0.0) {
      deficit -= v;
      v = 0.0;
    }
  return deficit * field.grid.dx();
}

DensityField gaussian_field(const GridSpec& grid, double mean, double sd) {
  const double norm = 1.0 / (sd * std::sqrt(2.0 * M_PI));
  return field_from_function(grid, [&](double xi) {
    const double z = (xi - mean) / sd;
    return norm * std::exp(-0.5 * z * z);
  });
}

}  // namespace dsnld
