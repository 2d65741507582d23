#include "dsnld/spectral.hpp"

#include <cmath>

#include "dsnld/errors.hpp"
#include "dsnld/fft.hpp"

namespace dsnld {

namespace {

double wavenumber(int j, const GridSpec& grid) {
  const int n = grid.n_points;
  const int jj = j <= n / 2 ? j : j - n;
  return M_PI * jj / grid.half_width;
}

}  // namespace

double sobolev_norm(std::span<const double> values, const GridSpec& grid, double s) {
  if (static_cast<int>(values.size()) != grid.n_points)
    throw GridMismatchError("sobolev_norm: field length does not match grid");
  std::vector<std::complex<double>> a(values.begin(), values.end());
  for (const auto& z : a)
    if (!std::isfinite(z.real())) throw NumericError("sobolev_norm: non-finite input");
  fft_inplace(a, false);

  const int n = grid.n_points;
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const double k = wavenumber(j, grid);
    acc += std::pow(1.0 + k * k, s) * std::norm(a[j]);
  }
  return std::sqrt(acc * grid.dx() / n);
}

DensityField spectral_apply(const DensityField& field,
                            const std::function<double(double)>& symbol) {
  std::vector<std::complex<double>> a(field.values.begin(), field.values.end());
  fft_inplace(a, false);
  const int n = field.grid.n_points;
  for (int j = 0; j < n; ++j) a[j] *= symbol(wavenumber(j, field.grid));
  fft_inplace(a, true);
  DensityField out(field.grid, field.time_stamp);
  for (int j = 0; j < n; ++j) out.values[j] = a[j].real();
  return out;
}

}  // namespace dsnld
