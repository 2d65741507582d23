#ifndef DSNLD_FFT_HPP
#define DSNLD_FFT_HPP

#include <complex>
#include <vector>

namespace dsnld {

/// In-place radix-2 Cooley-Tukey transform; size must be a power of two.
/// Forward uses kernel exp(-2 pi i jk / n); inverse divides by n.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

std::vector<std::complex<double>> fft_of_real(const std::vector<double>& v);

}  // namespace dsnld

#endif
