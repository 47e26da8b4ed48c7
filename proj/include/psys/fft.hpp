#pragma once

#include <complex>
#include <cstddef>

namespace psys::fft {

/// Unnormalised forward transform, out_m = sum_j in_j exp(-2 pi i j m / n).
void forward(const std::complex<double>* in, std::complex<double>* out, std::size_t n);
/// Unnormalised backward transform, out_j = sum_m in_m exp(+2 pi i j m / n).
void backward(const std::complex<double>* in, std::complex<double>* out, std::size_t n);

}  // namespace psys::fft
