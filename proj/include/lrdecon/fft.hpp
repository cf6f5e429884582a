#pragma once

#include <complex>
#include <span>

namespace lrdecon::fft {

using cplx = std::complex<double>;

// Thin wrappers around FFTW plans. Plans are created once per (size, sign) and
// cached; execution is thread-safe. No normalization is applied:
//   forward:  X[k] = sum_n x[n] e^{-2 pi i n k / N}
//   backward: x[n] = sum_k X[k] e^{+2 pi i n k / N}
void forward(std::span<const cplx> in, std::span<cplx> out);
void backward(std::span<const cplx> in, std::span<cplx> out);

/// In-place, same conventions.
void forward_inplace(std::span<cplx> data);
void backward_inplace(std::span<cplx> data);

bool is_power_of_two(long n);
int log2_exact(long n);

}  // namespace lrdecon::fft
