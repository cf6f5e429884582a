#pragma once

#include <complex>
#include <span>
#include <vector>

#include "lrdecon/exec.hpp"
#include "lrdecon/field.hpp"

namespace lrdecon::grid {

using cplx = std::complex<double>;

/// dst[c * rows + r] = src[r * cols + c].
void transpose(std::span<const cplx> src, std::span<cplx> dst, int rows, int cols, Exec exec);

/// Unnormalized FFT of every row of a rows x cols buffer, in place.
/// sign < 0 is the forward (e^{-i}) transform.
void fft_rows(std::span<cplx> data, int rows, int cols, int sign, Exec exec);

/// Normalized 2D Fourier coefficients of a field,
///   F(m1, m2) = N^-2 sum_{i,l} f(i, l) e^{-2 pi i (m1 i + m2 l) / N},
/// stored as F[m1 * N + m2] with each index in FFT order (m mod N).
std::vector<cplx> spectrum_2d(const SampledField& field, Exec exec);

/// Inverse of spectrum_2d; keeps the real part.
SampledField field_from_spectrum(std::span<const cplx> spectrum, int n, Exec exec);

/// Maps a signed frequency in [-N/2, N/2) to its FFT-order index.
inline int fft_index(int m, int n) { return ((m % n) + n) % n; }
/// Inverse of fft_index.
inline int signed_frequency(int index, int n) { return index < n / 2 ? index : index - n; }

}  // namespace lrdecon::grid
