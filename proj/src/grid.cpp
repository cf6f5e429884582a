#include "lrdecon/grid.hpp"

#include <cstddef>

#include "lrdecon/errors.hpp"
#include "lrdecon/fft.hpp"

namespace lrdecon::grid {

void transpose(std::span<const cplx> src, std::span<cplx> dst, int rows, int cols, Exec exec) {
  const std::size_t total = static_cast<std::size_t>(rows) * cols;
  if (src.size() != total || dst.size() != total) throw ParameterError("transpose: buffer size mismatch");
  constexpr int kBlock = 32;
  const bool parallel = exec == Exec::kParallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (int rb = 0; rb < rows; rb += kBlock) {
    const int r_end = rb + kBlock < rows ? rb + kBlock : rows;
    for (int cb = 0; cb < cols; cb += kBlock) {
      const int c_end = cb + kBlock < cols ? cb + kBlock : cols;
      for (int r = rb; r < r_end; ++r)
        for (int c = cb; c < c_end; ++c)
          dst[static_cast<std::size_t>(c) * rows + r] = src[static_cast<std::size_t>(r) * cols + c];
    }
  }
}

void fft_rows(std::span<cplx> data, int rows, int cols, int sign, Exec exec) {
  if (data.size() != static_cast<std::size_t>(rows) * cols) throw ParameterError("fft_rows: buffer size mismatch");
  const bool parallel = exec == Exec::kParallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (int r = 0; r < rows; ++r) {
    auto row = data.subspan(static_cast<std::size_t>(r) * cols, cols);
    if (sign < 0)
      fft::forward_inplace(row);
    else
      fft::backward_inplace(row);
  }
}

std::vector<cplx> spectrum_2d(const SampledField& field, Exec exec) {
  const int n = field.size();
  const std::size_t total = static_cast<std::size_t>(n) * n;
  std::vector<cplx> work(total), out(total);
  const auto v = field.values();
  for (std::size_t a = 0; a < total; ++a) work[a] = v[a];
  fft_rows(work, n, n, -1, exec);  // along l -> m2, layout [i][m2]
  transpose(work, out, n, n, exec);  // [m2][i]
  fft_rows(out, n, n, -1, exec);     // along i -> m1, layout [m2][m1]
  transpose(out, work, n, n, exec);  // [m1][m2]
  const double scale = 1.0 / static_cast<double>(total);
  for (auto& c : work) c *= scale;
  return work;
}

SampledField field_from_spectrum(std::span<const cplx> spectrum, int n, Exec exec) {
  const std::size_t total = static_cast<std::size_t>(n) * n;
  if (spectrum.size() != total) throw ParameterError("field_from_spectrum: size mismatch");
  std::vector<cplx> work(spectrum.begin(), spectrum.end()), tmp(total);
  fft_rows(work, n, n, +1, exec);  // along m2 -> l, layout [m1][l]
  transpose(work, tmp, n, n, exec);  // [l][m1]
  fft_rows(tmp, n, n, +1, exec);     // along m1 -> i, layout [l][i]
  transpose(tmp, work, n, n, exec);  // [i][l]
  SampledField f(n);
  auto v = f.values();
  for (std::size_t a = 0; a < total; ++a) v[a] = work[a].real();
  return f;
}

}  // namespace lrdecon::grid
