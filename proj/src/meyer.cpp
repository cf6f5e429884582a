#include "lrdecon/meyer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lrdecon/errors.hpp"
#include "lrdecon/fft.hpp"
#include "lrdecon/grid.hpp"

namespace lrdecon::meyer {
namespace {

constexpr double kPi = std::numbers::pi;

int positive_mod(int m, int s) { return ((m % s) + s) % s; }

std::vector<cplx>& scratch(std::size_t size) {
  thread_local std::vector<cplx> buffer;
  if (buffer.size() < size) buffer.resize(size);
  return buffer;
}

}  // namespace

double aux_polynomial(double x, int degree) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  switch (degree) {
    case 0:
      return x;
    case 1:
      return x * x * (3.0 - 2.0 * x);
    case 2:
      return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
    case 3:
      return x * x * x * x * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
    default:
      throw ParameterError("Meyer window degree must be in 0..3, got " + std::to_string(degree));
  }
}

double scaling_window(double xi, int degree) {
  const double a = std::abs(xi);
  if (a <= 1.0 / 3.0) return 1.0;
  if (a >= 2.0 / 3.0) return 0.0;
  return std::cos(0.5 * kPi * aux_polynomial(3.0 * a - 1.0, degree));
}

double wavelet_window_magnitude(double xi, int degree) {
  const double a = std::abs(xi);
  if (a <= 1.0 / 3.0 || a >= 4.0 / 3.0) return 0.0;
  if (a <= 2.0 / 3.0) return std::sin(0.5 * kPi * aux_polynomial(3.0 * a - 1.0, degree));
  return std::cos(0.5 * kPi * aux_polynomial(1.5 * a - 1.0, degree));
}

cplx wavelet_window(double xi, int degree) {
  const double mag = wavelet_window_magnitude(xi, degree);
  if (mag == 0.0) return {0.0, 0.0};
  return std::polar(mag, kPi * xi);
}

double Coeffs1D::at(int j, int k) const {
  if (j < m0 - 1 || j > J || k < 0 || k >= block_size(m0, j))
    throw IndexError("Coeffs1D: index (" + std::to_string(j) + "," + std::to_string(k) + ") out of range");
  return values[offset(m0, j) + k];
}

double& Coeffs1D::at(int j, int k) {
  if (j < m0 - 1 || j > J || k < 0 || k >= block_size(m0, j))
    throw IndexError("Coeffs1D: index (" + std::to_string(j) + "," + std::to_string(k) + ") out of range");
  return values[offset(m0, j) + k];
}

WaveletCoeffs2D::WaveletCoeffs2D(int m0, int J1, int J2)
    : m0_(m0), J1_(J1), J2_(J2), values_(static_cast<std::size_t>(1) << (J1 + 1 + J2 + 1), 0.0) {
  if (J1 < m0 || J2 < m0) throw ConfigError("WaveletCoeffs2D: finest levels must be >= m0");
}

void WaveletCoeffs2D::check(int j1, int k1, int j2, int k2) const {
  const bool ok = j1 >= m0_ - 1 && j1 <= J1_ && j2 >= m0_ - 1 && j2 <= J2_ && k1 >= 0 &&
                  k1 < Coeffs1D::block_size(m0_, j1) && k2 >= 0 && k2 < Coeffs1D::block_size(m0_, j2);
  if (!ok)
    throw IndexError("WaveletCoeffs2D: index (" + std::to_string(j1) + "," + std::to_string(k1) + ";" +
                     std::to_string(j2) + "," + std::to_string(k2) + ") outside Omega(J1,J2)");
}

double WaveletCoeffs2D::at(int j1, int k1, int j2, int k2) const {
  check(j1, k1, j2, k2);
  return values_[static_cast<std::size_t>(Coeffs1D::offset(m0_, j1) + k1) * cols() + Coeffs1D::offset(m0_, j2) +
                 k2];
}

double& WaveletCoeffs2D::at(int j1, int k1, int j2, int k2) {
  check(j1, k1, j2, k2);
  return values_[static_cast<std::size_t>(Coeffs1D::offset(m0_, j1) + k1) * cols() + Coeffs1D::offset(m0_, j2) +
                 k2];
}

int WaveletCoeffs2D::level_of(int position) const {
  if (position < (1 << m0_)) return m0_ - 1;
  int j = m0_;
  while ((2 << j) <= position) ++j;
  return j;
}

double WaveletCoeffs2D::sum_of_squares() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

MeyerBasis::MeyerBasis(int n, int m0, int window_degree)
    : n_(n), log2n_(fft::log2_exact(n)), m0_(m0), degree_(window_degree) {
  if (m0 < 2) throw ConfigError("m0 must be >= 2, got " + std::to_string(m0));
  if (m0 > log2n_ - 2)
    throw ConfigError("m0=" + std::to_string(m0) + " too large for N=" + std::to_string(n) +
                      " (maximum " + std::to_string(log2n_ - 2) + ")");
  aux_polynomial(0.5, window_degree);  // validates the degree

  for (int j = m0_ - 1; j <= max_level(); ++j) {
    std::vector<BandTap> taps;
    for (int m = -n_ / 2; m < n_ / 2; ++m) {
      const cplx w = level_weight(j, m);
      if (w != cplx{0.0, 0.0}) taps.push_back({m, grid::fft_index(m, n_), positive_mod(m, Coeffs1D::block_size(m0_, j)), w});
    }
    bands_.push_back(std::move(taps));
  }
}

cplx MeyerBasis::level_weight(int j, int m) const {
  if (j == m0_ - 1) {
    const double xi = static_cast<double>(m) / (1 << m0_);
    return {std::pow(2.0, -0.5 * m0_) * scaling_window(xi, degree_), 0.0};
  }
  const double xi = static_cast<double>(m) / (1 << j);
  const double amp = std::pow(2.0, -0.5 * j);
  if (j == max_level()) {
    // Finest level: complement of the level-j scaling space inside [-N/2, N/2).
    if (m < -n_ / 2 || m >= n_ / 2) return {0.0, 0.0};
    // sqrt(1 - Phi^2(xi)), written without the cancellation near |xi| = 1/3.
    const double a = std::abs(xi);
    if (a <= 1.0 / 3.0) return {0.0, 0.0};
    const double mag = a >= 2.0 / 3.0 ? 1.0 : std::sin(0.5 * kPi * aux_polynomial(3.0 * a - 1.0, degree_));
    if (mag == 0.0) return {0.0, 0.0};
    return amp * std::polar(mag, kPi * xi);
  }
  return amp * wavelet_window(xi, degree_);
}

void MeyerBasis::validate_level(int J) const {
  if (J < m0_ || J > max_level())
    throw ConfigError("finest level J=" + std::to_string(J) + " not admissible for N=" + std::to_string(n_) +
                      ": need " + std::to_string(m0_) + " <= J <= " + std::to_string(max_level()) +
                      " (maximal admissible J is " + std::to_string(max_level()) + ")");
}

cplx MeyerBasis::filter_coefficient(int j, int k, int m) const {
  if (j < m0_ - 1 || j > max_level())
    throw IndexError("filter_coefficient: level " + std::to_string(j) + " outside [" + std::to_string(m0_ - 1) +
                     ", " + std::to_string(max_level()) + "]");
  const int shifts = Coeffs1D::block_size(m0_, j);
  if (k < 0 || k >= shifts)
    throw IndexError("filter_coefficient: shift " + std::to_string(k) + " outside [0, " + std::to_string(shifts) + ")");
  const cplx w = level_weight(j, m);
  if (w == cplx{0.0, 0.0}) return w;
  const double phase = -2.0 * kPi * static_cast<double>(positive_mod(m, shifts)) * k / shifts;
  return w * std::polar(1.0, phase);
}

std::span<const BandTap> MeyerBasis::band(int j) const {
  if (j < m0_ - 1 || j > max_level()) throw IndexError("band: level " + std::to_string(j) + " out of range");
  return bands_[j - (m0_ - 1)];
}

int MeyerBasis::band_limit(int J) const {
  validate_level(J);
  int limit = 0;
  for (int j = m0_ - 1; j <= J; ++j)
    for (const auto& tap : band(j)) limit = std::max(limit, std::abs(tap.m));
  return limit;
}

void MeyerBasis::analyze_spectrum(std::span<const cplx> spectrum, int J, std::span<cplx> coeffs) const {
  validate_level(J);
  if (spectrum.size() != static_cast<std::size_t>(n_)) throw ParameterError("analyze_spectrum: spectrum length != N");
  if (coeffs.size() != static_cast<std::size_t>(2) << J) throw ParameterError("analyze_spectrum: output length != 2^(J+1)");
  auto& work = scratch(static_cast<std::size_t>(1) << J);
  for (int j = m0_ - 1; j <= J; ++j) {
    const int s = Coeffs1D::block_size(m0_, j);
    std::span<cplx> folded(work.data(), s);
    std::fill(folded.begin(), folded.end(), cplx{});
    for (const auto& tap : band(j)) folded[tap.slot] += std::conj(tap.weight) * spectrum[tap.index];
    fft::backward(folded, coeffs.subspan(Coeffs1D::offset(m0_, j), s));
  }
}

void MeyerBasis::synthesize_spectrum(std::span<const cplx> coeffs, int J, std::span<cplx> spectrum) const {
  validate_level(J);
  if (spectrum.size() != static_cast<std::size_t>(n_)) throw ParameterError("synthesize_spectrum: spectrum length != N");
  if (coeffs.size() != static_cast<std::size_t>(2) << J) throw ParameterError("synthesize_spectrum: input length != 2^(J+1)");
  std::fill(spectrum.begin(), spectrum.end(), cplx{});
  auto& work = scratch(static_cast<std::size_t>(1) << J);
  for (int j = m0_ - 1; j <= J; ++j) {
    const int s = Coeffs1D::block_size(m0_, j);
    std::span<cplx> dft(work.data(), s);
    fft::forward(coeffs.subspan(Coeffs1D::offset(m0_, j), s), dft);
    for (const auto& tap : band(j)) spectrum[tap.index] += tap.weight * dft[tap.slot];
  }
}

Coeffs1D MeyerBasis::forward_1d(std::span<const double> signal, int J) const {
  validate_level(J);
  if (signal.size() != static_cast<std::size_t>(n_))
    throw ParameterError("forward_1d: signal length " + std::to_string(signal.size()) + " != N=" + std::to_string(n_));
  std::vector<cplx> spec(signal.begin(), signal.end());
  fft::forward_inplace(spec);
  for (auto& c : spec) c /= static_cast<double>(n_);
  std::vector<cplx> out(static_cast<std::size_t>(2) << J);
  analyze_spectrum(spec, J, out);
  Coeffs1D result{m0_, J, std::vector<double>(out.size())};
  for (std::size_t i = 0; i < out.size(); ++i) result.values[i] = out[i].real();
  return result;
}

std::vector<double> MeyerBasis::inverse_1d(const Coeffs1D& coeffs) const {
  validate_level(coeffs.J);
  if (coeffs.m0 != m0_) throw ParameterError("inverse_1d: coefficient m0 does not match basis");
  if (coeffs.values.size() != static_cast<std::size_t>(2) << coeffs.J)
    throw ParameterError("inverse_1d: coefficient count != 2^(J+1)");
  std::vector<cplx> in(coeffs.values.begin(), coeffs.values.end());
  std::vector<cplx> spec(n_);
  synthesize_spectrum(in, coeffs.J, spec);
  fft::backward_inplace(spec);
  std::vector<double> out(n_);
  for (int i = 0; i < n_; ++i) out[i] = spec[i].real();
  return out;
}

WaveletCoeffs2D MeyerBasis::analyze_spectrum_2d(std::span<const cplx> spectrum, int J1, int J2, Exec exec) const {
  validate_level(J1);
  validate_level(J2);
  const std::size_t nn = static_cast<std::size_t>(n_) * n_;
  if (spectrum.size() != nn) throw ParameterError("analyze_spectrum_2d: spectrum is not N x N");
  const int l1 = 2 << J1;
  const int l2 = 2 << J2;
  const bool parallel = exec == Exec::kParallel;

  std::vector<cplx> by_m2(nn);
  grid::transpose(spectrum, by_m2, n_, n_, exec);  // [m2][m1]

  std::vector<cplx> t_coeffs(static_cast<std::size_t>(n_) * l1);  // [m2][c1]
#pragma omp parallel for schedule(static) if (parallel)
  for (int m2 = 0; m2 < n_; ++m2) {
    analyze_spectrum(std::span<const cplx>(by_m2).subspan(static_cast<std::size_t>(m2) * n_, n_), J1,
                     std::span<cplx>(t_coeffs).subspan(static_cast<std::size_t>(m2) * l1, l1));
  }

  std::vector<cplx> by_c1(static_cast<std::size_t>(l1) * n_);  // [c1][m2]
  grid::transpose(t_coeffs, by_c1, n_, l1, exec);

  WaveletCoeffs2D result(m0_, J1, J2);
  auto out = result.values();
#pragma omp parallel for schedule(static) if (parallel)
  for (int c1 = 0; c1 < l1; ++c1) {
    std::vector<cplx> row(l2);
    analyze_spectrum(std::span<const cplx>(by_c1).subspan(static_cast<std::size_t>(c1) * n_, n_), J2, row);
    for (int c2 = 0; c2 < l2; ++c2) out[static_cast<std::size_t>(c1) * l2 + c2] = row[c2].real();
  }
  return result;
}

std::vector<cplx> MeyerBasis::synthesize_spectrum_2d(const WaveletCoeffs2D& coeffs, Exec exec) const {
  if (coeffs.m0() != m0_) throw ParameterError("synthesize_spectrum_2d: coefficient m0 does not match basis");
  const int J1 = coeffs.J1();
  const int J2 = coeffs.J2();
  validate_level(J1);
  validate_level(J2);
  const int l1 = coeffs.rows();
  const int l2 = coeffs.cols();
  const bool parallel = exec == Exec::kParallel;
  const auto in = coeffs.values();

  std::vector<cplx> by_c1(static_cast<std::size_t>(l1) * n_);  // [c1][m2]
#pragma omp parallel for schedule(static) if (parallel)
  for (int c1 = 0; c1 < l1; ++c1) {
    std::vector<cplx> row(in.begin() + static_cast<std::ptrdiff_t>(c1) * l2,
                          in.begin() + static_cast<std::ptrdiff_t>(c1 + 1) * l2);
    synthesize_spectrum(row, J2, std::span<cplx>(by_c1).subspan(static_cast<std::size_t>(c1) * n_, n_));
  }

  std::vector<cplx> by_m2(static_cast<std::size_t>(n_) * l1);  // [m2][c1]
  grid::transpose(by_c1, by_m2, l1, n_, exec);

  const std::size_t nn = static_cast<std::size_t>(n_) * n_;
  std::vector<cplx> spec_t(nn);  // [m2][m1]
#pragma omp parallel for schedule(static) if (parallel)
  for (int m2 = 0; m2 < n_; ++m2) {
    synthesize_spectrum(std::span<const cplx>(by_m2).subspan(static_cast<std::size_t>(m2) * l1, l1), J1,
                        std::span<cplx>(spec_t).subspan(static_cast<std::size_t>(m2) * n_, n_));
  }
  std::vector<cplx> spectrum(nn);
  grid::transpose(spec_t, spectrum, n_, n_, exec);
  return spectrum;
}

WaveletCoeffs2D MeyerBasis::forward_2d(const SampledField& field, int J1, int J2, Exec exec) const {
  if (field.size() != n_)
    throw ParameterError("forward_2d: field size " + std::to_string(field.size()) + " != basis N=" + std::to_string(n_));
  validate_level(J1);
  validate_level(J2);
  return analyze_spectrum_2d(grid::spectrum_2d(field, exec), J1, J2, exec);
}

SampledField MeyerBasis::inverse_2d(const WaveletCoeffs2D& coeffs, Exec exec) const {
  return grid::field_from_spectrum(synthesize_spectrum_2d(coeffs, exec), n_, exec);
}

}  // namespace lrdecon::meyer
