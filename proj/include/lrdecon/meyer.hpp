#pragma once

#include <complex>
#include <span>
#include <vector>

#include "lrdecon/exec.hpp"
#include "lrdecon/field.hpp"

/// Band-limited periodized Meyer wavelets on [0, 1], evaluated in the Fourier
/// domain.
///
/// With Fourier coefficients f~(m) = int_0^1 f(t) e^{-2 pi i m t} dt, the
/// periodized atoms are
///
///     psi~_{j,k}(m) = 2^{-j/2} psi^(m / 2^j) e^{-2 pi i m k / 2^j},
///
/// where psi^ is supported on 1/3 <= |xi| <= 4/3 (angular band
/// 2pi/3 [2^j, 2^{j+2}]). The coarse block holds the 2^{m0} scaling functions
/// phi_{m0,k}; it is labelled level m0 - 1 so that wavelet levels m0..J follow
/// it directly. Coefficient vectors are laid out dyadically: the scaling block
/// occupies [0, 2^{m0}) and wavelet level j occupies [2^j, 2^{j+1}), so a set
/// with finest level J has exactly 2^{J+1} entries.
///
/// For an N-point grid the finest level is log2(N) - 1. Its wavelet is the
/// complement of the scaling space at that level folded into [-N/2, N/2), which
/// makes the full set an orthonormal basis of the N-point periodic signals.
namespace lrdecon::meyer {

using cplx = std::complex<double>;

/// Auxiliary Meyer polynomial nu(x) on [0, 1], with nu(x) + nu(1 - x) = 1.
/// Degrees 0..3; degree 3 is x^4 (35 - 84 x + 70 x^2 - 20 x^3).
double aux_polynomial(double x, int degree);

/// Scaling function transform Phi^(xi) (real, nonnegative), xi in cycles.
double scaling_window(double xi, int degree);

/// |Psi^(xi)|, xi in cycles.
double wavelet_window_magnitude(double xi, int degree);

/// Psi^(xi) = e^{i pi xi} |Psi^(xi)|.
cplx wavelet_window(double xi, int degree);

/// One nonzero Fourier tap of a level: signed frequency m, its FFT-order index,
/// m modulo the number of shifts and the amplitude 2^{-j/2} psi^(m / 2^j)
/// (shift phase excluded).
struct BandTap {
  int m;
  int index;
  int slot;
  cplx weight;
};

/// Coefficients of a 1D periodic signal for levels m0 - 1 (scaling) .. J.
struct Coeffs1D {
  int m0 = 3;
  int J = 3;
  std::vector<double> values;

  static int offset(int m0, int j) { return j == m0 - 1 ? 0 : 1 << j; }
  static int block_size(int m0, int j) { return j == m0 - 1 ? 1 << m0 : 1 << j; }

  double at(int j, int k) const;
  double& at(int j, int k);
};

/// Coefficients beta_{j1,k1,j2,k2} over Omega(J1, J2); j1 runs along t (rows),
/// j2 along x (columns). values[c1 * cols() + c2] with c_i the dyadic offset of
/// (j_i, k_i).
class WaveletCoeffs2D {
public:
  WaveletCoeffs2D() = default;
  WaveletCoeffs2D(int m0, int J1, int J2);

  int m0() const noexcept { return m0_; }
  int J1() const noexcept { return J1_; }
  int J2() const noexcept { return J2_; }
  int rows() const noexcept { return 1 << (J1_ + 1); }
  int cols() const noexcept { return 1 << (J2_ + 1); }
  /// True: level label m0 - 1 denotes the scaling block.
  static constexpr bool kScalingBlockAtM0Minus1 = true;

  double at(int j1, int k1, int j2, int k2) const;
  double& at(int j1, int k1, int j2, int k2);

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Level label of a dyadic row/column position.
  int level_of(int position) const;

  double sum_of_squares() const;

private:
  void check(int j1, int k1, int j2, int k2) const;

  int m0_ = 3;
  int J1_ = 3;
  int J2_ = 3;
  std::vector<double> values_;
};

class MeyerBasis {
public:
  /// Basis for N-point periodic signals. Requires N a power of two and
  /// 2 <= m0 <= log2(N) - 2.
  explicit MeyerBasis(int n, int m0 = 3, int window_degree = 3);

  int size() const noexcept { return n_; }
  int m0() const noexcept { return m0_; }
  int window_degree() const noexcept { return degree_; }
  int scaling_level() const noexcept { return m0_ - 1; }
  int max_level() const noexcept { return log2n_ - 1; }

  /// Throws ConfigError unless m0 <= J <= log2(N) - 1.
  void validate_level(int J) const;

  /// psi~_{j,k}(m) for any integer m. Throws IndexError for j outside
  /// [m0 - 1, log2(N) - 1] or k outside the level's shift range.
  cplx filter_coefficient(int j, int k, int m) const;

  /// Nonzero taps of level j on [-N/2, N/2).
  std::span<const BandTap> band(int j) const;

  /// Largest |m| with a nonzero tap at levels <= J.
  int band_limit(int J) const;

  Coeffs1D forward_1d(std::span<const double> signal, int J) const;
  std::vector<double> inverse_1d(const Coeffs1D& coeffs) const;

  /// Analysis from normalized Fourier coefficients (FFT order, length N) into
  /// 2^{J+1} complex coefficients.
  void analyze_spectrum(std::span<const cplx> spectrum, int J, std::span<cplx> coeffs) const;
  /// Synthesis of normalized Fourier coefficients (FFT order, length N).
  void synthesize_spectrum(std::span<const cplx> coeffs, int J, std::span<cplx> spectrum) const;

  WaveletCoeffs2D forward_2d(const SampledField& field, int J1, int J2, Exec exec = Exec::kParallel) const;
  SampledField inverse_2d(const WaveletCoeffs2D& coeffs, Exec exec = Exec::kParallel) const;

  /// 2D analysis of a spectrum laid out as S[m1 * N + m2] (FFT order). Real
  /// parts are kept; they carry the coefficients of real fields.
  WaveletCoeffs2D analyze_spectrum_2d(std::span<const cplx> spectrum, int J1, int J2,
                                      Exec exec = Exec::kParallel) const;
  std::vector<cplx> synthesize_spectrum_2d(const WaveletCoeffs2D& coeffs, Exec exec = Exec::kParallel) const;

private:
  cplx level_weight(int j, int m) const;

  int n_;
  int log2n_;
  int m0_;
  int degree_;
  // bands_[j - (m0 - 1)] for j = m0 - 1 .. log2(N) - 1
  std::vector<std::vector<BandTap>> bands_;
};

}  // namespace lrdecon::meyer
