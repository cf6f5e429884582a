#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lrdecon/exec.hpp"
#include "lrdecon/field.hpp"
#include "lrdecon/lrdnoise.hpp"

/// Forward model: test signals, the x-dependent exponential blur, column-wise
/// periodic convolution and noise calibration on the grid t_i = i / N.
namespace lrdecon::model {

using cplx = std::complex<double>;

enum class TestSignal { kLidar, kDoppler };

std::string to_string(TestSignal s);
/// Accepts "lidar" and "doppler" (case-insensitive).
TestSignal parse_signal(const std::string& name);

/// Raw (unnormalized) signal value at t in [0, 1].
double test_signal_value(TestSignal s, double t);
/// exp(-|x - 0.5| x^3).
double x_profile_value(double x);

/// Named signal on t_i = i / N, i = 1..N, scaled to unit discrete L2 norm.
std::vector<double> make_test_signal(TestSignal s, int n);
std::vector<double> make_test_signal(const std::string& name, int n);
/// x-profile on x_l = l / N; unit norm unless normalize is false.
std::vector<double> make_x_profile(int n, bool normalize = true);
/// f(t, x) = f(t) f(x), unit norm.
SampledField make_truth(TestSignal s, int n);

/// g(t, x) = 0.5 exp(-|t| (1 + (x - 0.5)^2)) on the real line.
double kernel_value(double t, double x);

/// How the line kernel is carried onto the unit circle in t.
enum class KernelPeriodization {
  kWrapped,   ///< sum_k g(t + k, x); Fourier coefficients a / (a^2 + 4 pi^2 m^2)
  kCircular,  ///< g(min(t, 1 - t), x)
  kOneSided,  ///< g(t, x) for t in [0, 1)
  kGridStep,  ///< lag measured in grid steps: q_i = sum_c g(c, x) f_{i - c} over circular lags c
};

std::string to_string(KernelPeriodization p);
KernelPeriodization parse_periodization(const std::string& name);

struct KernelOptions {
  KernelPeriodization periodization = KernelPeriodization::kWrapped;
  double nu_declared = 0.5;
};

/// Blur kernel sampled at lags t = c / N (row c) and profiles x_l = l / N
/// (column l), with per-column and 2D Fourier coefficients.
class BlurKernel {
public:
  BlurKernel() = default;
  BlurKernel(SampledField samples, double nu_declared, KernelPeriodization periodization);

  int size() const noexcept { return samples_.size(); }
  const SampledField& samples() const noexcept { return samples_; }
  KernelPeriodization periodization() const noexcept { return periodization_; }

  /// g~(m1; x_l) = N^-1 sum_c g(c / N, x_l) e^{-2 pi i m1 c / N}, stored [m1 * N + l].
  std::span<const cplx> column_fourier() const noexcept { return column_fourier_; }
  cplx column_fourier(int m1, int l) const;

  /// 2D coefficients g~(m1, m2), stored [m1 * N + m2] in FFT order.
  std::span<const cplx> fourier() const noexcept { return fourier_; }
  cplx fourier(int m1, int m2) const;

  double nu_declared() const noexcept { return nu_declared_; }
  void set_nu_declared(double nu) { nu_declared_ = nu; }

  /// Decay rate from a log-log fit of |g~(m1, 0)| over 1 <= m1 <= m_max.
  double nu_measured(int m_max) const;

  struct Bracket {
    double c1;
    double c2;
  };
  /// min and max of |g~(m1, m2)|^2 |m1|^{2 nu} over 1 <= |m1| <= m1_max,
  /// |m2| <= m2_max.
  Bracket bracket(double nu, int m1_max, int m2_max) const;

  /// Smallest |g~(m1; x_l)| over |m1| <= m1_max and all columns.
  double min_column_modulus(int m1_max) const;

private:
  SampledField samples_;
  std::vector<cplx> column_fourier_;
  std::vector<cplx> fourier_;
  double nu_declared_ = 0.5;
  KernelPeriodization periodization_ = KernelPeriodization::kWrapped;
};

BlurKernel make_kernel(int n, const KernelOptions& options = {});

/// q(t_i, x_l) = N^-1 sum_s f(t_s, x_l) g(t_i - t_s, x_l), per column via FFT.
SampledField convolve_columns(const SampledField& f, const BlurKernel& g, Exec exec = Exec::kParallel);

/// sigma = ||q|| 10^{-snr_db / 20}. Throws DegenerateInputError for q == 0.
double calibrate_sigma(const SampledField& q, double snr_db);
/// 10 log10(||q||^2 / sigma^2).
double snr_db(const SampledField& q, double sigma);

/// Y = q + sigma xi.
SampledField observe(const SampledField& q, double sigma, const lrdnoise::NoiseSheet& sheet);
SampledField observe(const SampledField& q, double sigma, const SampledField& noise);

/// Row-major CSV with header "t,x,value"; t = (i + 1) / N, x = (l + 1) / N.
void write_field_csv(std::ostream& os, const SampledField& field);
/// Reads the format written by write_field_csv. Throws ParameterError.
SampledField read_field_csv(std::istream& is);

}  // namespace lrdecon::model
