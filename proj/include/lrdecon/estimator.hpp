#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrdecon/exec.hpp"
#include "lrdecon/field.hpp"
#include "lrdecon/lrdnoise.hpp"
#include "lrdecon/meyer.hpp"
#include "lrdecon/model.hpp"

/// Deconvolution by Fourier-domain Meyer coefficients with level-dependent hard
/// thresholds for long-memory noise, plus risk and Besov diagnostics.
namespace lrdecon::estimator {

using cplx = std::complex<double>;
using meyer::MeyerBasis;
using meyer::WaveletCoeffs2D;

/// Link between the discrete noise level sigma on an N x N grid and the
/// continuous scale epsilon of dY = q + eps^{abar} dB.
enum class EpsilonMapping {
  kFullGrid,  ///< eps^{2 abar} = sigma^2 N^{-(alpha1 + alpha2)}
  kHalfGrid,  ///< eps^{2 abar} = sigma^2 N^{-(alpha1 + alpha2) / 2}
};

std::string to_string(EpsilonMapping m);
/// Accepts "full-grid" and "half-grid".
EpsilonMapping parse_epsilon_mapping(const std::string& name);

/// eps^{2 abar} for the given mapping.
double epsilon_power(double sigma, int n, const lrdnoise::LongMemoryParams& alpha, EpsilonMapping mapping);
/// eps itself, i.e. epsilon_power^{1 / (2 abar)}.
double noise_scale(double sigma, int n, const lrdnoise::LongMemoryParams& alpha, EpsilonMapping mapping);

struct ThresholdPolicy {
  double gamma = 2.449489742783178;  // sqrt(6)
  double epsilon = 0.0;
  lrdnoise::LongMemoryParams alpha;
  double nu = 0.5;

  /// Throws ParameterError unless 0 < eps < 1, gamma >= 0, nu > 0 and alpha valid.
  void validate() const;
  /// gamma eps^{abar} sqrt|ln eps| 2^{(j1/2)(2 nu + alpha1 - 1)} 2^{(j2/2)(alpha2 - 1)}.
  double lambda(int j1, int j2) const;
};

double threshold_lambda(const ThresholdPolicy& policy, int j1, int j2);

struct LevelSelection {
  int J1 = 3;
  int J2 = 5;
  double A = 1.0;
  /// Levels from the formula before clamping to [m0, log2(N) - 1].
  int J1_raw = 3;
  int J2_raw = 5;
  bool J1_capped = false;
  bool J2_capped = false;
};

/// 2^{J2} = [eps^{2 abar} / A^2]^{-1 / alpha2}, 2^{J1} = [eps^{2 abar} / A^2]^{-1 / (2 nu + alpha1)},
/// floored to powers of two and clamped to the admissible range for N.
LevelSelection finest_levels(double epsilon, double A, const lrdnoise::LongMemoryParams& alpha, double nu, int n,
                             int m0 = 3);

/// Fixed levels, validated against N.
LevelSelection fixed_levels(int J1, int J2, int n, int m0 = 3);

/// Estimated Fourier coefficients f~(m1, m2), layout [m1 * N + m2], from
/// Y~(m1; x_l) / g~(m1; x_l) per column followed by a transform along x.
/// Modes with |m1| > m1_max are set to zero. Throws IllPosednessError when a
/// kernel coefficient needed for division vanishes.
std::vector<cplx> deconvolved_spectrum(const SampledField& y, const model::BlurKernel& g, int m1_max,
                                       Exec exec = Exec::kParallel);

/// beta~ for one index by direct summation over the two bands.
cplx beta_tilde(std::span<const cplx> deconvolved, const MeyerBasis& basis, int j1, int k1, int j2, int k2);

/// All beta~ over Omega(J1, J2).
WaveletCoeffs2D estimate_coefficients(const SampledField& y, const model::BlurKernel& g, const MeyerBasis& basis,
                                      int J1, int J2, Exec exec = Exec::kParallel);

/// Zeroes every coefficient with |beta| <= lambda(j1, j2) outside the pure
/// scaling block. Returns the number of surviving thresholded coefficients.
long hard_threshold(WaveletCoeffs2D& coeffs, const ThresholdPolicy& policy);

struct Estimate {
  SampledField field;
  WaveletCoeffs2D coeffs;  ///< surviving coefficients
  long kept = 0;
};

Estimate estimate(const SampledField& y, const model::BlurKernel& g, const MeyerBasis& basis,
                  const ThresholdPolicy& policy, const LevelSelection& levels, Exec exec = Exec::kParallel);

/// ||f_hat - f||^2 on the grid computed from coefficients: the coefficient
/// error on Omega plus the energy of f outside Omega.
double coefficient_ise(const WaveletCoeffs2D& estimate, const WaveletCoeffs2D& truth, double truth_energy);

/// N^-2 sum |f_hat - f|^p.
double integrated_error(const SampledField& truth, const SampledField& estimate, double p = 2.0);

struct RiskReport {
  double mise = 0.0;
  std::optional<double> lp_risk;
  double p = 2.0;
  std::vector<double> per_run;
  int runs = 0;
  int J1_used = 0;
  int J2_used = 0;

  /// Flat "key=value" lines.
  std::string to_text() const;
};

RiskReport summarize(std::vector<double> per_run_errors, int J1, int J2);
RiskReport mise(const SampledField& truth, std::span<const SampledField> runs);
double lp_risk(const SampledField& truth, std::span<const SampledField> runs, double p);

/// Coefficients of one level pair (j1, j2) in any layout.
struct LevelBlock {
  int j1 = 0;
  int j2 = 0;
  std::vector<double> values;
};

std::vector<LevelBlock> level_blocks(const WaveletCoeffs2D& coeffs);

struct BesovLevel {
  int j1;
  int j2;
  double sum_p;       ///< sum_k |beta|^p
  double required_A;  ///< smallest A meeting the per-level bound
};

struct BesovDiagnostic {
  std::vector<BesovLevel> levels;
  double min_A = 0.0;
  double A = 1.0;
  bool passes = true;
};

/// Checks sum_k |beta|^p <= A^p 2^{-p[(j1 s1 + j2 s2) + (1/2 - 1/p')(j1 + j2)]}
/// per level, p' = min(p, pi).
BesovDiagnostic besov_diagnostic(std::span<const LevelBlock> blocks, double s1, double s2, double pi, double p,
                                 double A);
BesovDiagnostic besov_diagnostic(const WaveletCoeffs2D& coeffs, double s1, double s2, double pi, double p, double A);

/// (sum_{j1,j2} 2^{(j1 s1* + j2 s2*) q} (sum_k |beta|^pi)^{q / pi})^{1/q}, s* = s + 1/2 - 1/pi.
/// pi and q may be infinite.
double besov_norm(std::span<const LevelBlock> blocks, double s1, double s2, double pi, double q);

}  // namespace lrdecon::estimator
