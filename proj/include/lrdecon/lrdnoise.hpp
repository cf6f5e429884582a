#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lrdecon/field.hpp"

/// Anisotropic long-memory noise: fARIMA(0,d,0) and fractional Gaussian noise
/// paths, product sheets, and covariance diagnostics.
namespace lrdecon::lrdnoise {

/// alpha in (0, 1] -> fractional differencing order d = (1 - alpha) / 2.
double d_from_alpha(double alpha);
/// alpha in (0, 1] -> Hurst index H = 1 - alpha / 2.
double hurst_from_alpha(double alpha);

struct LongMemoryParams {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  std::uint64_t seed = 0;

  /// Throws ParameterError unless 0 < alpha_i <= 1.
  void validate() const;

  double hurst1() const { return hurst_from_alpha(alpha1); }
  double hurst2() const { return hurst_from_alpha(alpha2); }
  double d1() const { return d_from_alpha(alpha1); }
  double d2() const { return d_from_alpha(alpha2); }
  double mean_alpha() const { return 0.5 * (alpha1 + alpha2); }
};

enum class NoiseConstruction { kFarimaProduct, kExactFgnProduct };

std::string to_string(NoiseConstruction c);
/// Accepts "farima-product" and "exact-fgn-product".
NoiseConstruction parse_construction(const std::string& name);

struct NoiseSheet {
  SampledField values;
  LongMemoryParams params;
  NoiseConstruction construction = NoiseConstruction::kFarimaProduct;
};

enum class FarimaMethod {
  kCirculant,      ///< exact: circulant embedding of the fARIMA autocovariance
  kMovingAverage,  ///< MA(infinity) representation truncated at 4N weights
};

std::string to_string(FarimaMethod m);
/// Accepts "circulant" and "moving-average".
FarimaMethod parse_farima_method(const std::string& name);

/// Independent generator for stream `stream` of a run seeded with `seed`.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Mixes (seed, index) into a well-spread 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Autocovariance of fARIMA(0,d,0) with unit innovation variance at lags 0..max_lag:
/// gamma(0) = Gamma(1-2d)/Gamma(1-d)^2, gamma(h) = gamma(h-1) (h-1+d)/(h-d).
std::vector<double> farima_autocovariance(double d, int max_lag);

/// Autocorrelation of unit-variance fGn: (|h+1|^{2H} - 2|h|^{2H} + |h-1|^{2H}) / 2.
std::vector<double> fgn_autocovariance(double hurst, int max_lag);

/// Eigenvalues of the 2N-point circulant embedding of acvf[0..N] (acvf has N+1
/// entries). Throws NumericalError if the embedding is not nonnegative definite.
std::vector<double> circulant_eigenvalues(std::span<const double> acvf);

/// Stationary Gaussian path of length N whose autocovariance is acvf[0..N-1]
/// (acvf must have N+1 entries), by circulant embedding.
std::vector<double> circulant_gaussian(std::span<const double> acvf, std::mt19937_64& rng);

/// fARIMA(0,d,0) path with unit innovation variance. Requires 0 <= d < 0.5.
std::vector<double> farima_path(double d, int n, std::uint64_t seed, FarimaMethod method = FarimaMethod::kCirculant);

/// Unit-variance fractional Gaussian noise increments. Requires 0.5 <= H < 1.
std::vector<double> exact_fgn_path(double hurst, int n, std::uint64_t seed);

/// N x N noise sheet scaled to unit empirical variance.
///  - farima-product: xi_{il} = u_i v_l with independent fARIMA(0,d1,0), fARIMA(0,d2,0)
///  - exact-fgn-product: Gaussian field with covariance rho_{H1}(h1) rho_{H2}(h2)
/// `method` selects the fARIMA path generator and is ignored for exact-fgn-product.
NoiseSheet noise_sheet(const LongMemoryParams& params, int n, std::uint64_t seed,
                       NoiseConstruction construction = NoiseConstruction::kFarimaProduct,
                       FarimaMethod method = FarimaMethod::kCirculant);

/// X_N(1, 1) = N^{-(2 - alpha1/2 - alpha2/2)} sum_{i,l} xi_{il}.
double partial_sum_diagnostic(const NoiseSheet& sheet);

/// Zero-mean sample autocovariance, sum_t x_t x_{t+h} / (N - h), lags 0..max_lag.
std::vector<double> sample_autocovariance(std::span<const double> x, int max_lag);

/// Zero-mean sample autocovariance of a sheet on lags [0, max_lag]^2; entry
/// (h1, h2) at index h1 * (max_lag + 1) + h2.
std::vector<double> sheet_autocovariance(const SampledField& sheet, int max_lag);

/// Roughly geometric integer lags in [lo, hi], strictly increasing, at most count.
std::vector<int> log_spaced_lags(int lo, int hi, int count);

/// Least-squares slope of log(values) against log(lags); nonpositive values are skipped.
double loglog_slope(std::span<const int> lags, std::span<const double> values);

}  // namespace lrdecon::lrdnoise
