#include "lrdecon/lrdnoise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "lrdecon/errors.hpp"
#include "lrdecon/exec.hpp"
#include "lrdecon/fft.hpp"
#include "lrdecon/grid.hpp"

namespace lrdecon::lrdnoise {
namespace {

using cplx = std::complex<double>;

void check_alpha(double alpha, const char* name) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ParameterError(std::string(name) + " must lie in (0, 1], got " + std::to_string(alpha));
}

void check_d(double d) {
  if (!(d >= 0.0 && d < 0.5)) throw ParameterError("fractional order d must lie in [0, 0.5), got " + std::to_string(d));
}

void check_hurst(double hurst) {
  if (!(hurst >= 0.5 && hurst < 1.0)) throw ParameterError("Hurst index must lie in [0.5, 1), got " + std::to_string(hurst));
}

void check_length(int n) {
  if (n < 2) throw ParameterError("path length must be >= 2, got " + std::to_string(n));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int next_power_of_two(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> moving_average_farima(double d, int n, std::mt19937_64& rng) {
  const int taps = 4 * n;
  std::vector<double> w(taps);
  w[0] = 1.0;
  for (int k = 1; k < taps; ++k) w[k] = w[k - 1] * (k - 1 + d) / k;
  const int innovations = n + taps - 1;
  const int size = next_power_of_two(innovations + taps);
  std::normal_distribution<double> normal;
  std::vector<cplx> e(size), h(size);
  for (int t = 0; t < innovations; ++t) e[t] = normal(rng);
  for (int k = 0; k < taps; ++k) h[k] = w[k];
  fft::forward_inplace(e);
  fft::forward_inplace(h);
  for (int i = 0; i < size; ++i) e[i] *= h[i];
  fft::backward_inplace(e);
  // Full linear convolution; output t uses innovations t .. t + taps - 1.
  std::vector<double> x(n);
  for (int t = 0; t < n; ++t) x[t] = e[t + taps - 1].real() / size;
  return x;
}

void normalize_unit_variance(SampledField& field) {
  auto v = field.values();
  const double count = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= count;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= count;
  if (!(var > 0.0)) throw NumericalError("noise sheet has zero empirical variance");
  const double scale = 1.0 / std::sqrt(var);
  for (double& x : v) x *= scale;
}

SampledField exact_product_field(double h1, double h2, int n, std::uint64_t seed) {
  const auto lam1 = circulant_eigenvalues(fgn_autocovariance(h1, n));
  const auto lam2 = circulant_eigenvalues(fgn_autocovariance(h2, n));
  const int m = 2 * n;
  const double norm = 1.0 / static_cast<double>(m);
  std::mt19937_64 rng = make_stream(seed, 3);
  std::normal_distribution<double> normal;
  std::vector<cplx> z(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double re = normal(rng);
      const double im = normal(rng);
      z[static_cast<std::size_t>(a) * m + b] = std::sqrt(lam1[a] * lam2[b]) * norm * cplx(re, im);
    }
  std::vector<cplx> tmp(z.size());
  grid::fft_rows(z, m, m, -1, Exec::kSerial);
  grid::transpose(z, tmp, m, m, Exec::kSerial);
  grid::fft_rows(tmp, m, m, -1, Exec::kSerial);
  SampledField f(n);
  // tmp is [b][a]; field index (i, l) <- (a = i, b = l).
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) f(i, l) = tmp[static_cast<std::size_t>(l) * m + i].real();
  return f;
}

}  // namespace

double d_from_alpha(double alpha) {
  check_alpha(alpha, "alpha");
  return 0.5 * (1.0 - alpha);
}

double hurst_from_alpha(double alpha) {
  check_alpha(alpha, "alpha");
  return 1.0 - 0.5 * alpha;
}

void LongMemoryParams::validate() const {
  check_alpha(alpha1, "alpha1");
  check_alpha(alpha2, "alpha2");
}

std::string to_string(NoiseConstruction c) {
  return c == NoiseConstruction::kFarimaProduct ? "farima-product" : "exact-fgn-product";
}

NoiseConstruction parse_construction(const std::string& name) {
  if (name == "farima-product") return NoiseConstruction::kFarimaProduct;
  if (name == "exact-fgn-product") return NoiseConstruction::kExactFgnProduct;
  throw ParameterError("unknown noise construction '" + name + "' (expected farima-product or exact-fgn-product)");
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x6c72u};
  return std::mt19937_64(seq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (index * 0xd1b54a32d192ed03ULL));
}

std::vector<double> farima_autocovariance(double d, int max_lag) {
  check_d(d);
  if (max_lag < 0) throw ParameterError("max_lag must be >= 0");
  std::vector<double> g(max_lag + 1);
  g[0] = std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
  for (int h = 1; h <= max_lag; ++h) g[h] = g[h - 1] * (h - 1 + d) / (h - d);
  return g;
}

std::vector<double> fgn_autocovariance(double hurst, int max_lag) {
  check_hurst(hurst);
  if (max_lag < 0) throw ParameterError("max_lag must be >= 0");
  std::vector<double> g(max_lag + 1);
  const double e = 2.0 * hurst;
  for (int h = 0; h <= max_lag; ++h) {
    const double x = h;
    g[h] = 0.5 * (std::pow(x + 1.0, e) - 2.0 * std::pow(x, e) + std::pow(std::abs(x - 1.0), e));
  }
  return g;
}

std::vector<double> circulant_eigenvalues(std::span<const double> acvf) {
  const int n = static_cast<int>(acvf.size()) - 1;
  check_length(n);
  const int m = 2 * n;
  std::vector<cplx> c(m);
  for (int k = 0; k <= n; ++k) c[k] = acvf[k];
  for (int k = 1; k < n; ++k) c[m - k] = acvf[k];
  fft::forward_inplace(c);
  std::vector<double> lam(m);
  double largest = 0.0;
  for (int k = 0; k < m; ++k) largest = std::max(largest, std::abs(c[k].real()));
  for (int k = 0; k < m; ++k) {
    double v = c[k].real();
    if (v < 0.0) {
      if (v < -1e-10 * largest)
        throw NumericalError("circulant embedding is not nonnegative definite (eigenvalue " + std::to_string(v) + ")");
      v = 0.0;
    }
    lam[k] = v;
  }
  return lam;
}

std::vector<double> circulant_gaussian(std::span<const double> acvf, std::mt19937_64& rng) {
  const auto lam = circulant_eigenvalues(acvf);
  const int n = static_cast<int>(acvf.size()) - 1;
  const int m = 2 * n;
  std::normal_distribution<double> normal;
  std::vector<cplx> z(m);
  for (int k = 0; k < m; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    z[k] = std::sqrt(lam[k] / m) * cplx(re, im);
  }
  fft::forward_inplace(z);
  std::vector<double> x(n);
  for (int t = 0; t < n; ++t) x[t] = z[t].real();
  return x;
}

std::vector<double> farima_path(double d, int n, std::uint64_t seed, FarimaMethod method) {
  check_d(d);
  check_length(n);
  std::mt19937_64 rng = make_stream(seed, 0);
  if (d == 0.0) {
    std::normal_distribution<double> normal;
    std::vector<double> x(n);
    for (double& v : x) v = normal(rng);
    return x;
  }
  if (method == FarimaMethod::kMovingAverage) return moving_average_farima(d, n, rng);
  return circulant_gaussian(farima_autocovariance(d, n), rng);
}

std::vector<double> exact_fgn_path(double hurst, int n, std::uint64_t seed) {
  check_hurst(hurst);
  check_length(n);
  std::mt19937_64 rng = make_stream(seed, 0);
  return circulant_gaussian(fgn_autocovariance(hurst, n), rng);
}

std::string to_string(FarimaMethod m) { return m == FarimaMethod::kCirculant ? "circulant" : "moving-average"; }

FarimaMethod parse_farima_method(const std::string& name) {
  if (name == "circulant") return FarimaMethod::kCirculant;
  if (name == "moving-average") return FarimaMethod::kMovingAverage;
  throw ParameterError("unknown fARIMA method '" + name + "' (expected circulant or moving-average)");
}

NoiseSheet noise_sheet(const LongMemoryParams& params, int n, std::uint64_t seed, NoiseConstruction construction,
                       FarimaMethod method) {
  params.validate();
  if (!fft::is_power_of_two(n)) throw ParameterError("noise sheet size must be a power of two, got " + std::to_string(n));
  NoiseSheet sheet{SampledField(n), params, construction};
  if (construction == NoiseConstruction::kFarimaProduct) {
    const auto u = farima_path(params.d1(), n, derive_seed(seed, 1), method);
    const auto v = farima_path(params.d2(), n, derive_seed(seed, 2), method);
    sheet.values = SampledField::outer(u, v);
  } else {
    sheet.values = exact_product_field(params.hurst1(), params.hurst2(), n, seed);
  }
  normalize_unit_variance(sheet.values);
  return sheet;
}

double partial_sum_diagnostic(const NoiseSheet& sheet) {
  const int n = sheet.values.size();
  if (n == 0) return 0.0;
  double s = 0.0;
  for (double v : sheet.values.values()) s += v;
  const double exponent = 2.0 - 0.5 * sheet.params.alpha1 - 0.5 * sheet.params.alpha2;
  return s / std::pow(static_cast<double>(n), exponent);
}

std::vector<double> sample_autocovariance(std::span<const double> x, int max_lag) {
  const int n = static_cast<int>(x.size());
  if (max_lag < 0 || max_lag >= n) throw ParameterError("max_lag must lie in [0, N)");
  const int size = next_power_of_two(2 * n);
  std::vector<cplx> z(size);
  for (int t = 0; t < n; ++t) z[t] = x[t];
  fft::forward_inplace(z);
  for (auto& c : z) c = std::norm(c);
  fft::backward_inplace(z);
  std::vector<double> g(max_lag + 1);
  for (int h = 0; h <= max_lag; ++h) g[h] = z[h].real() / size / (n - h);
  return g;
}

std::vector<double> sheet_autocovariance(const SampledField& sheet, int max_lag) {
  const int n = sheet.size();
  if (max_lag < 0 || max_lag >= n) throw ParameterError("max_lag must lie in [0, N)");
  const int m = 2 * n;
  std::vector<cplx> z(static_cast<std::size_t>(m) * m), tmp(z.size());
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) z[static_cast<std::size_t>(i) * m + l] = sheet(i, l);
  grid::fft_rows(z, m, m, -1, Exec::kSerial);
  grid::transpose(z, tmp, m, m, Exec::kSerial);
  grid::fft_rows(tmp, m, m, -1, Exec::kSerial);
  for (auto& c : tmp) c = std::norm(c);
  grid::fft_rows(tmp, m, m, +1, Exec::kSerial);
  grid::transpose(tmp, z, m, m, Exec::kSerial);
  grid::fft_rows(z, m, m, +1, Exec::kSerial);
  const int w = max_lag + 1;
  std::vector<double> g(static_cast<std::size_t>(w) * w);
  const double scale = 1.0 / (static_cast<double>(m) * m);
  for (int h1 = 0; h1 <= max_lag; ++h1)
    for (int h2 = 0; h2 <= max_lag; ++h2)
      g[static_cast<std::size_t>(h1) * w + h2] =
          z[static_cast<std::size_t>(h1) * m + h2].real() * scale / (static_cast<double>(n - h1) * (n - h2));
  return g;
}

std::vector<int> log_spaced_lags(int lo, int hi, int count) {
  if (lo < 1 || hi < lo || count < 1) throw ParameterError("log_spaced_lags: need 1 <= lo <= hi and count >= 1");
  std::vector<int> lags;
  const double ratio = count > 1 ? std::log(static_cast<double>(hi) / lo) / (count - 1) : 0.0;
  for (int i = 0; i < count; ++i) {
    const int h = static_cast<int>(std::lround(lo * std::exp(ratio * i)));
    if (lags.empty() || h > lags.back()) lags.push_back(std::min(h, hi));
  }
  return lags;
}

double loglog_slope(std::span<const int> lags, std::span<const double> values) {
  if (lags.size() != values.size()) throw ParameterError("loglog_slope: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (!(values[i] > 0.0) || lags[i] <= 0) continue;
    const double x = std::log(static_cast<double>(lags[i]));
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw NumericalError("loglog_slope: fewer than two positive points");
  const double denom = count * sxx - sx * sx;
  return (count * sxy - sx * sy) / denom;
}

}  // namespace lrdecon::lrdnoise
