#include "lrdecon/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "lrdecon/errors.hpp"
#include "lrdecon/fft.hpp"
#include "lrdecon/grid.hpp"

namespace lrdecon::model {
namespace {

constexpr double kPi = std::numbers::pi;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

void require_power_of_two(int n, const char* what) {
  if (!fft::is_power_of_two(n))
    throw ParameterError(std::string(what) + ": N must be a power of two, got " + std::to_string(n));
}

void normalize_unit(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  const double norm = std::sqrt(s / static_cast<double>(v.size()));
  if (!(norm > 0.0)) throw DegenerateInputError("cannot normalize an all-zero signal");
  for (double& x : v) x /= norm;
}

double kernel_rate(double x) { return 1.0 + (x - 0.5) * (x - 0.5); }

double periodized_kernel(KernelPeriodization p, int lag, int n, double x) {
  const double a = kernel_rate(x);
  const double t = static_cast<double>(lag) / n;
  switch (p) {
    case KernelPeriodization::kWrapped:
      return 0.5 * std::cosh(a * (t - 0.5)) / std::sinh(0.5 * a);
    case KernelPeriodization::kCircular:
      return kernel_value(std::min(t, 1.0 - t), x);
    case KernelPeriodization::kOneSided:
      return kernel_value(t, x);
    case KernelPeriodization::kGridStep:
      // Scaled by N so that the Riemann factor of the convolution cancels.
      return n * kernel_value(std::min(lag, n - lag), x);
  }
  return 0.0;
}

}  // namespace

std::string to_string(TestSignal s) { return s == TestSignal::kLidar ? "lidar" : "doppler"; }

TestSignal parse_signal(const std::string& name) {
  const auto n = lower(name);
  if (n == "lidar") return TestSignal::kLidar;
  if (n == "doppler") return TestSignal::kDoppler;
  throw ParameterError("unknown test signal '" + name + "' (expected lidar or doppler)");
}

double test_signal_value(TestSignal s, double t) {
  if (s == TestSignal::kDoppler) return std::sqrt(t * (1.0 - t)) * std::sin(2.0 * kPi * 1.05 / (t + 0.05));
  // Two nested plateaus and two narrow triangular returns.
  double v = 0.0;
  if (t > 0.15 && t < 0.65) v += 1.0;
  if (t > 0.28 && t < 0.48) v += 1.0;
  if (t > 0.8 && t < 0.815) v += 133.33 * t - 106.66;
  if (t > 0.815 && t < 0.83) v += -133.33 * t + 110.6639;
  if (t > 0.9 && t < 0.915) v += 133.33 * t - 119.997;
  if (t > 0.915 && t < 0.93) v += -133.33 * t + 123.9969;
  return v;
}

double x_profile_value(double x) { return std::exp(-std::abs(x - 0.5) * x * x * x); }

std::vector<double> make_test_signal(TestSignal s, int n) {
  require_power_of_two(n, "make_test_signal");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = test_signal_value(s, static_cast<double>(i + 1) / n);
  normalize_unit(v);
  return v;
}

std::vector<double> make_test_signal(const std::string& name, int n) { return make_test_signal(parse_signal(name), n); }

std::vector<double> make_x_profile(int n, bool normalize) {
  require_power_of_two(n, "make_x_profile");
  std::vector<double> v(n);
  for (int l = 0; l < n; ++l) v[l] = x_profile_value(static_cast<double>(l + 1) / n);
  if (normalize) normalize_unit(v);
  return v;
}

SampledField make_truth(TestSignal s, int n) { return SampledField::outer(make_test_signal(s, n), make_x_profile(n)); }

double kernel_value(double t, double x) { return 0.5 * std::exp(-std::abs(t) * kernel_rate(x)); }

std::string to_string(KernelPeriodization p) {
  switch (p) {
    case KernelPeriodization::kWrapped:
      return "wrapped";
    case KernelPeriodization::kCircular:
      return "circular";
    case KernelPeriodization::kOneSided:
      return "one-sided";
    case KernelPeriodization::kGridStep:
      return "grid-step";
  }
  return "wrapped";
}

KernelPeriodization parse_periodization(const std::string& name) {
  const auto n = lower(name);
  if (n == "wrapped") return KernelPeriodization::kWrapped;
  if (n == "circular") return KernelPeriodization::kCircular;
  if (n == "one-sided") return KernelPeriodization::kOneSided;
  if (n == "grid-step") return KernelPeriodization::kGridStep;
  throw ParameterError("unknown kernel periodization '" + name +
                       "' (expected wrapped, circular, one-sided or grid-step)");
}

BlurKernel::BlurKernel(SampledField samples, double nu_declared, KernelPeriodization periodization)
    : samples_(std::move(samples)), nu_declared_(nu_declared), periodization_(periodization) {
  const int n = samples_.size();
  const std::size_t total = static_cast<std::size_t>(n) * n;
  std::vector<cplx> work(total);
  column_fourier_.resize(total);
  const auto v = samples_.values();
  // work[l][c] = g(c / N, x_l)
  for (int c = 0; c < n; ++c)
    for (int l = 0; l < n; ++l) work[static_cast<std::size_t>(l) * n + c] = v[static_cast<std::size_t>(c) * n + l];
  grid::fft_rows(work, n, n, -1, Exec::kSerial);
  grid::transpose(work, column_fourier_, n, n, Exec::kSerial);
  const double inv = 1.0 / n;
  for (auto& c : column_fourier_) c *= inv;
  fourier_ = grid::spectrum_2d(samples_, Exec::kSerial);
}

cplx BlurKernel::column_fourier(int m1, int l) const {
  const int n = size();
  return column_fourier_[static_cast<std::size_t>(grid::fft_index(m1, n)) * n + l];
}

cplx BlurKernel::fourier(int m1, int m2) const {
  const int n = size();
  return fourier_[static_cast<std::size_t>(grid::fft_index(m1, n)) * n + grid::fft_index(m2, n)];
}

double BlurKernel::nu_measured(int m_max) const {
  m_max = std::min(m_max, size() / 2 - 1);
  if (m_max < 2) throw ParameterError("nu_measured: need m_max >= 2");
  std::vector<int> m;
  std::vector<double> mod;
  for (int k = 1; k <= m_max; ++k) {
    m.push_back(k);
    mod.push_back(std::abs(fourier(k, 0)));
  }
  return -lrdnoise::loglog_slope(m, mod);
}

BlurKernel::Bracket BlurKernel::bracket(double nu, int m1_max, int m2_max) const {
  const int half = size() / 2;
  m1_max = std::min(m1_max, half - 1);
  m2_max = std::min(m2_max, half - 1);
  Bracket b{std::numeric_limits<double>::infinity(), 0.0};
  for (int m1 = -m1_max; m1 <= m1_max; ++m1) {
    if (m1 == 0) continue;
    const double w = std::pow(std::abs(m1), 2.0 * nu);
    for (int m2 = -m2_max; m2 <= m2_max; ++m2) {
      const double v = std::norm(fourier(m1, m2)) * w;
      b.c1 = std::min(b.c1, v);
      b.c2 = std::max(b.c2, v);
    }
  }
  return b;
}

double BlurKernel::min_column_modulus(int m1_max) const {
  const int n = size();
  m1_max = std::min(m1_max, n / 2);
  double lo = std::numeric_limits<double>::infinity();
  for (int m1 = -m1_max; m1 <= m1_max && m1 < n / 2; ++m1)
    for (int l = 0; l < n; ++l) lo = std::min(lo, std::abs(column_fourier(m1, l)));
  return lo;
}

BlurKernel make_kernel(int n, const KernelOptions& options) {
  require_power_of_two(n, "make_kernel");
  if (!(options.nu_declared > 0.0)) throw ParameterError("declared DIP nu must be > 0");
  SampledField s(n);
  for (int c = 0; c < n; ++c)
    for (int l = 0; l < n; ++l) s(c, l) = periodized_kernel(options.periodization, c, n, static_cast<double>(l + 1) / n);
  return BlurKernel(std::move(s), options.nu_declared, options.periodization);
}

SampledField convolve_columns(const SampledField& f, const BlurKernel& g, Exec exec) {
  if (f.size() != g.size())
    throw ParameterError("convolve_columns: field N=" + std::to_string(f.size()) + " but kernel N=" +
                         std::to_string(g.size()));
  const int n = f.size();
  const std::size_t total = static_cast<std::size_t>(n) * n;
  std::vector<cplx> work(total), cols(total);
  const auto v = f.values();
  for (std::size_t a = 0; a < total; ++a) work[a] = v[a];
  grid::transpose(work, cols, n, n, exec);  // cols[l][i]
  const auto gf = g.column_fourier();
  const bool parallel = exec == Exec::kParallel;
  // Normalized spectra multiply, and the Riemann factor cancels one 1/N.
  const double scale = 1.0 / n;
#pragma omp parallel for schedule(static) if (parallel)
  for (int l = 0; l < n; ++l) {
    auto col = std::span<cplx>(cols).subspan(static_cast<std::size_t>(l) * n, n);
    fft::forward_inplace(col);
    for (int m = 0; m < n; ++m) col[m] *= gf[static_cast<std::size_t>(m) * n + l] * scale;
    fft::backward_inplace(col);
  }
  grid::transpose(cols, work, n, n, exec);
  SampledField q(n);
  auto out = q.values();
  for (std::size_t a = 0; a < total; ++a) out[a] = work[a].real();
  return q;
}

double calibrate_sigma(const SampledField& q, double snr) {
  const double norm = q.l2_norm();
  if (!(norm > 0.0)) throw DegenerateInputError("calibrate_sigma: blurred signal is identically zero");
  if (!std::isfinite(snr)) throw ParameterError("calibrate_sigma: SNR must be finite");
  return norm * std::pow(10.0, -snr / 20.0);
}

double snr_db(const SampledField& q, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("snr_db: sigma must be > 0");
  const double norm = q.l2_norm();
  return 10.0 * std::log10(norm * norm / (sigma * sigma));
}

SampledField observe(const SampledField& q, double sigma, const lrdnoise::NoiseSheet& sheet) {
  return observe(q, sigma, sheet.values);
}

SampledField observe(const SampledField& q, double sigma, const SampledField& noise) {
  require_same_shape(q, noise, "observe");
  if (!(sigma >= 0.0)) throw ParameterError("observe: sigma must be >= 0");
  SampledField y(q.size());
  auto out = y.values();
  const auto a = q.values();
  const auto b = noise.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + sigma * b[i];
  return y;
}

void write_field_csv(std::ostream& os, const SampledField& field) {
  const int n = field.size();
  const auto old_precision = os.precision(17);
  os << "t,x,value\n";
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l)
      os << static_cast<double>(i + 1) / n << ',' << static_cast<double>(l + 1) / n << ',' << field(i, l) << '\n';
  os.precision(old_precision);
}

SampledField read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,x,value", 0) != 0)
    throw ParameterError("field CSV must start with header t,x,value");
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ss(line);
    std::string tok;
    double last = 0.0;
    for (int c = 0; c < 3; ++c) {
      if (!std::getline(ss, tok, ',')) throw ParameterError("malformed field CSV row: " + line);
      try {
        last = std::stod(tok);
      } catch (const std::exception&) {
        throw ParameterError("malformed number in field CSV: " + tok);
      }
    }
    values.push_back(last);
  }
  const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(values.size()))));
  if (static_cast<std::size_t>(n) * n != values.size() || !fft::is_power_of_two(n))
    throw ParameterError("field CSV does not hold N x N values with N a power of two");
  return SampledField(n, std::move(values));
}

}  // namespace lrdecon::model
