#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "lrdecon/errors.hpp"
#include "lrdecon/fft.hpp"
#include "lrdecon/model.hpp"
#include "test_util.hpp"

namespace {

using namespace lrdecon;
using namespace lrdecon::model;
constexpr double kPi = std::numbers::pi;

double norm_of(const std::vector<double>& v) {
  return std::sqrt(testutil::mean_square(v));
}

// Direct O(N^2) per-column circular convolution with the Riemann factor.
SampledField direct_convolution(const SampledField& f, const SampledField& g) {
  const int n = f.size();
  SampledField q(n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += f(j, l) * g(((i - j) % n + n) % n, l);
      q(i, l) = s / n;
    }
  return q;
}

TEST(Signals, UnitNormAndProfile) {
  for (auto s : {TestSignal::kLidar, TestSignal::kDoppler})
    for (int n : {256, 1024}) EXPECT_NEAR(norm_of(make_test_signal(s, n)), 1.0, 1e-12);
  EXPECT_NEAR(norm_of(make_x_profile(1024)), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(x_profile_value(0.5), 1.0);
  const auto raw = make_x_profile(1024, false);
  EXPECT_DOUBLE_EQ(raw[511], 1.0);  // x = 512 / 1024
  EXPECT_NEAR(make_truth(TestSignal::kLidar, 256).l2_norm(), 1.0, 1e-12);
  EXPECT_EQ(make_test_signal("Doppler", 64), make_test_signal(TestSignal::kDoppler, 64));
  EXPECT_THROW(make_test_signal("blocks", 64), ParameterError);
  EXPECT_THROW(make_test_signal(TestSignal::kLidar, 100), ParameterError);
}

TEST(Signals, LidarShape) {
  EXPECT_DOUBLE_EQ(test_signal_value(TestSignal::kLidar, 0.1), 0.0);
  EXPECT_DOUBLE_EQ(test_signal_value(TestSignal::kLidar, 0.2), 1.0);
  EXPECT_DOUBLE_EQ(test_signal_value(TestSignal::kLidar, 0.3), 2.0);
  EXPECT_NEAR(test_signal_value(TestSignal::kLidar, 0.814), 133.33 * 0.814 - 106.66, 1e-12);
  EXPECT_NEAR(test_signal_value(TestSignal::kLidar, 0.92), -133.33 * 0.92 + 123.9969, 1e-12);
  EXPECT_NEAR(test_signal_value(TestSignal::kDoppler, 0.5), 0.5 * std::sin(2 * kPi * 1.05 / 0.55), 1e-15);
}

TEST(Kernel, PointValuesAndMean) {
  EXPECT_DOUBLE_EQ(kernel_value(0.0, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(kernel_value(-0.3, 0.5), kernel_value(0.3, 0.5));
  EXPECT_NEAR(kernel_value(1.0, 0.0), 0.5 * std::exp(-1.25), 1e-15);
  for (auto p : {KernelPeriodization::kWrapped, KernelPeriodization::kCircular, KernelPeriodization::kOneSided,
                 KernelPeriodization::kGridStep}) {
    const auto g = make_kernel(64, {p, 0.5});
    double mean = 0;
    for (double v : g.samples().values()) mean += v / (64.0 * 64.0);
    EXPECT_NEAR(g.fourier(0, 0).real(), mean, 1e-12) << to_string(p);
    EXPECT_GT(g.fourier(0, 0).real(), 0.0);
  }
}

TEST(Kernel, PeriodizationSamples) {
  const int n = 64;
  const double x = 0.25;  // column 15
  const double a = 1.0 + 0.0625;
  const auto wrapped = make_kernel(n, {KernelPeriodization::kWrapped, 0.5});
  const auto circular = make_kernel(n, {KernelPeriodization::kCircular, 0.5});
  const auto one_sided = make_kernel(n, {KernelPeriodization::kOneSided, 0.5});
  const auto grid_step = make_kernel(n, {KernelPeriodization::kGridStep, 0.5});
  for (int c : {0, 1, 10, 32, 50, 63}) {
    const double t = static_cast<double>(c) / n;
    double sum = 0;
    for (int k = -60; k <= 60; ++k) sum += 0.5 * std::exp(-a * std::abs(t + k));
    EXPECT_NEAR(wrapped.samples()(c, 15), sum, 1e-13);
    EXPECT_NEAR(circular.samples()(c, 15), 0.5 * std::exp(-a * std::min(t, 1 - t)), 1e-15);
    EXPECT_NEAR(one_sided.samples()(c, 15), 0.5 * std::exp(-a * t), 1e-15);
    EXPECT_NEAR(grid_step.samples()(c, 15), n * 0.5 * std::exp(-a * std::min(c, n - c)), 1e-12);
  }
  EXPECT_EQ(parse_periodization("grid-step"), KernelPeriodization::kGridStep);
  EXPECT_EQ(parse_periodization("Wrapped"), KernelPeriodization::kWrapped);
  EXPECT_THROW(parse_periodization("mirror"), ParameterError);
}

TEST(Kernel, WrappedFourierCoefficients) {
  const int n = 1024;
  const auto g = make_kernel(n);
  for (int l : {0, 300, 511, 1023}) {
    const double x = (l + 1.0) / n;
    const double a = 1.0 + (x - 0.5) * (x - 0.5);
    for (int m : {0, 1, 3, 10}) {
      const double exact = a / (a * a + 4 * kPi * kPi * m * m);
      EXPECT_NEAR(g.column_fourier(m, l).real() / exact, 1.0, 1e-3) << m;
      EXPECT_NEAR(g.column_fourier(m, l).imag(), 0.0, 1e-12);
    }
  }
}

TEST(Kernel, MeasuredDecayAndBracket) {
  const auto g = make_kernel(1024);
  const double nu = g.nu_measured(64);
  EXPECT_TRUE(std::isfinite(nu));
  EXPECT_NEAR(nu, 2.0, 0.25);
  const auto b = g.bracket(0.5, 64, 64);
  EXPECT_GT(b.c1, 0.0);
  EXPECT_LE(b.c1, b.c2);
  for (int m1 : {1, 5, 64})
    for (int m2 : {-64, 0, 17}) {
      const double v = std::norm(g.fourier(m1, m2)) * std::pow(m1, 1.0);
      EXPECT_GE(v, b.c1);
      EXPECT_LE(v, b.c2);
    }
}

TEST(Kernel, ModulusPositiveOverBand) {
  for (auto p : {KernelPeriodization::kWrapped, KernelPeriodization::kCircular, KernelPeriodization::kGridStep})
    for (int n : {256, 1024, 4096}) {
      const auto g = make_kernel(n, {p, 0.5});
      EXPECT_GT(g.min_column_modulus(n / 2), 0.0) << to_string(p) << " " << n;
    }
}

TEST(Kernel, RejectsBadInput) {
  EXPECT_THROW(make_kernel(100), ParameterError);
  EXPECT_THROW(make_kernel(64, {KernelPeriodization::kWrapped, 0.0}), ParameterError);
}

TEST(Convolution, MatchesDirectSum) {
  const int n = 64;
  const auto f = testutil::random_field(n, 11);
  for (auto p : {KernelPeriodization::kWrapped, KernelPeriodization::kOneSided, KernelPeriodization::kGridStep}) {
    const auto g = make_kernel(n, {p, 0.5});
    const auto q = convolve_columns(f, g);
    const auto oracle = direct_convolution(f, g.samples());
    EXPECT_LT(testutil::max_abs_diff(q.values(), oracle.values()), 1e-10) << to_string(p);
  }
  const auto r = testutil::random_field(n, 12);
  const BlurKernel arbitrary(r, 0.5, KernelPeriodization::kWrapped);
  EXPECT_LT(testutil::max_abs_diff(convolve_columns(f, arbitrary).values(), direct_convolution(f, r).values()), 1e-10);
}

TEST(Convolution, ConstantAndDeltaKernels) {
  const int n = 64;
  SampledField one(n, std::vector<double>(n * n, 1.0));
  const auto q = convolve_columns(one, BlurKernel(one, 0.5, KernelPeriodization::kWrapped));
  for (double v : q.values()) EXPECT_NEAR(v, 1.0, 1e-12);
  SampledField delta(n);
  for (int l = 0; l < n; ++l) delta(0, l) = n;
  const auto f = testutil::random_field(n, 3);
  const auto same = convolve_columns(f, BlurKernel(delta, 0.5, KernelPeriodization::kWrapped));
  EXPECT_LT(testutil::max_abs_diff(same.values(), f.values()), 1e-10);
}

TEST(Convolution, ConvolutionTheoremPerColumn) {
  const int n = 128;
  const auto f = testutil::random_field(n, 5);
  const auto g = make_kernel(n, {KernelPeriodization::kCircular, 0.5});
  const auto q = convolve_columns(f, g);
  for (int l : {0, 40, 127}) {
    auto spec = [&](const std::vector<double>& col) {
      std::vector<cplx> c(col.begin(), col.end());
      fft::forward_inplace(c);
      for (auto& v : c) v /= n;
      return c;
    };
    const auto qf = spec(q.column(l));
    const auto ff = spec(f.column(l));
    for (int m = 0; m < n; ++m) EXPECT_LT(std::abs(qf[m] - ff[m] * g.column_fourier(m, l)), 1e-10);
  }
}

TEST(Convolution, SerialMatchesParallel) {
  const auto f = testutil::random_field(256, 8);
  const auto g = make_kernel(256);
  const auto a = convolve_columns(f, g, Exec::kSerial);
  const auto b = convolve_columns(f, g, Exec::kParallel);
  EXPECT_EQ(testutil::max_abs_diff(a.values(), b.values()), 0.0);
}

TEST(Convolution, ShapeMismatch) {
  EXPECT_THROW(convolve_columns(SampledField(32), make_kernel(64)), ParameterError);
}

TEST(Calibration, Examples) {
  SampledField unit(16, std::vector<double>(256, 1.0));
  EXPECT_NEAR(calibrate_sigma(unit, 20.0), 0.1, 1e-15);
  EXPECT_NEAR(calibrate_sigma(unit, 0.0), 1.0, 1e-15);
  EXPECT_THROW(calibrate_sigma(SampledField(16), 20.0), DegenerateInputError);
  const auto q = convolve_columns(make_truth(TestSignal::kLidar, 256), make_kernel(256));
  for (double sigma : {1e-3, 0.06, 2.5}) EXPECT_NEAR(calibrate_sigma(q, snr_db(q, sigma)), sigma, 1e-12 * sigma);
}

TEST(Calibration, LidarTwentyDecibels) {
  const int n = 1024;
  const auto q = convolve_columns(make_truth(TestSignal::kLidar, n), make_kernel(n));
  EXPECT_NEAR(calibrate_sigma(q, 20.0), 0.06, 0.2 * 0.06);
}

TEST(Observe, MeanAndVariance) {
  const int n = 256;
  const auto q = convolve_columns(make_truth(TestSignal::kDoppler, n), make_kernel(n));
  const double sigma = 0.3;
  const auto zero = observe(q, 0.0, lrdnoise::noise_sheet({0.8, 0.6, 0}, n, 1));
  EXPECT_EQ(testutil::max_abs_diff(zero.values(), q.values()), 0.0);
  const int seeds = 200;
  std::vector<double> mean(n * n, 0.0);
  double var = 0;
  for (int s = 0; s < seeds; ++s) {
    const auto sheet = lrdnoise::noise_sheet({1.0, 1.0, 0}, n, 40 + s, lrdnoise::NoiseConstruction::kExactFgnProduct);
    const auto y = observe(q, sigma, sheet);
    for (int a = 0; a < n * n; ++a) {
      const double e = y.values()[a] - q.values()[a];
      mean[a] += y.values()[a] / seeds;
      var += e * e / (static_cast<double>(seeds) * n * n);
    }
  }
  // Each cell mean has standard error sigma / sqrt(seeds).
  double worst = 0;
  for (int a = 0; a < n * n; ++a) worst = std::max(worst, std::abs(mean[a] - q.values()[a]));
  EXPECT_LT(worst, 5.5 * sigma / std::sqrt(seeds));
  EXPECT_NEAR(var, sigma * sigma, 1e-3);
  EXPECT_THROW(observe(q, -1.0, SampledField(n)), ParameterError);
  EXPECT_THROW(observe(q, 1.0, SampledField(n / 2)), ParameterError);
}

TEST(FieldCsv, RoundTrip) {
  const auto f = testutil::random_field(8, 2);
  std::stringstream ss;
  write_field_csv(ss, f);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "t,x,value");
  std::string first;
  std::getline(ss, first);
  EXPECT_EQ(first.substr(0, 10), "0.125,0.12");
  ss.seekg(0);
  const auto back = read_field_csv(ss);
  EXPECT_EQ(testutil::max_abs_diff(back.values(), f.values()), 0.0);
  std::stringstream bad("t,x,value\n0.5,0.5,1\n0.5,1,2\n1,0.5,3\n");
  EXPECT_THROW(read_field_csv(bad), ParameterError);
  std::stringstream wrong("a,b\n");
  EXPECT_THROW(read_field_csv(wrong), ParameterError);
}

}  // namespace
