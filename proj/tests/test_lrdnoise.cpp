#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrdecon/errors.hpp"
#include "lrdecon/lrdnoise.hpp"
#include "test_util.hpp"

namespace {

using namespace lrdecon;
using namespace lrdecon::lrdnoise;

// Closed-form fARIMA(0,d,0) autocovariance with unit innovations.
double oracle_farima_acvf(double d, int h) {
  return std::exp(std::lgamma(1 - 2 * d) + std::lgamma(h + d) - std::lgamma(d) - std::lgamma(1 - d) -
                  std::lgamma(h + 1 - d));
}

double oracle_fgn_acf(double H, int h) {
  auto p = [&](double x) { return std::pow(std::abs(x), 2 * H); };
  return 0.5 * (p(h + 1) - 2 * p(h) + p(h - 1));
}

std::vector<double> mean_acf(double d, int n, int seeds, int max_lag, FarimaMethod method = FarimaMethod::kCirculant) {
  std::vector<double> acc(max_lag + 1, 0.0);
  for (int s = 0; s < seeds; ++s) {
    const auto x = farima_path(d, n, 1000 + s, method);
    const auto a = sample_autocovariance(x, max_lag);
    for (int h = 0; h <= max_lag; ++h) acc[h] += a[h] / seeds;
  }
  return acc;
}

double slope_of(const std::vector<double>& acvf, int lo, int hi) {
  const auto lags = log_spaced_lags(lo, hi, 20);
  std::vector<double> v;
  for (int h : lags) v.push_back(acvf[h]);
  return loglog_slope(lags, v);
}

TEST(LongMemoryParams, DerivedQuantities) {
  EXPECT_DOUBLE_EQ(d_from_alpha(0.8), 0.1);
  EXPECT_DOUBLE_EQ(d_from_alpha(1.0), 0.0);
  EXPECT_DOUBLE_EQ(hurst_from_alpha(0.6), 0.7);
  LongMemoryParams p{0.8, 0.6, 0};
  EXPECT_NO_THROW(p.validate());
  EXPECT_DOUBLE_EQ(p.d2(), 0.2);
  EXPECT_DOUBLE_EQ(p.mean_alpha(), 0.7);
  for (double a : {0.0, -0.1, 1.1, std::nan("")}) {
    LongMemoryParams bad{a, 0.5, 0};
    EXPECT_THROW(bad.validate(), ParameterError) << a;
  }
  for (double a = 0.05; a <= 1.0; a += 0.05) {
    EXPECT_GE(hurst_from_alpha(a), 0.5);
    EXPECT_LT(hurst_from_alpha(a), 1.0);
    EXPECT_GE(d_from_alpha(a), 0.0);
    EXPECT_LT(d_from_alpha(a), 0.5);
  }
}

TEST(FarimaAutocovariance, MatchesGammaClosedForm) {
  for (double d : {0.05, 0.1, 0.25, 0.4, 0.45}) {
    const auto g = farima_autocovariance(d, 500);
    for (int h : {0, 1, 2, 7, 50, 499}) EXPECT_NEAR(g[h] / oracle_farima_acvf(d, h), 1.0, 1e-10) << d << " " << h;
  }
  const auto w = farima_autocovariance(0.0, 5);
  EXPECT_DOUBLE_EQ(w[0], 1.0);
  EXPECT_DOUBLE_EQ(w[3], 0.0);
}

TEST(FgnAutocovariance, ClosedForm) {
  const auto r = fgn_autocovariance(0.7, 10);
  EXPECT_DOUBLE_EQ(r[0], 1.0);
  EXPECT_NEAR(r[1], 0.5 * (std::pow(2.0, 1.4) - 2), 1e-14);
  for (int h = 1; h <= 10; ++h) EXPECT_NEAR(r[h], oracle_fgn_acf(0.7, h), 1e-14);
  const auto w = fgn_autocovariance(0.5, 4);
  EXPECT_NEAR(w[1], 0.0, 1e-15);
}

TEST(CirculantEmbedding, EigenvaluesNonnegativeAndInvalidRejected) {
  for (double d : {0.1, 0.3, 0.45}) {
    const auto ev = circulant_eigenvalues(farima_autocovariance(d, 256));
    EXPECT_EQ(ev.size(), 512u);
    for (double v : ev) EXPECT_GE(v, 0.0);
  }
  std::vector<double> bad(9, 0.0);
  bad[0] = 1.0;
  bad[1] = 2.0;
  EXPECT_THROW(circulant_eigenvalues(bad), NumericalError);
}

TEST(FarimaPath, WhiteNoiseCase) {
  const int n = 4096;
  const auto x = farima_path(0.0, n, 3);
  const auto a = sample_autocovariance(x, 1);
  EXPECT_LT(std::abs(a[1] / a[0]), 3.0 / std::sqrt(n));
}

TEST(FarimaPath, RejectsInvalidOrder) {
  EXPECT_THROW(farima_path(0.5, 64, 1), ParameterError);
  EXPECT_THROW(farima_path(-0.1, 64, 1), ParameterError);
  EXPECT_THROW(exact_fgn_path(1.0, 64, 1), ParameterError);
  EXPECT_THROW(exact_fgn_path(0.4, 64, 1), ParameterError);
}

TEST(FarimaPath, KolmogorovSmirnovNormalityForWhiteNoise) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto x = farima_path(0.0, 10000, seed);
    std::sort(x.begin(), x.end());
    double dmax = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double cdf = 0.5 * std::erfc(-x[i] / std::sqrt(2.0));
      dmax = std::max({dmax, std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)});
    }
    EXPECT_LT(dmax, 1.628 / std::sqrt(n)) << seed;  // critical value at level 0.01
  }
}

TEST(FarimaPath, SampleAcfMatchesExactRecursion) {
  const double d = 0.3;
  const auto acf = mean_acf(d, 4096, 40, 20);
  const auto exact = farima_autocovariance(d, 20);
  for (int h : {0, 1, 2, 5, 10, 20}) EXPECT_NEAR(acf[h] / exact[0], exact[h] / exact[0], 0.05) << h;
}

TEST(FarimaPath, MovingAverageMatchesExactRecursion) {
  const double d = 0.3;
  const auto acf = mean_acf(d, 4096, 40, 20, FarimaMethod::kMovingAverage);
  const auto exact = farima_autocovariance(d, 20);
  for (int h : {0, 1, 2, 5, 10, 20}) EXPECT_NEAR(acf[h] / exact[0], exact[h] / exact[0], 0.05) << h;
}

TEST(FarimaPath, AcfDecaySlopeForStrongMemory) {
  const int n = 1 << 14;
  const auto acf = mean_acf(0.4, n, 50, n / 10);
  EXPECT_NEAR(slope_of(acf, 1, n / 10), -0.2, 0.1);
}

TEST(FarimaPath, AcfSlopeMonotoneInOrder) {
  const int n = 1 << 14;
  double previous = -1e9;
  for (double d : {0.1, 0.2, 0.3, 0.4}) {
    const double s = slope_of(mean_acf(d, n, 50, 1000), 1, 1000);
    EXPECT_GT(s, previous) << d;
    previous = s;
  }
}

TEST(FarimaPath, Deterministic) {
  EXPECT_EQ(farima_path(0.3, 512, 42), farima_path(0.3, 512, 42));
  EXPECT_NE(farima_path(0.3, 512, 42), farima_path(0.3, 512, 43));
  const auto a = noise_sheet({0.8, 0.6, 0}, 64, 9);
  const auto b = noise_sheet({0.8, 0.6, 0}, 64, 9);
  EXPECT_TRUE(std::equal(a.values.values().begin(), a.values.values().end(), b.values.values().begin()));
}

TEST(ExactFgn, WhiteAndPersistentCases) {
  const int n = 4096;
  double r1_white = 0, r1 = 0, var = 0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const auto w = sample_autocovariance(exact_fgn_path(0.5, n, 10 + s), 1);
    r1_white += w[1] / w[0] / seeds;
    const auto x = exact_fgn_path(0.7, n, 50 + s);
    const auto a = sample_autocovariance(x, 1);
    r1 += a[1] / seeds;
    var += a[0] / seeds;
  }
  EXPECT_LT(std::abs(r1_white), 3.0 / std::sqrt(n * seeds));
  EXPECT_NEAR(r1, 0.5 * (std::pow(2.0, 1.4) - 2), 0.03);
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(NoiseSheet, UnitVarianceAndZeroMean) {
  const int n = 256;
  const int seeds = 50;
  double mean_of_means = 0;
  for (auto c : {NoiseConstruction::kFarimaProduct, NoiseConstruction::kExactFgnProduct}) {
    mean_of_means = 0;
    for (int s = 0; s < seeds; ++s) {
      const auto sheet = noise_sheet({0.8, 0.6, 0}, n, 200 + s, c);
      const auto v = sheet.values.values();
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
      EXPECT_NEAR(testutil::mean_square(v) - mean * mean, 1.0, 1e-12);
      mean_of_means += mean / seeds;
    }
    EXPECT_LT(std::abs(mean_of_means), 4.0 / n) << to_string(c);
  }
}

TEST(NoiseSheet, WhiteProductSheetLagCorrelations) {
  const int n = 1024;
  const auto exact = noise_sheet({1.0, 1.0, 0}, n, 5, NoiseConstruction::kExactFgnProduct);
  auto c = sheet_autocovariance(exact.values, 1);
  EXPECT_LT(std::abs(c[1 * 2 + 0] / c[0]), 3.0 / n);
  EXPECT_LT(std::abs(c[0 * 2 + 1] / c[0]), 3.0 / n);
  // The product sheet inherits the per-direction sampling error of a length-N path.
  const auto prod = noise_sheet({1.0, 1.0, 0}, n, 5);
  c = sheet_autocovariance(prod.values, 1);
  EXPECT_LT(std::abs(c[1 * 2 + 0] / c[0]), 3.0 / std::sqrt(n));
  EXPECT_LT(std::abs(c[0 * 2 + 1] / c[0]), 3.0 / std::sqrt(n));
}

TEST(NoiseSheet, SeparableCovariance) {
  const int n = 256;
  const int seeds = 50;
  const int lag = 6;
  const double d1 = d_from_alpha(0.8), d2 = d_from_alpha(0.6);
  const auto g1 = farima_autocovariance(d1, lag);
  const auto g2 = farima_autocovariance(d2, lag);
  for (auto c : {NoiseConstruction::kFarimaProduct, NoiseConstruction::kExactFgnProduct}) {
    std::vector<double> acc((lag + 1) * (lag + 1), 0.0);
    for (int s = 0; s < seeds; ++s) {
      const auto cov = sheet_autocovariance(noise_sheet({0.8, 0.6, 0}, n, 300 + s, c).values, lag);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += cov[i] / seeds;
    }
    double sample_resid = 0, oracle_resid = 0;
    for (int h1 = 0; h1 <= lag; ++h1)
      for (int h2 = 0; h2 <= lag; ++h2) {
        const double v = acc[h1 * (lag + 1) + h2] / acc[0];
        const double product = acc[h1 * (lag + 1)] / acc[0] * acc[h2] / acc[0];
        sample_resid = std::max(sample_resid, std::abs(v - product));
        const double oracle = c == NoiseConstruction::kFarimaProduct
                                  ? g1[h1] / g1[0] * g2[h2] / g2[0]
                                  : oracle_fgn_acf(hurst_from_alpha(0.8), h1) * oracle_fgn_acf(hurst_from_alpha(0.6), h2);
        oracle_resid = std::max(oracle_resid, std::abs(v - oracle));
      }
    EXPECT_LT(sample_resid, 0.05) << to_string(c);
    EXPECT_LT(oracle_resid, 0.05) << to_string(c);
  }
}

TEST(NoiseSheet, DirectionalSlopes) {
  const int n = 1024;
  const int seeds = 50;
  const int max_lag = 100;
  std::vector<double> along_t(max_lag + 1, 0.0), along_x(max_lag + 1, 0.0);
  for (int s = 0; s < seeds; ++s) {
    const auto sheet = noise_sheet({0.8, 0.6, 0}, n, 700 + s);
    const auto& f = sheet.values;
    // a single row and a single column carry the directional structure of a product sheet
    std::vector<double> col = f.column(n / 3);
    std::vector<double> row(f.values().begin() + (n / 5) * n, f.values().begin() + (n / 5 + 1) * n);
    const auto ct = sample_autocovariance(col, max_lag);
    const auto cx = sample_autocovariance(row, max_lag);
    for (int h = 0; h <= max_lag; ++h) {
      along_t[h] += ct[h] / ct[0] / seeds;
      along_x[h] += cx[h] / cx[0] / seeds;
    }
  }
  EXPECT_NEAR(slope_of(along_t, 1, max_lag), -0.8, 0.15);
  EXPECT_NEAR(slope_of(along_x, 1, max_lag), -0.6, 0.15);
}

TEST(PartialSum, WhiteSheetHasUnitVariance) {
  const int seeds = 200;
  std::vector<double> x2;
  for (int s = 0; s < seeds; ++s) {
    const double x = partial_sum_diagnostic(noise_sheet({1.0, 1.0, 0}, 256, 900 + s));
    x2.push_back(x * x);
  }
  const double mean = std::accumulate(x2.begin(), x2.end(), 0.0) / seeds;
  double var = 0;
  for (double v : x2) var += (v - mean) * (v - mean) / (seeds - 1);
  EXPECT_NEAR(mean, 1.0, 3.0 * std::sqrt(var / seeds));
}

TEST(PartialSum, VarianceStabilizesInN) {
  const int seeds = 400;
  std::vector<double> vars;
  for (int n : {256, 512, 1024}) {
    double acc = 0;
    for (int s = 0; s < seeds; ++s) {
      const double x = partial_sum_diagnostic(noise_sheet({0.8, 0.6, 0}, n, 5000 + s));
      acc += x * x / seeds;
    }
    vars.push_back(acc);
  }
  EXPECT_NEAR(vars[1] / vars[0], 1.0, 0.3);
  EXPECT_NEAR(vars[2] / vars[1], 1.0, 0.3);
}

TEST(PartialSum, ZeroSheet) {
  NoiseSheet z{SampledField(64), {0.8, 0.6, 0}, NoiseConstruction::kFarimaProduct};
  EXPECT_EQ(partial_sum_diagnostic(z), 0.0);
}

TEST(Diagnostics, LogSpacedLagsAndSlope) {
  const auto lags = log_spaced_lags(1, 1000, 15);
  EXPECT_EQ(lags.front(), 1);
  EXPECT_EQ(lags.back(), 1000);
  EXPECT_TRUE(std::is_sorted(lags.begin(), lags.end()));
  EXPECT_TRUE(std::adjacent_find(lags.begin(), lags.end()) == lags.end());
  std::vector<double> v;
  for (int h : lags) v.push_back(3.0 * std::pow(h, -0.7));
  EXPECT_NEAR(loglog_slope(lags, v), -0.7, 1e-12);
}

}  // namespace
