#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "lrdecon/errors.hpp"
#include "lrdecon/rates.hpp"

namespace {

using namespace lrdecon;
using namespace lrdecon::rates;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Branch exponents written out directly from the rate theorem.
double oracle_dense(double p, double s2, double a2) { return p * s2 / (2 * s2 + a2); }
double oracle_intermediate(double p, double s1, double nu, double a1) { return p * s1 / (2 * s1 + 2 * nu + a1); }
double oracle_sparse(double p, double pi, double s1, double nu, double a1) {
  const double ip = std::isinf(pi) ? 0.0 : 1.0 / pi;
  const double s1_star = s1 + 0.5 - ip;
  return p * (s1 + 1.0 / p - ip) / (2 * s1_star + 2 * nu + a1 - 1);
}

RateQuery query(std::vector<double> s, std::vector<double> alpha, double pi = 2, double p = 2, double nu = 0.5) {
  RateQuery q;
  q.s = std::move(s);
  q.alpha = std::move(alpha);
  q.pi = pi;
  q.p = p;
  q.nu = nu;
  return q;
}

TEST(Classify2d, WorkedExamples) {
  auto r = classify_2d(query({2, 1}, {1, 1}));
  EXPECT_EQ(r.regime, Regime::kDenseX);
  EXPECT_NEAR(r.exponent, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(r.xi1, 1);  // s1 = (s2 / alpha2)(2 nu + alpha1) exactly
  r = classify_2d(query({1, 2}, {1, 1}));
  EXPECT_EQ(r.regime, Regime::kIntermediate);
  EXPECT_NEAR(r.exponent, 0.5, 1e-15);
  r = classify_2d(query({1, 3}, {1, 1}, 1, 4));
  EXPECT_EQ(r.regime, Regime::kSparse);
  EXPECT_NEAR(r.exponent, 0.5, 1e-15);
  EXPECT_EQ(r.xi2, 0);
  EXPECT_NEAR(r.log_exponent_upper, 0.5, 1e-15);
}

TEST(Classify2d, LogExponentsAndFlags) {
  const auto r = classify_2d(query({4, 1}, {0.8, 0.6}));
  EXPECT_EQ(r.regime, Regime::kDenseX);
  EXPECT_EQ(r.xi1, 0);
  EXPECT_NEAR(r.exponent, oracle_dense(2, 1, 0.6), 1e-15);
  EXPECT_NEAR(r.log_exponent_upper, r.exponent, 1e-15);
  EXPECT_FALSE(r.on_boundary());
  EXPECT_EQ(to_string(r.regime), "dense-x");
  EXPECT_EQ(to_string(Regime::kUncovered), "uncovered");
}

TEST(Classify2d, UncoveredRegion) {
  // s2 / alpha2 = 1 below the side condition (p/2)(1/p' - 1/p) = 4.5
  const auto r = classify_2d(query({20, 1}, {1, 1}, 1, 10));
  EXPECT_EQ(r.regime, Regime::kUncovered);
  EXPECT_FALSE(r.covered());
  EXPECT_TRUE(std::isnan(r.exponent));
  const std::vector<double> eps{0.01, 0.1};
  for (const auto& pt : rate_curve(query({20, 1}, {1, 1}, 1, 10), eps)) EXPECT_TRUE(std::isnan(pt.bound));
}

TEST(Classify2d, Validation) {
  EXPECT_THROW(classify_2d(query({0.4, 1}, {1, 1})), ParameterError);
  EXPECT_THROW(classify_2d(query({1, 1}, {0, 1})), ParameterError);
  EXPECT_THROW(classify_2d(query({1, 1}, {1, 1.2})), ParameterError);
  EXPECT_THROW(classify_2d(query({1, 1}, {1, 1}, 0.5)), ParameterError);
  EXPECT_THROW(classify_2d(query({1, 1}, {1, 1}, 2, kInf)), ParameterError);
  EXPECT_THROW(classify_2d(query({1, 1}, {1, 1}, 2, 2, 0)), ParameterError);
  EXPECT_THROW(classify_2d(query({1, 1, 1}, {1, 1, 1})), ParameterError);
  EXPECT_THROW(classify_rd(query({1}, {1})), ParameterError);
  EXPECT_NO_THROW(classify_2d(query({1, 1}, {1, 1}, kInf)));
}

TEST(Classify, RandomQueriesMatchOracleBranches) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  int counts[4] = {0, 0, 0, 0};
  for (int n = 0; n < 2000; ++n) {
    const double pi = 1 + 5 * u(rng), p = 1 + 5 * u(rng), nu = 0.1 + 2 * u(rng);
    const double a1 = 0.05 + 0.95 * u(rng), a2 = 0.05 + 0.95 * u(rng);
    const double floor = std::max(1 / pi, 0.5);
    const double s1 = floor + 4 * u(rng), s2 = floor + 4 * u(rng);
    const auto r = classify_2d(query({s1, s2}, {a1, a2}, pi, p, nu));
    const double b = 2 * nu + a1;
    const double pp = std::min(p, pi);
    const bool side = s2 / a2 >= 0.5 * p * (1 / pp - 1 / p);
    ++counts[static_cast<int>(r.regime)];
    if (s1 >= s2 / a2 * b && side) {
      EXPECT_EQ(r.regime, Regime::kDenseX);
      EXPECT_NEAR(r.exponent, oracle_dense(p, s2, a2), 1e-12);
    } else if (0.5 * p * b * (1 / pi - 1 / p) < s1 && s1 < s2 / a2 * b) {
      EXPECT_EQ(r.regime, Regime::kIntermediate);
      EXPECT_NEAR(r.exponent, oracle_intermediate(p, s1, nu, a1), 1e-12);
    } else if (s1 <= b * 0.5 * p * (1 / pi - 1 / p) && side) {
      EXPECT_EQ(r.regime, Regime::kSparse);
      EXPECT_NEAR(r.exponent, oracle_sparse(p, pi, s1, nu, a1), 1e-12);
    } else {
      EXPECT_EQ(r.regime, Regime::kUncovered);
    }
    if (r.covered()) {
      EXPECT_GT(r.exponent, 0.0);
      EXPECT_LE(r.exponent, p / 2 + 1e-12);
      const auto lower = classify_lower(query({s1, s2}, {a1, a2}, pi, p, nu));
      EXPECT_NEAR(lower.exponent, r.exponent, 1e-12);
    }
  }
  EXPECT_GT(counts[0], 0);
  EXPECT_GT(counts[1], 0);
  EXPECT_GT(counts[2], 0);
}

TEST(Classify, DenseIntermediateBoundaryContinuity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 0; n < 1000; ++n) {
    const double pi = 1 + 4 * u(rng), p = 1 + 4 * u(rng), nu = 0.1 + u(rng);
    const double a1 = 0.1 + 0.9 * u(rng), a2 = 0.1 + 0.9 * u(rng);
    const double floor = std::max(1 / pi, 0.5);
    const double s2 = std::max(floor, 0.5 * p * (1 / std::min(p, pi) - 1 / p) * a2) + 2 * u(rng);
    const double s1 = s2 / a2 * (2 * nu + a1);
    if (s1 < floor) continue;
    const auto q = query({s1, s2}, {a1, a2}, pi, p, nu);
    const auto on = classify_2d(q);
    EXPECT_EQ(on.regime, Regime::kDenseX);
    EXPECT_GE(on.xi1, 1);
    EXPECT_NEAR(oracle_dense(p, s2, a2), oracle_intermediate(p, s1, nu, a1), 1e-12);
    EXPECT_NEAR(on.exponent, oracle_intermediate(p, s1, nu, a1), 1e-12);
  }
}

TEST(Classify, IntermediateSparseBoundaryContinuity) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0, 1);
  int drawn = 0;
  while (drawn < 1000) {
    const double pi = 1 + 3 * u(rng), nu = 0.1 + 2 * u(rng);
    const double p = pi + 8 * u(rng);
    const double a1 = 0.1 + 0.9 * u(rng), a2 = 0.1 + 0.9 * u(rng);
    const double s1 = (2 * nu + a1) * 0.5 * p * (1 / pi - 1 / p);
    if (s1 < std::max(1 / pi, 0.5)) continue;
    const double s2 = std::max(0.5 * p * (1 / pi - 1 / p) * a2, s1 * a2 / (2 * nu + a1)) + 1 + u(rng);
    ++drawn;
    const auto r = classify_2d(query({s1, s2}, {a1, a2}, pi, p, nu));
    EXPECT_EQ(r.regime, Regime::kSparse);
    EXPECT_GE(r.xi2, 1);
    EXPECT_NEAR(oracle_sparse(p, pi, s1, nu, a1), oracle_intermediate(p, s1, nu, a1), 1e-12);
    EXPECT_NEAR(r.exponent, oracle_intermediate(p, s1, nu, a1), 1e-12);
  }
}

TEST(ClassifyRd, AgreesWith2dForRTwo) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 0; n < 1000; ++n) {
    const double pi = n % 10 == 0 ? kInf : 1 + 4 * u(rng);
    const double p = 1 + 4 * u(rng), nu = 0.1 + u(rng);
    const double floor = std::max(std::isinf(pi) ? 0.0 : 1 / pi, 0.5);
    const auto q = query({floor + 3 * u(rng), floor + 3 * u(rng)}, {0.1 + 0.9 * u(rng), 0.1 + 0.9 * u(rng)}, pi, p, nu);
    const auto a = classify_2d(q), b = classify_rd(q);
    EXPECT_EQ(a.regime, b.regime);
    if (a.covered()) EXPECT_EQ(a.exponent, b.exponent);
    EXPECT_EQ(a.xi1, b.xi1);
    EXPECT_EQ(a.xi2, b.xi2);
    EXPECT_EQ(a.i_o, b.i_o);
  }
}

TEST(ClassifyRd, ThreeDimensionalExamples) {
  auto r = classify_rd(query({2, 1, 2}, {1, 1, 1}));
  EXPECT_EQ(r.regime, Regime::kDenseX);
  EXPECT_NEAR(r.exponent, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(r.i_o, 1);
  EXPECT_EQ(r.xi1, 1);
  r = classify_rd(query({1, 2, 2}, {1, 1, 1}));
  EXPECT_EQ(r.regime, Regime::kIntermediate);
  EXPECT_NEAR(r.exponent, 0.5, 1e-15);
  EXPECT_EQ(r.xi1, 1);  // s2 / alpha2 = s3 / alpha3 counts in the tie sum
  EXPECT_EQ(r.xi2, 0);
  EXPECT_NEAR(r.log_exponent_upper, 0.5, 1e-15);  // only the dense branch carries xi1
  r = classify_rd(query({2, 1, 1}, {1, 1, 1}));
  EXPECT_EQ(r.xi1, 2);
  r = classify_rd(query({4, 2, 0.6}, {1, 1, 0.4}));
  EXPECT_EQ(r.i_o, 2);
  EXPECT_NEAR(r.s_over_alpha, 1.5, 1e-15);
  EXPECT_EQ(r.xi1, 0);
}

TEST(Rates, WhiteNoiseReducesToClassicalExponents) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 0; n < 500; ++n) {
    const double pi = 1 + 4 * u(rng), p = 1 + 4 * u(rng), nu = 0.1 + u(rng);
    const double floor = std::max(1 / pi, 0.5);
    const double s1 = floor + 3 * u(rng), s2 = floor + 3 * u(rng);
    const auto r = classify_2d(query({s1, s2}, {1, 1}, pi, p, nu));
    // eps^2 exponents of isotropic-white-noise deconvolution
    if (r.regime == Regime::kDenseX) EXPECT_NEAR(r.exponent, p * s2 / (2 * s2 + 1), 1e-12);
    if (r.regime == Regime::kIntermediate) EXPECT_NEAR(r.exponent, p * s1 / (2 * s1 + 2 * nu + 1), 1e-12);
    if (r.regime == Regime::kSparse) {
      const double ip = 1 / pi;
      EXPECT_NEAR(r.exponent, p * (s1 + 1 / p - ip) / (2 * (s1 + 0.5 - ip) + 2 * nu), 1e-12);
    }
  }
}

// The rate in eps is (eps^{2 abar})^e, so memory enters through 2 abar e.
TEST(Rates, EpsilonExponentNondecreasingInAlpha) {
  for (auto s : {std::vector<double>{4, 1}, std::vector<double>{1, 3}})
    for (int dir = 0; dir < 2; ++dir) {
      double previous = -1;
      Regime regime = Regime::kUncovered;
      for (double a = 0.1; a <= 1.0 + 1e-12; a += 0.05) {
        std::vector<double> alpha{0.7, 0.7};
        alpha[dir] = std::min(a, 1.0);
        const auto r = classify_2d(query(s, alpha));
        if (r.regime != regime) {
          regime = r.regime;
          previous = -1;
        }
        const double in_eps = (alpha[0] + alpha[1]) * r.exponent;
        EXPECT_GE(in_eps, previous - 1e-15) << a;
        previous = in_eps;
      }
    }
}

TEST(RateCurve, HalvingAndNormalization) {
  auto q = query({2, 0.5}, {0.8, 0.6});
  const double e = classify_2d(q).exponent;
  const double two_abar = 1.4;
  const double eps1 = 0.1;
  const double eps2 = eps1 * std::pow(0.5, 1 / two_abar);  // halves eps^{2 abar}
  const std::vector<double> grid{eps2, eps1};
  const auto c = rate_curve(q, grid, false);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[1].bound, 1.0, 1e-15);
  EXPECT_NEAR(c[0].bound / c[1].bound, std::pow(2.0, -e), 1e-12);
  EXPECT_EQ(c[0].regime, Regime::kDenseX);
  const auto with_log = rate_curve(q, grid, true);
  const double lr = classify_2d(q).log_exponent_upper;
  EXPECT_NEAR(with_log[0].bound, std::pow(2.0, -e) * std::pow(std::log(eps2) / std::log(eps1), lr), 1e-12);
  EXPECT_TRUE(rate_curve(q, std::vector<double>{}).empty());
  EXPECT_THROW(rate_curve(q, std::vector<double>{1.5}), ParameterError);
}

TEST(RateCurve, CsvFormat) {
  const auto c = rate_curve(query({2, 1}, {1, 1}), std::vector<double>{0.01, 0.1});
  std::ostringstream os;
  write_rate_csv(os, c);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "epsilon,bound,regime,exponent");
  int rows = 0;
  while (std::getline(is, line)) {
    EXPECT_NE(line.find("dense-x"), std::string::npos);
    ++rows;
  }
  EXPECT_EQ(rows, 2);
}

}  // namespace
