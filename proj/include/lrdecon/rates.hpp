#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

/// Minimax rate exponents for anisotropic Besov balls under long-memory noise:
/// the 2D partition into dense-x, intermediate and sparse regimes and its
/// r-dimensional extension. Rates are powers of eps^{2 abar} / A^2.
namespace lrdecon::rates {

enum class Regime { kDenseX, kIntermediate, kSparse, kUncovered };

std::string to_string(Regime r);

struct RateQuery {
  std::vector<double> s{1.0, 1.0};      ///< smoothness (s1, ..., sr); s1 is the blurred direction
  std::vector<double> alpha{1.0, 1.0};  ///< long-memory exponents, one per direction
  double pi = 2.0;                      ///< Besov integrability; may be +infinity
  double q = 2.0;                       ///< Besov ladder index (carried, unused by the exponents)
  double p = 2.0;                       ///< risk exponent, 1 <= p < infinity
  double nu = 0.5;                      ///< degree of ill-posedness
  double A = 1.0;

  int dimension() const { return static_cast<int>(s.size()); }
  /// Throws ParameterError when outside the hypotheses of the rate theorems.
  void validate() const;

  double inv_pi() const;
  double p_prime() const;  ///< min(p, pi)
  double s_star(int i) const;         ///< s_i + 1/2 - 1/pi
  double s_prime(int i) const;        ///< s_i + 1/2 - 1/min(2, pi)
  double s_double_prime(int i) const; ///< s_i + 1/p - 1/p'
  double mean_alpha() const;
};

struct RateResult {
  Regime regime = Regime::kUncovered;
  double exponent = 0.0;            ///< power of eps^{2 abar} / A^2
  double log_exponent_lower = 0.0;  ///< power of |ln eps| in the lower bound
  double log_exponent_upper = 0.0;  ///< power of |ln eps| in the upper bound
  int xi1 = 0;
  int xi2 = 0;
  int i_o = 1;             ///< 0-based index realizing min_{i>=2} s_i / alpha_i
  double s_over_alpha = 0; ///< that minimum, s_2o / alpha_2o
  bool on_boundary() const { return xi1 + xi2 > 0; }
  bool covered() const { return regime != Regime::kUncovered; }
};

/// Upper-bound partition (>=, <, <= boundaries) for r = 2.
RateResult classify_2d(const RateQuery& query);
/// Same partition with s_2o / alpha_2o = min_{i>=2} s_i / alpha_i and abar over all r directions.
RateResult classify_rd(const RateQuery& query);
/// Lower-bound partition (strict outer inequalities); exponent only.
RateResult classify_lower(const RateQuery& query);

struct RatePoint {
  double epsilon;
  double bound;  ///< normalized to 1 at the largest epsilon; NaN when uncovered
  Regime regime;
  double exponent;
};

/// C A^p (eps^{2 abar} / A^2)^e |ln eps|^{log exponent}, C fixed by the
/// largest epsilon of the grid. Without log_factor the |ln eps| term is dropped.
std::vector<RatePoint> rate_curve(const RateQuery& query, std::span<const double> epsilons, bool log_factor = true);

/// Header "epsilon,bound,regime,exponent".
void write_rate_csv(std::ostream& os, std::span<const RatePoint> curve);

}  // namespace lrdecon::rates
