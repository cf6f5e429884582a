#include "lrdecon/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "lrdecon/errors.hpp"

namespace lrdecon::rates {
namespace {

constexpr double kTieTolerance = 1e-12;

bool tie(double a, double b) { return std::abs(a - b) <= kTieTolerance * std::max({1.0, std::abs(a), std::abs(b)}); }
bool at_least(double a, double b) { return a > b || tie(a, b); }
bool below(double a, double b) { return a < b && !tie(a, b); }

struct Geometry {
  double s1;
  double ratio;      // s_2o / alpha_2o
  int i_o;
  double sum;        // 2 nu + alpha1
  double dense_cut;  // ratio (2 nu + alpha1)
  double sparse_cut; // (2 nu + alpha1) (p / 2) (1/pi - 1/p)
  double side;       // (p / 2) (1/p' - 1/p)
};

Geometry geometry(const RateQuery& q) {
  Geometry g{};
  g.s1 = q.s[0];
  g.i_o = 1;
  g.ratio = q.s[1] / q.alpha[1];
  for (int i = 2; i < q.dimension(); ++i) {
    const double r = q.s[i] / q.alpha[i];
    if (r < g.ratio && !tie(r, g.ratio)) {
      g.ratio = r;
      g.i_o = i;
    }
  }
  g.sum = 2.0 * q.nu + q.alpha[0];
  g.dense_cut = g.ratio * g.sum;
  g.sparse_cut = g.sum * 0.5 * q.p * (q.inv_pi() - 1.0 / q.p);
  g.side = 0.5 * q.p * (1.0 / q.p_prime() - 1.0 / q.p);
  return g;
}

double dense_exponent(const RateQuery& q, const Geometry& g) {
  const double a = q.alpha[g.i_o];
  const double s = g.ratio * a;
  return q.p * s / (2.0 * s + a);
}

double intermediate_exponent(const RateQuery& q, const Geometry& g) {
  return q.p * g.s1 / (2.0 * g.s1 + g.sum);
}

double sparse_exponent(const RateQuery& q, const Geometry& g) {
  return q.p * (g.s1 + 1.0 / q.p - q.inv_pi()) / (2.0 * q.s_star(0) + g.sum - 1.0);
}

RateResult classify_upper(const RateQuery& q, bool count_all_side_ties) {
  q.validate();
  const Geometry g = geometry(q);
  RateResult r;
  r.i_o = g.i_o;
  r.s_over_alpha = g.ratio;
  r.xi1 = tie(g.s1, g.dense_cut) ? 1 : 0;
  for (int i = 1; i < q.dimension(); ++i)
    if (i != g.i_o && tie(q.s[i] / q.alpha[i], g.ratio)) ++r.xi1;
  r.xi2 = tie(g.s1, g.sparse_cut) ? 1 : 0;
  for (int i = 1; i < q.dimension(); ++i) {
    if (!count_all_side_ties && i != g.i_o) continue;
    if (tie(q.s[i] / q.alpha[i], g.side)) ++r.xi2;
  }
  const bool side_ok = at_least(g.ratio, g.side);
  if (at_least(g.s1, g.dense_cut) && side_ok) {
    r.regime = Regime::kDenseX;
    r.exponent = dense_exponent(q, g);
    r.log_exponent_upper = r.xi1 + r.exponent;
  } else if (below(g.sparse_cut, g.s1) && below(g.s1, g.dense_cut)) {
    r.regime = Regime::kIntermediate;
    r.exponent = intermediate_exponent(q, g);
    r.log_exponent_upper = r.exponent;
  } else if (at_least(g.sparse_cut, g.s1) && side_ok) {
    r.regime = Regime::kSparse;
    r.exponent = sparse_exponent(q, g);
    r.log_exponent_upper = r.xi2 + r.exponent;
  } else {
    r.regime = Regime::kUncovered;
    r.exponent = std::numeric_limits<double>::quiet_NaN();
    r.log_exponent_upper = std::numeric_limits<double>::quiet_NaN();
  }
  r.log_exponent_lower = 0.0;
  return r;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::kDenseX:
      return "dense-x";
    case Regime::kIntermediate:
      return "intermediate";
    case Regime::kSparse:
      return "sparse";
    case Regime::kUncovered:
      return "uncovered";
  }
  return "uncovered";
}

void RateQuery::validate() const {
  if (dimension() < 2) throw ParameterError("rate query needs r >= 2 smoothness indices");
  if (alpha.size() != s.size()) throw ParameterError("rate query: s and alpha must have the same length");
  if (!(pi >= 1.0)) throw ParameterError("rate query: need pi >= 1");
  if (!(q >= 1.0)) throw ParameterError("rate query: need q >= 1");
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("rate query: need 1 <= p < infinity");
  if (!(nu > 0.0)) throw ParameterError("rate query: need nu > 0");
  if (!(A > 0.0)) throw ParameterError("rate query: need A > 0");
  const double floor = std::max(inv_pi(), 0.5);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(alpha[i] > 0.0 && alpha[i] <= 1.0))
      throw ParameterError("rate query: alpha_" + std::to_string(i + 1) + " must lie in (0, 1]");
    if (!(s[i] >= floor) || !std::isfinite(s[i]))
      throw ParameterError("rate query: s_" + std::to_string(i + 1) + " must be >= max(1/pi, 1/2)");
  }
}

double RateQuery::inv_pi() const { return std::isinf(pi) ? 0.0 : 1.0 / pi; }
double RateQuery::p_prime() const { return std::min(p, pi); }
double RateQuery::s_star(int i) const { return s.at(i) + 0.5 - inv_pi(); }
double RateQuery::s_prime(int i) const { return s.at(i) + 0.5 - 1.0 / std::min(2.0, pi); }
double RateQuery::s_double_prime(int i) const { return s.at(i) + 1.0 / p - 1.0 / p_prime(); }

double RateQuery::mean_alpha() const {
  double sum = 0.0;
  for (double a : alpha) sum += a;
  return sum / static_cast<double>(alpha.size());
}

RateResult classify_2d(const RateQuery& query) {
  if (query.dimension() != 2) throw ParameterError("classify_2d needs r = 2");
  return classify_upper(query, true);
}

RateResult classify_rd(const RateQuery& query) {
  // The side-condition ties are counted over every i >= 2, including i_o, so
  // that r = 2 reproduces the 2D indicator.
  return classify_upper(query, true);
}

RateResult classify_lower(const RateQuery& q) {
  q.validate();
  const Geometry g = geometry(q);
  RateResult r;
  r.i_o = g.i_o;
  r.s_over_alpha = g.ratio;
  const bool side_ok = at_least(g.ratio, g.side);
  if (below(g.dense_cut, g.s1) && side_ok) {
    r.regime = Regime::kDenseX;
    r.exponent = dense_exponent(q, g);
  } else if (at_least(g.s1, g.sparse_cut) && at_least(g.dense_cut, g.s1)) {
    r.regime = Regime::kIntermediate;
    r.exponent = intermediate_exponent(q, g);
  } else if (below(g.s1, g.sparse_cut) && side_ok) {
    r.regime = Regime::kSparse;
    r.exponent = sparse_exponent(q, g);
  } else {
    r.regime = Regime::kUncovered;
    r.exponent = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

std::vector<RatePoint> rate_curve(const RateQuery& query, std::span<const double> epsilons, bool log_factor) {
  std::vector<RatePoint> out;
  if (epsilons.empty()) return out;
  for (double e : epsilons)
    if (!(e > 0.0 && e < 1.0)) throw ParameterError("rate_curve: epsilon values must lie in (0, 1)");
  const RateResult r = query.dimension() == 2 ? classify_2d(query) : classify_rd(query);
  const double two_abar = 2.0 * query.mean_alpha();
  auto raw_log = [&](double eps) {
    double v = query.p * std::log(query.A) + r.exponent * (two_abar * std::log(eps) - 2.0 * std::log(query.A));
    if (log_factor) v += r.log_exponent_upper * std::log(std::abs(std::log(eps)));
    return v;
  };
  const double ref = raw_log(*std::max_element(epsilons.begin(), epsilons.end()));
  for (double e : epsilons) {
    const double bound = r.covered() ? std::exp(raw_log(e) - ref) : std::numeric_limits<double>::quiet_NaN();
    out.push_back({e, bound, r.regime, r.exponent});
  }
  return out;
}

void write_rate_csv(std::ostream& os, std::span<const RatePoint> curve) {
  const auto old = os.precision(17);
  os << "epsilon,bound,regime,exponent\n";
  for (const auto& pt : curve) os << pt.epsilon << ',' << pt.bound << ',' << to_string(pt.regime) << ',' << pt.exponent << '\n';
  os.precision(old);
}

}  // namespace lrdecon::rates
