#include "lrdecon/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "lrdecon/errors.hpp"
#include "lrdecon/fft.hpp"
#include "lrdecon/grid.hpp"

namespace lrdecon::estimator {
namespace {

// Slack for floor(log2(.)) so exact powers of two are not lost to rounding.
constexpr double kLevelSlack = 1e-9;

int floor_log2(double v) { return static_cast<int>(std::floor(std::log2(v) + kLevelSlack)); }

}  // namespace

std::string to_string(EpsilonMapping m) { return m == EpsilonMapping::kFullGrid ? "full-grid" : "half-grid"; }

EpsilonMapping parse_epsilon_mapping(const std::string& name) {
  if (name == "full-grid") return EpsilonMapping::kFullGrid;
  if (name == "half-grid") return EpsilonMapping::kHalfGrid;
  throw ParameterError("unknown epsilon mapping '" + name + "' (expected full-grid or half-grid)");
}

double epsilon_power(double sigma, int n, const lrdnoise::LongMemoryParams& alpha, EpsilonMapping mapping) {
  alpha.validate();
  if (!(sigma > 0.0)) throw ParameterError("noise level sigma must be > 0");
  if (n < 2) throw ParameterError("grid size must be >= 2");
  const double sum = alpha.alpha1 + alpha.alpha2;
  const double e = mapping == EpsilonMapping::kFullGrid ? sum : 0.5 * sum;
  return sigma * sigma * std::pow(static_cast<double>(n), -e);
}

double noise_scale(double sigma, int n, const lrdnoise::LongMemoryParams& alpha, EpsilonMapping mapping) {
  return std::pow(epsilon_power(sigma, n, alpha, mapping), 1.0 / (2.0 * alpha.mean_alpha()));
}

void ThresholdPolicy::validate() const {
  alpha.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ParameterError("threshold needs 0 < epsilon < 1, got " + std::to_string(epsilon));
  if (!(gamma >= 0.0)) throw ParameterError("threshold constant gamma must be >= 0");
  if (!(nu > 0.0)) throw ParameterError("DIP nu must be > 0");
}

double ThresholdPolicy::lambda(int j1, int j2) const {
  validate();
  const double base = gamma * std::pow(epsilon, alpha.mean_alpha()) * std::sqrt(std::abs(std::log(epsilon)));
  return base * std::exp2(0.5 * j1 * (2.0 * nu + alpha.alpha1 - 1.0)) * std::exp2(0.5 * j2 * (alpha.alpha2 - 1.0));
}

double threshold_lambda(const ThresholdPolicy& policy, int j1, int j2) { return policy.lambda(j1, j2); }

LevelSelection finest_levels(double epsilon, double A, const lrdnoise::LongMemoryParams& alpha, double nu, int n,
                             int m0) {
  alpha.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("finest_levels needs 0 < epsilon < 1");
  if (!(A > 0.0)) throw ParameterError("Besov radius A must be > 0");
  if (!(nu > 0.0)) throw ParameterError("DIP nu must be > 0");
  const int top = fft::log2_exact(n) - 1;
  // log2 of eps^{2 abar} / A^2
  const double log2_ratio = (alpha.alpha1 + alpha.alpha2) * std::log2(epsilon) - 2.0 * std::log2(A);
  LevelSelection s;
  s.A = A;
  s.J2_raw = floor_log2(std::exp2(-log2_ratio / alpha.alpha2));
  s.J1_raw = floor_log2(std::exp2(-log2_ratio / (2.0 * nu + alpha.alpha1)));
  s.J1 = std::clamp(s.J1_raw, m0, top);
  s.J2 = std::clamp(s.J2_raw, m0, top);
  s.J1_capped = s.J1 != s.J1_raw;
  s.J2_capped = s.J2 != s.J2_raw;
  return s;
}

LevelSelection fixed_levels(int J1, int J2, int n, int m0) {
  const int top = fft::log2_exact(n) - 1;
  for (int J : {J1, J2})
    if (J < m0 || J > top)
      throw ConfigError("finest level J=" + std::to_string(J) + " not admissible for N=" + std::to_string(n) +
                        " (maximal admissible J is " + std::to_string(top) + ")");
  LevelSelection s;
  s.J1 = s.J1_raw = J1;
  s.J2 = s.J2_raw = J2;
  return s;
}

std::vector<cplx> deconvolved_spectrum(const SampledField& y, const model::BlurKernel& g, int m1_max, Exec exec) {
  if (y.size() != g.size())
    throw ParameterError("deconvolution: data N=" + std::to_string(y.size()) + " but kernel N=" +
                         std::to_string(g.size()));
  const int n = y.size();
  const std::size_t total = static_cast<std::size_t>(n) * n;
  std::vector<cplx> work(total), cols(total);
  const auto v = y.values();
  for (std::size_t a = 0; a < total; ++a) work[a] = v[a];
  grid::transpose(work, cols, n, n, exec);  // [l][i]
  grid::fft_rows(cols, n, n, -1, exec);     // [l][m1]

  const auto gf = g.column_fourier();
  double largest = 0.0;
  for (const auto& c : gf) largest = std::max(largest, std::abs(c));
  const double floor = largest * 1e-15;
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      cplx& c = cols[static_cast<std::size_t>(l) * n + m];
      const int signed_m = grid::signed_frequency(m, n);
      if (std::abs(signed_m) > m1_max) {
        c = 0.0;
        continue;
      }
      const cplx d = gf[static_cast<std::size_t>(m) * n + l];
      if (!(std::abs(d) > floor) || !std::isfinite(d.real()) || !std::isfinite(d.imag()))
        throw IllPosednessError("blur kernel Fourier coefficient vanishes at m1=" + std::to_string(signed_m) +
                                    " in column l=" + std::to_string(l),
                                signed_m, l);
      c *= scale / d;
    }
  }
  grid::transpose(cols, work, n, n, exec);  // [m1][l]
  const bool parallel = exec == Exec::kParallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (int m = 0; m < n; ++m) {
    if (std::abs(grid::signed_frequency(m, n)) > m1_max) continue;
    fft::forward_inplace(std::span<cplx>(work).subspan(static_cast<std::size_t>(m) * n, n));
  }
  return work;
}

cplx beta_tilde(std::span<const cplx> deconvolved, const MeyerBasis& basis, int j1, int k1, int j2, int k2) {
  const int n = basis.size();
  if (deconvolved.size() != static_cast<std::size_t>(n) * n) throw ParameterError("beta_tilde: spectrum is not N x N");
  // Validates (j, k) before summing.
  basis.filter_coefficient(j1, k1, 0);
  basis.filter_coefficient(j2, k2, 0);
  cplx sum{};
  for (const auto& t1 : basis.band(j1)) {
    const cplx a = std::conj(basis.filter_coefficient(j1, k1, t1.m));
    for (const auto& t2 : basis.band(j2)) {
      const cplx b = std::conj(basis.filter_coefficient(j2, k2, t2.m));
      sum += a * b * deconvolved[static_cast<std::size_t>(t1.index) * n + t2.index];
    }
  }
  return sum;
}

WaveletCoeffs2D estimate_coefficients(const SampledField& y, const model::BlurKernel& g, const MeyerBasis& basis,
                                      int J1, int J2, Exec exec) {
  basis.validate_level(J1);
  basis.validate_level(J2);
  const auto spec = deconvolved_spectrum(y, g, basis.band_limit(J1), exec);
  return basis.analyze_spectrum_2d(spec, J1, J2, exec);
}

long hard_threshold(WaveletCoeffs2D& coeffs, const ThresholdPolicy& policy) {
  policy.validate();
  const int rows = coeffs.rows();
  const int cols = coeffs.cols();
  const int scaling = coeffs.m0() - 1;
  const int w = coeffs.J2() - scaling + 1;
  std::vector<double> lambda(static_cast<std::size_t>(coeffs.J1() - scaling + 1) * w);
  for (int j1 = scaling; j1 <= coeffs.J1(); ++j1)
    for (int j2 = scaling; j2 <= coeffs.J2(); ++j2)
      lambda[static_cast<std::size_t>(j1 - scaling) * w + (j2 - scaling)] = policy.lambda(j1, j2);
  auto v = coeffs.values();
  long kept = 0;
  for (int r = 0; r < rows; ++r) {
    const int j1 = coeffs.level_of(r);
    for (int c = 0; c < cols; ++c) {
      const int j2 = coeffs.level_of(c);
      double& b = v[static_cast<std::size_t>(r) * cols + c];
      if (j1 == scaling && j2 == scaling) continue;
      if (std::abs(b) > lambda[static_cast<std::size_t>(j1 - scaling) * w + (j2 - scaling)])
        ++kept;
      else
        b = 0.0;
    }
  }
  return kept;
}

Estimate estimate(const SampledField& y, const model::BlurKernel& g, const MeyerBasis& basis,
                  const ThresholdPolicy& policy, const LevelSelection& levels, Exec exec) {
  auto coeffs = estimate_coefficients(y, g, basis, levels.J1, levels.J2, exec);
  const long kept = hard_threshold(coeffs, policy);
  auto field = basis.inverse_2d(coeffs, exec);
  if (!field.all_finite()) throw NumericalError("estimate produced non-finite values");
  return {std::move(field), std::move(coeffs), kept};
}

double coefficient_ise(const WaveletCoeffs2D& est, const WaveletCoeffs2D& truth, double truth_energy) {
  if (est.m0() != truth.m0() || est.J1() != truth.J1() || est.J2() != truth.J2())
    throw ParameterError("coefficient_ise: coefficient sets differ in shape");
  const auto a = est.values();
  const auto b = truth.values();
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) err += (a[i] - b[i]) * (a[i] - b[i]);
  return err + std::max(0.0, truth_energy - truth.sum_of_squares());
}

double integrated_error(const SampledField& truth, const SampledField& est, double p) {
  require_same_shape(truth, est, "integrated_error");
  if (!(p >= 1.0)) throw ParameterError("risk exponent p must be >= 1");
  const auto a = truth.values();
  const auto b = est.values();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::pow(std::abs(a[i] - b[i]), p);
  return s / static_cast<double>(a.size());
}

std::string RiskReport::to_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "mise=" << mise << '\n';
  if (lp_risk) os << "lp_risk=" << *lp_risk << "\np=" << p << '\n';
  os << "runs=" << runs << '\n' << "J1_used=" << J1_used << '\n' << "J2_used=" << J2_used << '\n';
  return os.str();
}

RiskReport summarize(std::vector<double> per_run_errors, int J1, int J2) {
  if (per_run_errors.empty()) throw ParameterError("risk summary needs at least one run");
  RiskReport r;
  double s = 0.0;
  for (double e : per_run_errors) s += e;
  r.mise = s / static_cast<double>(per_run_errors.size());
  r.runs = static_cast<int>(per_run_errors.size());
  r.per_run = std::move(per_run_errors);
  r.J1_used = J1;
  r.J2_used = J2;
  return r;
}

RiskReport mise(const SampledField& truth, std::span<const SampledField> runs) {
  if (runs.empty()) throw ParameterError("mise: empty run list");
  std::vector<double> e;
  e.reserve(runs.size());
  for (const auto& f : runs) e.push_back(integrated_error(truth, f, 2.0));
  return summarize(std::move(e), 0, 0);
}

double lp_risk(const SampledField& truth, std::span<const SampledField> runs, double p) {
  if (runs.empty()) throw ParameterError("lp_risk: empty run list");
  double s = 0.0;
  for (const auto& f : runs) s += integrated_error(truth, f, p);
  return s / static_cast<double>(runs.size());
}

std::vector<LevelBlock> level_blocks(const WaveletCoeffs2D& coeffs) {
  std::vector<LevelBlock> blocks;
  const int m0 = coeffs.m0();
  for (int j1 = m0 - 1; j1 <= coeffs.J1(); ++j1)
    for (int j2 = m0 - 1; j2 <= coeffs.J2(); ++j2) {
      LevelBlock b{j1, j2, {}};
      const int s1 = meyer::Coeffs1D::block_size(m0, j1);
      const int s2 = meyer::Coeffs1D::block_size(m0, j2);
      b.values.reserve(static_cast<std::size_t>(s1) * s2);
      for (int k1 = 0; k1 < s1; ++k1)
        for (int k2 = 0; k2 < s2; ++k2) b.values.push_back(coeffs.at(j1, k1, j2, k2));
      blocks.push_back(std::move(b));
    }
  return blocks;
}

BesovDiagnostic besov_diagnostic(std::span<const LevelBlock> blocks, double s1, double s2, double pi, double p,
                                 double A) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("besov_diagnostic: need finite p >= 1");
  if (!(pi >= 1.0)) throw ParameterError("besov_diagnostic: need pi >= 1");
  if (!(A > 0.0)) throw ParameterError("besov_diagnostic: need A > 0");
  const double p_prime = std::min(p, pi);
  BesovDiagnostic d;
  d.A = A;
  for (const auto& b : blocks) {
    double sum = 0.0;
    for (double v : b.values) sum += std::pow(std::abs(v), p);
    const double weight = (b.j1 * s1 + b.j2 * s2) + (0.5 - 1.0 / p_prime) * (b.j1 + b.j2);
    const double req = std::pow(sum, 1.0 / p) * std::exp2(weight);
    d.levels.push_back({b.j1, b.j2, sum, req});
    d.min_A = std::max(d.min_A, req);
  }
  d.passes = d.min_A <= A;
  return d;
}

BesovDiagnostic besov_diagnostic(const WaveletCoeffs2D& coeffs, double s1, double s2, double pi, double p, double A) {
  const auto blocks = level_blocks(coeffs);
  return besov_diagnostic(blocks, s1, s2, pi, p, A);
}

double besov_norm(std::span<const LevelBlock> blocks, double s1, double s2, double pi, double q) {
  if (!(pi >= 1.0) || !(q >= 1.0)) throw ParameterError("besov_norm: need pi, q >= 1");
  const double inv_pi = std::isinf(pi) ? 0.0 : 1.0 / pi;
  const double s1s = s1 + 0.5 - inv_pi;
  const double s2s = s2 + 0.5 - inv_pi;
  double acc = 0.0;
  for (const auto& b : blocks) {
    double inner = 0.0;
    if (std::isinf(pi)) {
      for (double v : b.values) inner = std::max(inner, std::abs(v));
    } else {
      for (double v : b.values) inner += std::pow(std::abs(v), pi);
      inner = std::pow(inner, inv_pi);
    }
    const double term = std::exp2(b.j1 * s1s + b.j2 * s2s) * inner;
    if (std::isinf(q))
      acc = std::max(acc, term);
    else
      acc += std::pow(term, q);
  }
  return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

}  // namespace lrdecon::estimator
