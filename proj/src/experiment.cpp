#include "lrdecon/experiment.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <numeric>
#include <ostream>

#include "lrdecon/csv.hpp"
#include "lrdecon/errors.hpp"
#include "lrdecon/fft.hpp"
#include "lrdecon/lrdnoise.hpp"
#include "lrdecon/meyer.hpp"
#include "lrdecon/model.hpp"

namespace lrdecon::experiment {
namespace fs = std::filesystem;
namespace {

// Removes every file it opened unless commit() is called.
class OutputFiles {
public:
  explicit OutputFiles(const std::string& dir) : dir_(dir) {
    if (dir_.empty()) throw ConfigError("config key 'out': output directory must not be empty");
    std::error_code ec;
    created_dir_ = !fs::exists(dir_, ec);
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }
  OutputFiles(const OutputFiles&) = delete;
  OutputFiles& operator=(const OutputFiles&) = delete;
  ~OutputFiles() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
    if (created_dir_) fs::remove(dir_, ec);
  }

  std::ofstream open(const std::string& name) {
    const fs::path p = dir_ / name;
    written_.push_back(p);
    std::ofstream out(p);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    return out;
  }
  std::string path(const std::string& name) {
    written_.push_back(dir_ / name);
    return (dir_ / name).string();
  }
  void commit() { committed_ = true; }

private:
  fs::path dir_;
  std::vector<fs::path> written_;
  bool created_dir_ = false;
  bool committed_ = false;
};

void check_stream(std::ostream& os, const std::string& what) {
  if (!os) throw ConfigError("failed writing " + what);
}

}  // namespace

SimulationResult simulate(const config::ExperimentConfig& cfg) {
  cfg.validate();
  const int n = cfg.n;
  const auto alpha = cfg.alpha();
  const auto truth = model::make_truth(cfg.signal, n);
  const auto g = model::make_kernel(n, {cfg.kernel, cfg.nu});
  const auto q = model::convolve_columns(truth, g);

  SimulationResult res;
  res.q_norm = q.l2_norm();
  res.sigma = cfg.sigma ? *cfg.sigma : model::calibrate_sigma(q, cfg.snr_db);
  const bool noisy = res.sigma > 0.0;
  if (noisy) {
    res.epsilon_power = estimator::epsilon_power(res.sigma, n, alpha, cfg.mapping);
    res.epsilon = estimator::noise_scale(res.sigma, n, alpha, cfg.mapping);
  }

  const int jmax = fft::log2_exact(n) - 1;
  estimator::LevelSelection levels;
  if (!cfg.j1 || !cfg.j2) {
    if (noisy) {
      levels = estimator::finest_levels(res.epsilon, cfg.A, alpha, cfg.nu, n, cfg.m0);
    } else {
      levels.J1 = levels.J1_raw = jmax;
      levels.J2 = levels.J2_raw = jmax;
    }
  }
  if (cfg.j1) levels.J1 = levels.J1_raw = *cfg.j1;
  if (cfg.j2) levels.J2 = levels.J2_raw = *cfg.j2;
  levels = [&] {
    auto fixed = estimator::fixed_levels(levels.J1, levels.J2, n, cfg.m0);
    fixed.A = cfg.A;
    fixed.J1_raw = levels.J1_raw;
    fixed.J2_raw = levels.J2_raw;
    fixed.J1_capped = levels.J1_capped;
    fixed.J2_capped = levels.J2_capped;
    return fixed;
  }();
  res.levels = levels;

  estimator::ThresholdPolicy policy{cfg.gamma, res.epsilon, alpha, cfg.nu};
  const bool threshold = noisy && cfg.gamma > 0.0;
  if (threshold) policy.validate();

  const meyer::MeyerBasis basis(n, cfg.m0);
  const auto truth_coeffs = basis.forward_2d(truth, levels.J1, levels.J2);
  const double truth_energy = truth.l2_norm() * truth.l2_norm();
  res.projection_error = std::max(0.0, truth_energy - truth_coeffs.sum_of_squares());

  const int runs = cfg.runs;
  std::vector<double> ise(runs, 0.0), lp(runs, 0.0);
  res.kept.assign(runs, 0);
  res.seeds.resize(runs);
  for (int r = 0; r < runs; ++r) res.seeds[r] = lrdnoise::derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
  const bool want_lp = cfg.p != 2.0;

  std::vector<std::exception_ptr> errors(runs);
  const int threads = cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int r = 0; r < runs; ++r) {
    try {
      SampledField y = q;
      if (noisy) {
        const auto sheet = lrdnoise::noise_sheet(alpha, n, res.seeds[r], cfg.noise, cfg.farima);
        y = model::observe(q, res.sigma, sheet);
      }
      auto coeffs = estimator::estimate_coefficients(y, g, basis, levels.J1, levels.J2, Exec::kSerial);
      res.kept[r] = threshold ? estimator::hard_threshold(coeffs, policy) : static_cast<long>(coeffs.values().size());
      ise[r] = estimator::coefficient_ise(coeffs, truth_coeffs, truth_energy);
      if (want_lp) lp[r] = estimator::integrated_error(truth, basis.inverse_2d(coeffs, Exec::kSerial), cfg.p);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  }
  for (int r = 0; r < runs; ++r)
    if (errors[r]) std::rethrow_exception(errors[r]);

  res.report = estimator::summarize(std::move(ise), levels.J1, levels.J2);
  if (want_lp) {
    res.report.p = cfg.p;
    res.report.lp_risk = std::accumulate(lp.begin(), lp.end(), 0.0) / runs;
  }
  return res;
}

SimulationResult run_simulation(const config::ExperimentConfig& cfg) {
  cfg.validate();
  OutputFiles files(cfg.out);
  {
    auto os = files.open("config.txt");
    config::write(os, cfg);
    check_stream(os, "config.txt");
  }
  const SimulationResult res = simulate(cfg);
  {
    auto os = files.open("runs.csv");
    os << "run,seed,ise,kept\n";
    for (int r = 0; r < res.report.runs; ++r)
      os << r << ',' << res.seeds[r] << ',' << csv::number(res.report.per_run[r]) << ',' << res.kept[r] << '\n';
    check_stream(os, "runs.csv");
  }
  {
    auto os = files.open("summary.csv");
    os << "signal,sigma,alpha1,alpha2,mise,j1,j2,runs\n"
       << model::to_string(cfg.signal) << ',' << csv::number(res.sigma) << ',' << csv::number(cfg.alpha1) << ','
       << csv::number(cfg.alpha2) << ',' << csv::number(res.report.mise) << ',' << res.levels.J1 << ','
       << res.levels.J2 << ',' << res.report.runs << '\n';
    check_stream(os, "summary.csv");
  }
  {
    auto os = files.open("risk.txt");
    os << res.report.to_text() << "sigma=" << csv::number(res.sigma) << '\n'
       << "q_norm=" << csv::number(res.q_norm) << '\n'
       << "epsilon=" << csv::number(res.epsilon) << '\n'
       << "epsilon_power=" << csv::number(res.epsilon_power) << '\n'
       << "projection_error=" << csv::number(res.projection_error) << '\n';
    check_stream(os, "risk.txt");
  }
  files.commit();
  return res;
}

std::vector<TableRow> table(const config::ExperimentConfig& base, const config::TableGrid& grid) {
  if (!grid.j1.empty() && grid.j1.size() != grid.snr_db.size())
    throw ConfigError("config key 'table.j1': needs one level per table.snr_db entry or 'auto'");
  std::vector<TableRow> rows;
  for (const auto signal : grid.signals) {
    for (std::size_t s = 0; s < grid.snr_db.size(); ++s) {
      const std::size_t group = rows.size();
      for (const auto& [a1, a2] : grid.alphas) {
        TableRow row;
        row.signal = signal;
        row.snr_db = grid.snr_db[s];
        row.alpha1 = a1;
        row.alpha2 = a2;
        auto cfg = base;
        cfg.signal = signal;
        cfg.snr_db = grid.snr_db[s];
        cfg.sigma.reset();
        cfg.alpha1 = a1;
        cfg.alpha2 = a2;
        if (!grid.j1.empty()) cfg.j1 = grid.j1[s];
        try {
          const auto res = simulate(cfg);
          row.sigma = res.sigma;
          row.mise = res.report.mise;
          row.J1 = res.levels.J1;
          row.ok = true;
        } catch (const std::exception& e) {
          row.mise = std::numeric_limits<double>::quiet_NaN();
          row.J1 = cfg.j1.value_or(0);
          row.error = e.what();
        }
        rows.push_back(std::move(row));
      }
      const TableRow* weak = nullptr;
      const TableRow* strong = nullptr;
      for (std::size_t i = group; i < rows.size(); ++i) {
        if (!rows[i].ok) continue;
        if (rows[i].alpha1 == 0.8 && rows[i].alpha2 == 0.6) weak = &rows[i];
        if (rows[i].alpha1 == 0.4 && rows[i].alpha2 == 0.2) strong = &rows[i];
      }
      if (weak && strong) {
        const bool flag = weak->mise <= strong->mise;
        for (std::size_t i = group; i < rows.size(); ++i) rows[i].trend_ok = flag;
      }
    }
  }
  return rows;
}

void write_table_csv(std::ostream& os, const std::vector<TableRow>& rows) {
  os << "signal,snr_db,sigma,alpha1,alpha2,mise,j1,status,trend_ok,error\n";
  for (const auto& r : rows) {
    os << model::to_string(r.signal) << ',' << csv::number(r.snr_db) << ',' << csv::number(r.sigma) << ','
       << csv::number(r.alpha1) << ',' << csv::number(r.alpha2) << ',' << csv::number(r.mise) << ',' << r.J1 << ','
       << (r.ok ? "ok" : "failed") << ',' << (r.trend_ok ? (*r.trend_ok ? "true" : "false") : "") << ','
       << csv::field(r.error) << '\n';
  }
}

std::vector<TableRow> run_table(const config::ExperimentConfig& base, const config::TableGrid& grid) {
  OutputFiles files(base.out);
  {
    auto os = files.open("config.txt");
    config::write(os, config::ConfigFile{base, grid, {}});
    check_stream(os, "config.txt");
  }
  auto rows = table(base, grid);
  auto os = files.open("table.csv");
  write_table_csv(os, rows);
  check_stream(os, "table.csv");
  files.commit();
  return rows;
}

rates::RateQuery rate_query(const config::RatesConfig& r) {
  rates::RateQuery q;
  q.s = r.s;
  q.alpha = r.alpha;
  q.pi = r.pi;
  q.q = r.q;
  q.p = r.p;
  q.nu = r.nu;
  q.A = r.A;
  return q;
}

std::vector<double> epsilon_grid(const config::RatesConfig& r) {
  if (!(r.eps_min > 0.0 && r.eps_min <= r.eps_max && r.eps_max < 1.0))
    throw ConfigError("config keys 'rates.eps_min'/'rates.eps_max': need 0 < eps_min <= eps_max < 1");
  if (r.eps_count < 1) throw ConfigError("config key 'rates.eps_count': must be >= 1");
  std::vector<double> eps(r.eps_count);
  const double lo = std::log(r.eps_min), hi = std::log(r.eps_max);
  for (int i = 0; i < r.eps_count; ++i)
    eps[i] = r.eps_count == 1 ? r.eps_max : std::exp(lo + (hi - lo) * i / (r.eps_count - 1));
  return eps;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("fit_slope needs at least two paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DegenerateInputError("fit_slope: abscissae are all equal");
  return sxy / sxx;
}

SlopeComparison empirical_slope(const config::ExperimentConfig& base, const rates::RateQuery& query,
                                const std::vector<int>& sizes) {
  SlopeComparison cmp;
  auto q = query;
  q.alpha = {base.alpha1, base.alpha2};
  q.nu = base.nu;
  cmp.theory = rates::classify_2d(q);
  std::vector<double> lx, ly;
  for (int n : sizes) {
    auto cfg = base;
    cfg.n = n;
    const auto res = simulate(cfg);
    if (!(res.epsilon_power > 0.0)) throw ConfigError("empirical slope needs a positive noise level");
    cmp.points.push_back({n, res.sigma, res.epsilon_power, res.report.mise, res.levels.J1, res.levels.J2});
    lx.push_back(std::log(res.epsilon_power));
    ly.push_back(std::log(res.report.mise));
  }
  cmp.slope = fit_slope(lx, ly);
  return cmp;
}

void run_rates(const config::ConfigFile& config, bool plot) {
  const auto& rc = config.rates;
  const auto query = rate_query(rc);
  const auto eps = epsilon_grid(rc);
  OutputFiles files(config.experiment.out);
  {
    auto os = files.open("config.txt");
    config::write(os, config);
    check_stream(os, "config.txt");
  }
  const auto curve = rates::rate_curve(query, eps, rc.log_factor);
  const auto upper = query.dimension() == 2 ? rates::classify_2d(query) : rates::classify_rd(query);
  const auto lower = rates::classify_lower(query);
  {
    auto os = files.open("rates.csv");
    rates::write_rate_csv(os, curve);
    check_stream(os, "rates.csv");
  }
  {
    auto os = files.open("rates.txt");
    os << "regime=" << rates::to_string(upper.regime) << '\n'
       << "exponent=" << csv::number(upper.exponent) << '\n'
       << "log_exponent_upper=" << csv::number(upper.log_exponent_upper) << '\n'
       << "log_exponent_lower=" << csv::number(upper.log_exponent_lower) << '\n'
       << "xi1=" << upper.xi1 << '\n'
       << "xi2=" << upper.xi2 << '\n'
       << "i_o=" << upper.i_o + 1 << '\n'
       << "lower_regime=" << rates::to_string(lower.regime) << '\n'
       << "lower_exponent=" << csv::number(lower.exponent) << '\n';
    check_stream(os, "rates.txt");
  }
  if (plot) {
    csv::Series s{"bound (" + rates::to_string(upper.regime) + ", e=" + csv::number(upper.exponent).substr(0, 6) + ")",
                  {}, {}};
    for (const auto& pt : curve) {
      s.x.push_back(pt.epsilon);
      s.y.push_back(pt.bound);
    }
    csv::write_loglog_svg(files.path("rates.svg"), "Normalized rate bound", "epsilon", "bound", {s});
  }
  if (!rc.empirical_n.empty()) {
    const auto cmp = empirical_slope(config.experiment, query, rc.empirical_n);
    {
      auto os = files.open("empirical.csv");
      os << "n,sigma,epsilon_power,mise,j1,j2\n";
      for (const auto& p : cmp.points)
        os << p.n << ',' << csv::number(p.sigma) << ',' << csv::number(p.epsilon_power) << ',' << csv::number(p.mise)
           << ',' << p.J1 << ',' << p.J2 << '\n';
      check_stream(os, "empirical.csv");
    }
    {
      auto os = files.open("slope.txt");
      os << "slope=" << csv::number(cmp.slope) << '\n'
         << "regime=" << rates::to_string(cmp.theory.regime) << '\n'
         << "exponent=" << csv::number(cmp.theory.exponent) << '\n'
         << "difference=" << csv::number(cmp.difference()) << '\n';
      check_stream(os, "slope.txt");
    }
    if (plot) {
      csv::Series mc{"Monte Carlo MISE", {}, {}, true};
      csv::Series th{"theory, slope " + csv::number(cmp.theory.exponent).substr(0, 6), {}, {}};
      for (const auto& p : cmp.points) {
        mc.x.push_back(p.epsilon_power);
        mc.y.push_back(p.mise);
      }
      const auto& ref = cmp.points.front();
      for (const auto& p : cmp.points) {
        th.x.push_back(p.epsilon_power);
        th.y.push_back(ref.mise * std::pow(p.epsilon_power / ref.epsilon_power, cmp.theory.exponent));
      }
      csv::write_loglog_svg(files.path("empirical.svg"), "MISE against eps^(2 abar)", "eps^(2 abar)", "MISE",
                            {mc, th});
    }
  }
  files.commit();
}

void write_coefficients_csv(std::ostream& os, const meyer::WaveletCoeffs2D& coeffs) {
  os << "j1,k1,j2,k2,value\n";
  const int m0 = coeffs.m0();
  for (int j1 = m0 - 1; j1 <= coeffs.J1(); ++j1)
    for (int k1 = 0; k1 < meyer::Coeffs1D::block_size(m0, j1); ++k1)
      for (int j2 = m0 - 1; j2 <= coeffs.J2(); ++j2)
        for (int k2 = 0; k2 < meyer::Coeffs1D::block_size(m0, j2); ++k2)
          os << j1 << ',' << k1 << ',' << j2 << ',' << k2 << ',' << csv::number(coeffs.at(j1, k1, j2, k2)) << '\n';
}

meyer::WaveletCoeffs2D read_coefficients_csv(std::istream& is, int m0) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("j1,k1,j2,k2,value", 0) != 0)
    throw ParameterError("coefficient CSV must start with header 'j1,k1,j2,k2,value'");
  struct Entry {
    int j1, k1, j2, k2;
    double v;
  };
  std::vector<Entry> entries;
  int J1 = m0 - 1, J2 = m0 - 1;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream ss(line);
    Entry e{};
    char c1, c2, c3, c4;
    if (!(ss >> e.j1 >> c1 >> e.k1 >> c2 >> e.j2 >> c3 >> e.k2 >> c4 >> e.v) || c1 != ',' || c2 != ',' || c3 != ',' ||
        c4 != ',')
      throw ParameterError("coefficient CSV line " + std::to_string(lineno) + ": expected j1,k1,j2,k2,value");
    J1 = std::max(J1, e.j1);
    J2 = std::max(J2, e.j2);
    entries.push_back(e);
  }
  if (J1 < m0 || J2 < m0) throw ParameterError("coefficient CSV holds no detail levels");
  meyer::WaveletCoeffs2D coeffs(m0, J1, J2);
  for (const auto& e : entries) coeffs.at(e.j1, e.k1, e.j2, e.k2) = e.v;
  return coeffs;
}

}  // namespace lrdecon::experiment
