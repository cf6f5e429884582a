#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lrdecon/config.hpp"
#include "lrdecon/estimator.hpp"
#include "lrdecon/meyer.hpp"
#include "lrdecon/rates.hpp"

/// Monte Carlo experiment runners: single configurations, Table-1 grids and
/// rate curves with an empirical slope comparison.
namespace lrdecon::experiment {

struct SimulationResult {
  estimator::RiskReport report;
  double sigma = 0.0;
  double q_norm = 0.0;
  double epsilon = 0.0;        ///< continuous-model noise scale
  double epsilon_power = 0.0;  ///< eps^{2 abar}
  estimator::LevelSelection levels;
  double projection_error = 0.0;  ///< ||f - P_Omega f||^2
  std::vector<long> kept;         ///< surviving thresholded coefficients per run
  std::vector<std::uint64_t> seeds;
};

/// Runs the Monte Carlo study in memory. Run r uses noise seed
/// derive_seed(config.seed, r), so results do not depend on config.jobs.
SimulationResult simulate(const config::ExperimentConfig& config);

/// simulate() plus config.txt, runs.csv, summary.csv and risk.txt in config.out.
/// Files written before a failure are removed.
SimulationResult run_simulation(const config::ExperimentConfig& config);

struct TableRow {
  model::TestSignal signal;
  double snr_db = 0.0;
  double sigma = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double mise = 0.0;
  int J1 = 0;
  bool ok = false;
  std::string error;
  /// MISE(0.8, 0.6) <= MISE(0.4, 0.2) within the (signal, SNR) group; unset
  /// when either pair is absent or failed.
  std::optional<bool> trend_ok;
};

/// One row per (signal, SNR, alpha pair) in grid order. A failing cell is
/// recorded and the remaining cells still run.
std::vector<TableRow> table(const config::ExperimentConfig& base, const config::TableGrid& grid);

/// Header "signal,snr_db,sigma,alpha1,alpha2,mise,j1,status,trend_ok,error".
void write_table_csv(std::ostream& os, const std::vector<TableRow>& rows);

/// table() plus config.txt and table.csv in base.out.
std::vector<TableRow> run_table(const config::ExperimentConfig& base, const config::TableGrid& grid);

rates::RateQuery rate_query(const config::RatesConfig& rates);
/// eps_count log-spaced values on [eps_min, eps_max].
std::vector<double> epsilon_grid(const config::RatesConfig& rates);

struct SlopePoint {
  int n = 0;
  double sigma = 0.0;
  double epsilon_power = 0.0;
  double mise = 0.0;
  int J1 = 0;
  int J2 = 0;
};

struct SlopeComparison {
  std::vector<SlopePoint> points;
  double slope = 0.0;  ///< least-squares slope of log MISE on log eps^{2 abar}
  rates::RateResult theory;
  double difference() const { return slope - theory.exponent; }
};

/// Repeats the simulation for each N in `sizes` and compares the MISE decay with
/// the exponent of `query` (whose alpha and nu are replaced by the experiment's).
SlopeComparison empirical_slope(const config::ExperimentConfig& base, const rates::RateQuery& query,
                                const std::vector<int>& sizes);

/// rates.csv and rates.txt in base.out; rates.svg when plot is set. With
/// rates.empirical_n, also empirical.csv and slope.txt (and empirical.svg).
void run_rates(const config::ConfigFile& config, bool plot);

/// Least-squares slope of y on x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Header "j1,k1,j2,k2,value", levels from m0 - 1 (scaling block) upwards.
void write_coefficients_csv(std::ostream& os, const meyer::WaveletCoeffs2D& coeffs);
/// Inverse of write_coefficients_csv; J1 and J2 are the largest levels present.
meyer::WaveletCoeffs2D read_coefficients_csv(std::istream& is, int m0 = 3);

}  // namespace lrdecon::experiment
