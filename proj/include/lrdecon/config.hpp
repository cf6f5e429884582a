#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lrdecon/estimator.hpp"
#include "lrdecon/lrdnoise.hpp"
#include "lrdecon/model.hpp"

/// Experiment configuration as a flat "key = value" text file. Unprefixed keys
/// describe one simulation; "table." and "rates." keys describe the grids.
namespace lrdecon::config {

struct ExperimentConfig {
  model::TestSignal signal = model::TestSignal::kLidar;
  int n = 1024;
  double snr_db = 30.0;
  /// Forced noise level; bypasses SNR calibration when set.
  std::optional<double> sigma;
  double alpha1 = 0.8;
  double alpha2 = 0.6;
  double gamma = 2.449489742783178;  // sqrt(6)
  /// Fixed finest level in t; unset selects it from the noise scale.
  std::optional<int> j1 = 5;
  /// Fixed finest level in x; unset selects it from the noise scale.
  std::optional<int> j2 = 5;
  int m0 = 3;
  int runs = 200;
  std::uint64_t seed = 1;
  std::string out = "out";
  lrdnoise::NoiseConstruction noise = lrdnoise::NoiseConstruction::kFarimaProduct;
  lrdnoise::FarimaMethod farima = lrdnoise::FarimaMethod::kCirculant;
  model::KernelPeriodization kernel = model::KernelPeriodization::kGridStep;
  double nu = 0.5;
  estimator::EpsilonMapping mapping = estimator::EpsilonMapping::kFullGrid;
  double A = 1.0;
  double p = 2.0;
  /// Worker threads for Monte Carlo runs; 0 uses the OpenMP default.
  int jobs = 0;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  lrdnoise::LongMemoryParams alpha() const { return {alpha1, alpha2, seed}; }
};

struct TableGrid {
  std::vector<model::TestSignal> signals{model::TestSignal::kLidar, model::TestSignal::kDoppler};
  std::vector<double> snr_db{10.0, 20.0, 30.0};
  std::vector<std::pair<double, double>> alphas{{0.8, 0.6}, {0.8, 0.4}, {0.8, 0.2},
                                                {0.6, 0.4}, {0.6, 0.2}, {0.4, 0.2}};
  /// Fixed J1 per SNR entry; empty uses the base configuration's J1 mode.
  std::vector<int> j1{3, 4, 5};
};

struct RatesConfig {
  std::vector<double> s{2.0, 0.5};
  std::vector<double> alpha{0.8, 0.6};
  double pi = 2.0;
  double q = 2.0;
  double p = 2.0;
  double nu = 0.5;
  double A = 1.0;
  double eps_min = 1e-4;
  double eps_max = 0.5;
  int eps_count = 25;
  bool log_factor = true;
  /// Grid sizes for the Monte Carlo slope comparison; empty skips it.
  std::vector<int> empirical_n;
};

struct ConfigFile {
  ExperimentConfig experiment;
  TableGrid table;
  RatesConfig rates;
};

/// Parses "key = value" lines; '#' starts a comment. Throws ConfigError on
/// unknown keys or malformed values.
ConfigFile parse(std::istream& is);
ConfigFile load(const std::string& path);

/// Writes every key in canonical form; doubles use 17 significant digits so
/// that parse(write(c)) == c.
void write(std::ostream& os, const ConfigFile& config);
void write(std::ostream& os, const ExperimentConfig& config);
std::string to_text(const ConfigFile& config);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);
bool operator==(const TableGrid& a, const TableGrid& b);
bool operator==(const RatesConfig& a, const RatesConfig& b);
bool operator==(const ConfigFile& a, const ConfigFile& b);

}  // namespace lrdecon::config
