#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lrdecon/config.hpp"
#include "lrdecon/errors.hpp"
#include "lrdecon/experiment.hpp"
#include "lrdecon/meyer.hpp"
#include "lrdecon/model.hpp"

namespace {

using namespace lrdecon;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<int> runs;
  std::optional<std::string> out;
  bool plot = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "key = value configuration file");
  app->add_option("--seed", f.seed, "base RNG seed");
  app->add_option("--jobs", f.jobs, "worker threads for Monte Carlo runs (0 = all)");
  app->add_option("--runs", f.runs, "Monte Carlo runs per configuration");
  app->add_option("--out", f.out, "output directory");
  app->add_flag("--plot", f.plot, "also write SVG plots");
}

config::ConfigFile resolve(const CommonFlags& f) {
  config::ConfigFile c = f.config_path.empty() ? config::ConfigFile{} : config::load(f.config_path);
  if (f.seed) c.experiment.seed = *f.seed;
  if (f.jobs) c.experiment.jobs = *f.jobs;
  if (f.runs) c.experiment.runs = *f.runs;
  if (f.out) c.experiment.out = *f.out;
  return c;
}

int cmd_simulate(const CommonFlags& f) {
  const auto c = resolve(f);
  const auto res = experiment::run_simulation(c.experiment);
  std::cout << "signal=" << model::to_string(c.experiment.signal) << " sigma=" << res.sigma
            << " alpha=(" << c.experiment.alpha1 << "," << c.experiment.alpha2 << ") mise=" << res.report.mise
            << " J1=" << res.levels.J1 << " J2=" << res.levels.J2 << " runs=" << res.report.runs << '\n'
            << "wrote " << c.experiment.out << '\n';
  return 0;
}

int cmd_table(const CommonFlags& f) {
  const auto c = resolve(f);
  const auto rows = experiment::run_table(c.experiment, c.table);
  int failed = 0;
  for (const auto& r : rows) failed += r.ok ? 0 : 1;
  std::cout << rows.size() << " cells, " << failed << " failed; wrote " << c.experiment.out << "/table.csv\n";
  return 0;
}

int cmd_rates(const CommonFlags& f) {
  const auto c = resolve(f);
  experiment::run_rates(c, f.plot);
  std::cout << "wrote " << c.experiment.out << '\n';
  return 0;
}

struct TransformFlags {
  std::string direction;
  std::string in;
  std::string out;
  int j1 = 3;
  int j2 = 3;
  int m0 = 3;
  int n = 0;
};

int cmd_transform(const TransformFlags& t) {
  std::ifstream in(t.in);
  if (!in) throw ConfigError("cannot open input '" + t.in + "'");
  std::ofstream out(t.out);
  if (!out) throw ConfigError("cannot write output '" + t.out + "'");
  if (t.direction == "forward") {
    const auto field = model::read_field_csv(in);
    const meyer::MeyerBasis basis(field.size(), t.m0);
    experiment::write_coefficients_csv(out, basis.forward_2d(field, t.j1, t.j2));
  } else {
    if (t.n <= 0) throw ConfigError("transform inverse needs --n");
    const auto coeffs = experiment::read_coefficients_csv(in, t.m0);
    const meyer::MeyerBasis basis(t.n, t.m0);
    model::write_field_csv(out, basis.inverse_2d(coeffs));
  }
  if (!out) throw ConfigError("failed writing '" + t.out + "'");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic functional deconvolution under long-memory noise"};
  app.require_subcommand(1);

  CommonFlags sim_flags, table_flags, rates_flags;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo MISE for one configuration");
  add_common(sim, sim_flags);
  auto* tab = app.add_subcommand("table", "Grid of signals, SNRs and long-memory pairs");
  add_common(tab, table_flags);
  auto* rat = app.add_subcommand("rates", "Rate curves and the empirical slope comparison");
  add_common(rat, rates_flags);

  TransformFlags tf;
  auto* tr = app.add_subcommand("transform", "Meyer transform of a CSV field or coefficient file");
  tr->add_option("direction", tf.direction, "forward or inverse")->required()->check(CLI::IsMember({"forward", "inverse"}));
  tr->add_option("--in", tf.in, "input CSV")->required();
  tr->add_option("--out", tf.out, "output CSV")->required();
  tr->add_option("--j1", tf.j1, "finest level in t (forward)");
  tr->add_option("--j2", tf.j2, "finest level in x (forward)");
  tr->add_option("--m0", tf.m0, "coarsest level");
  tr->add_option("--n", tf.n, "grid size (inverse)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sim) return cmd_simulate(sim_flags);
    if (*tab) return cmd_table(table_flags);
    if (*rat) return cmd_rates(rates_flags);
    if (*tr) return cmd_transform(tf);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
