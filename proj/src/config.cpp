#include "lrdecon/config.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "lrdecon/errors.hpp"
#include "lrdecon/fft.hpp"

namespace lrdecon::config {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::string format(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
  return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
}

template <class F>
auto named(const std::string& key, const std::string& text, F parse) {
  try {
    return parse(trim(text));
  } catch (const ParameterError& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::vector<int> parse_ints(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_int<int>(key, item));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format(v[i]);
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

using Setter = std::function<void(ConfigFile&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"signal", [](ConfigFile& c, auto& k, auto& v) { c.experiment.signal = named(k, v, model::parse_signal); }},
      {"n", [](ConfigFile& c, auto& k, auto& v) { c.experiment.n = parse_int<int>(k, v); }},
      {"snr_db", [](ConfigFile& c, auto& k, auto& v) { c.experiment.snr_db = parse_double(k, v); }},
      {"sigma",
       [](ConfigFile& c, auto& k, auto& v) {
         if (trim(v) == "auto")
           c.experiment.sigma.reset();
         else
           c.experiment.sigma = parse_double(k, v);
       }},
      {"alpha1", [](ConfigFile& c, auto& k, auto& v) { c.experiment.alpha1 = parse_double(k, v); }},
      {"alpha2", [](ConfigFile& c, auto& k, auto& v) { c.experiment.alpha2 = parse_double(k, v); }},
      {"gamma", [](ConfigFile& c, auto& k, auto& v) { c.experiment.gamma = parse_double(k, v); }},
      {"j1",
       [](ConfigFile& c, auto& k, auto& v) {
         if (trim(v) == "auto")
           c.experiment.j1.reset();
         else
           c.experiment.j1 = parse_int<int>(k, v);
       }},
      {"j2",
       [](ConfigFile& c, auto& k, auto& v) {
         if (trim(v) == "auto")
           c.experiment.j2.reset();
         else
           c.experiment.j2 = parse_int<int>(k, v);
       }},
      {"m0", [](ConfigFile& c, auto& k, auto& v) { c.experiment.m0 = parse_int<int>(k, v); }},
      {"runs", [](ConfigFile& c, auto& k, auto& v) { c.experiment.runs = parse_int<int>(k, v); }},
      {"seed", [](ConfigFile& c, auto& k, auto& v) { c.experiment.seed = parse_int<std::uint64_t>(k, v); }},
      {"out", [](ConfigFile& c, auto&, auto& v) { c.experiment.out = trim(v); }},
      {"noise", [](ConfigFile& c, auto& k, auto& v) { c.experiment.noise = named(k, v, lrdnoise::parse_construction); }},
      {"farima_method",
       [](ConfigFile& c, auto& k, auto& v) { c.experiment.farima = named(k, v, lrdnoise::parse_farima_method); }},
      {"kernel", [](ConfigFile& c, auto& k, auto& v) { c.experiment.kernel = named(k, v, model::parse_periodization); }},
      {"nu", [](ConfigFile& c, auto& k, auto& v) { c.experiment.nu = parse_double(k, v); }},
      {"epsilon_mapping",
       [](ConfigFile& c, auto& k, auto& v) { c.experiment.mapping = named(k, v, estimator::parse_epsilon_mapping); }},
      {"A", [](ConfigFile& c, auto& k, auto& v) { c.experiment.A = parse_double(k, v); }},
      {"p", [](ConfigFile& c, auto& k, auto& v) { c.experiment.p = parse_double(k, v); }},
      {"jobs", [](ConfigFile& c, auto& k, auto& v) { c.experiment.jobs = parse_int<int>(k, v); }},
      {"table.signals",
       [](ConfigFile& c, auto& k, auto& v) {
         c.table.signals.clear();
         for (const auto& item : split(v, ',')) c.table.signals.push_back(named(k, item, model::parse_signal));
       }},
      {"table.snr_db", [](ConfigFile& c, auto& k, auto& v) { c.table.snr_db = parse_doubles(k, v); }},
      {"table.alphas",
       [](ConfigFile& c, auto& k, auto& v) {
         c.table.alphas.clear();
         for (const auto& item : split(v, ',')) {
           const auto parts = split(item, '/');
           if (parts.size() != 2) throw ConfigError("config key '" + k + "': expected pairs a1/a2, got '" + item + "'");
           c.table.alphas.emplace_back(parse_double(k, parts[0]), parse_double(k, parts[1]));
         }
       }},
      {"table.j1",
       [](ConfigFile& c, auto& k, auto& v) {
         if (trim(v) == "auto" || trim(v).empty())
           c.table.j1.clear();
         else
           c.table.j1 = parse_ints(k, v);
       }},
      {"rates.s", [](ConfigFile& c, auto& k, auto& v) { c.rates.s = parse_doubles(k, v); }},
      {"rates.alpha", [](ConfigFile& c, auto& k, auto& v) { c.rates.alpha = parse_doubles(k, v); }},
      {"rates.pi", [](ConfigFile& c, auto& k, auto& v) { c.rates.pi = parse_double(k, v); }},
      {"rates.q", [](ConfigFile& c, auto& k, auto& v) { c.rates.q = parse_double(k, v); }},
      {"rates.p", [](ConfigFile& c, auto& k, auto& v) { c.rates.p = parse_double(k, v); }},
      {"rates.nu", [](ConfigFile& c, auto& k, auto& v) { c.rates.nu = parse_double(k, v); }},
      {"rates.A", [](ConfigFile& c, auto& k, auto& v) { c.rates.A = parse_double(k, v); }},
      {"rates.eps_min", [](ConfigFile& c, auto& k, auto& v) { c.rates.eps_min = parse_double(k, v); }},
      {"rates.eps_max", [](ConfigFile& c, auto& k, auto& v) { c.rates.eps_max = parse_double(k, v); }},
      {"rates.eps_count", [](ConfigFile& c, auto& k, auto& v) { c.rates.eps_count = parse_int<int>(k, v); }},
      {"rates.log_factor", [](ConfigFile& c, auto& k, auto& v) { c.rates.log_factor = parse_bool(k, v); }},
      {"rates.empirical_n", [](ConfigFile& c, auto& k, auto& v) { c.rates.empirical_n = parse_ints(k, v); }},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) { throw ConfigError("config key '" + key + "': " + why); };
  if (n < 16 || !fft::is_power_of_two(n)) fail("n", "must be a power of two >= 16");
  const int log2n = fft::log2_exact(n);
  if (!std::isfinite(snr_db)) fail("snr_db", "must be finite");
  if (sigma && !(*sigma >= 0.0 && std::isfinite(*sigma))) fail("sigma", "must be >= 0");
  if (!(alpha1 > 0.0 && alpha1 <= 1.0)) fail("alpha1", "must lie in (0, 1]");
  if (!(alpha2 > 0.0 && alpha2 <= 1.0)) fail("alpha2", "must lie in (0, 1]");
  if (!(gamma >= 0.0 && std::isfinite(gamma))) fail("gamma", "must be >= 0");
  if (m0 < 2 || m0 > log2n - 2) fail("m0", "must lie in [2, " + std::to_string(log2n - 2) + "]");
  const int jmax = log2n - 1;
  if (j1 && (*j1 < m0 || *j1 > jmax))
    fail("j1", "must lie in [" + std::to_string(m0) + ", " + std::to_string(jmax) + "] for N = " + std::to_string(n));
  if (j2 && (*j2 < m0 || *j2 > jmax))
    fail("j2", "must lie in [" + std::to_string(m0) + ", " + std::to_string(jmax) + "] for N = " + std::to_string(n));
  if (runs < 1) fail("runs", "must be >= 1");
  if (!(nu > 0.0 && std::isfinite(nu))) fail("nu", "must be > 0");
  if (!(A > 0.0 && std::isfinite(A))) fail("A", "must be > 0");
  if (!(p >= 1.0 && std::isfinite(p))) fail("p", "must be >= 1");
  if (jobs < 0) fail("jobs", "must be >= 0");
}

ConfigFile parse(std::istream& is) {
  ConfigFile c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = line.substr(eq + 1);
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->second(c, key, value);
  }
  return c;
}

ConfigFile load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

void write(std::ostream& os, const ExperimentConfig& e) {
  os << "signal = " << model::to_string(e.signal) << '\n'
     << "n = " << e.n << '\n'
     << "snr_db = " << format(e.snr_db) << '\n'
     << "sigma = " << (e.sigma ? format(*e.sigma) : "auto") << '\n'
     << "alpha1 = " << format(e.alpha1) << '\n'
     << "alpha2 = " << format(e.alpha2) << '\n'
     << "gamma = " << format(e.gamma) << '\n'
     << "j1 = " << (e.j1 ? std::to_string(*e.j1) : "auto") << '\n'
     << "j2 = " << (e.j2 ? std::to_string(*e.j2) : "auto") << '\n'
     << "m0 = " << e.m0 << '\n'
     << "runs = " << e.runs << '\n'
     << "seed = " << e.seed << '\n'
     << "out = " << e.out << '\n'
     << "noise = " << lrdnoise::to_string(e.noise) << '\n'
     << "farima_method = " << lrdnoise::to_string(e.farima) << '\n'
     << "kernel = " << model::to_string(e.kernel) << '\n'
     << "nu = " << format(e.nu) << '\n'
     << "epsilon_mapping = " << estimator::to_string(e.mapping) << '\n'
     << "A = " << format(e.A) << '\n'
     << "p = " << format(e.p) << '\n'
     << "jobs = " << e.jobs << '\n';
}

void write(std::ostream& os, const ConfigFile& c) {
  write(os, c.experiment);
  const auto& t = c.table;
  os << "table.signals = ";
  for (std::size_t i = 0; i < t.signals.size(); ++i) os << (i ? "," : "") << model::to_string(t.signals[i]);
  os << '\n' << "table.snr_db = " << join(t.snr_db) << '\n' << "table.alphas = ";
  for (std::size_t i = 0; i < t.alphas.size(); ++i)
    os << (i ? "," : "") << format(t.alphas[i].first) << '/' << format(t.alphas[i].second);
  os << '\n' << "table.j1 = " << (t.j1.empty() ? "auto" : join(t.j1)) << '\n';
  const auto& r = c.rates;
  os << "rates.s = " << join(r.s) << '\n'
     << "rates.alpha = " << join(r.alpha) << '\n'
     << "rates.pi = " << format(r.pi) << '\n'
     << "rates.q = " << format(r.q) << '\n'
     << "rates.p = " << format(r.p) << '\n'
     << "rates.nu = " << format(r.nu) << '\n'
     << "rates.A = " << format(r.A) << '\n'
     << "rates.eps_min = " << format(r.eps_min) << '\n'
     << "rates.eps_max = " << format(r.eps_max) << '\n'
     << "rates.eps_count = " << r.eps_count << '\n'
     << "rates.log_factor = " << (r.log_factor ? "true" : "false") << '\n'
     << "rates.empirical_n = " << join(r.empirical_n) << '\n';
}

std::string to_text(const ConfigFile& config) {
  std::ostringstream os;
  write(os, config);
  return os.str();
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.signal == b.signal && a.n == b.n && a.snr_db == b.snr_db && a.sigma == b.sigma && a.alpha1 == b.alpha1 &&
         a.alpha2 == b.alpha2 && a.gamma == b.gamma && a.j1 == b.j1 && a.j2 == b.j2 && a.m0 == b.m0 &&
         a.runs == b.runs && a.seed == b.seed && a.out == b.out && a.noise == b.noise && a.farima == b.farima &&
         a.kernel == b.kernel && a.nu == b.nu && a.mapping == b.mapping && a.A == b.A && a.p == b.p &&
         a.jobs == b.jobs;
}

bool operator==(const TableGrid& a, const TableGrid& b) {
  return a.signals == b.signals && a.snr_db == b.snr_db && a.alphas == b.alphas && a.j1 == b.j1;
}

bool operator==(const RatesConfig& a, const RatesConfig& b) {
  return a.s == b.s && a.alpha == b.alpha && a.pi == b.pi && a.q == b.q && a.p == b.p && a.nu == b.nu &&
         a.A == b.A && a.eps_min == b.eps_min && a.eps_max == b.eps_max && a.eps_count == b.eps_count &&
         a.log_factor == b.log_factor && a.empirical_n == b.empirical_n;
}

bool operator==(const ConfigFile& a, const ConfigFile& b) {
  return a.experiment == b.experiment && a.table == b.table && a.rates == b.rates;
}

}  // namespace lrdecon::config
