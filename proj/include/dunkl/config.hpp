#pragma once

// Experiment configuration: `key = value` files with `#` comments, overridden
// by command-line values, validated with line/field diagnostics. Also the
// CSV writer shared by all runner subcommands.

#include "dunkl/numeric.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace dunkl {

/// Invalid configuration; the message names the field and, for file
/// entries, the line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ConfigKey {
  const char* name;
  const char* fallback;
  const char* help;
};

inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"alpha", "0", "Dunkl parameter, > -1/2"},
      {"p", "2", "integral-mean exponent in [1, inf]"},
      {"precision_bits", "256", "mantissa bits (>= 64); default from DUNKL_PRECISION_BITS"},
      {"trunc_degree", "4096", "truncation degree N of every series"},
      {"r_min", "0.01", "smallest radius of the r-grid"},
      {"r_max", "400", "largest radius of the r-grid"},
      {"r_points", "256", "number of log-spaced grid points"},
      {"seed", "1", "seed for random test polynomials"},
      {"output", "-", "CSV destination ('-' for stdout)"},
      {"n", "4", "largest index for weights / verify-lemma1"},
      {"k", "1", "number of operator iterations for apply"},
      {"input", "", "input series file"},
      {"plan", "", "plan file (written by build-*, read by orbit/frequency)"},
      {"series", "", "series file written by build-*"},
      {"targets", "12", "number of targets K (build-hc) or J (build-fhc)"},
      {"q", "2", "exponent q in [1, 2] for verify-lemma3 and decay"},
      {"eps", "0.1", "hit tolerance for frequency"},
      {"radius", "2", "disk radius R for orbit-hit and frequency checks"},
      {"samples", "512", "circle samples for sup on a disk"},
      {"window", "2048", "orbit window / decay horizon"},
      {"block_width", "16", "block width B of the frequently hypercyclic schedule"},
      {"budget", "0.5", "tail-norm budget of the frequently hypercyclic schedule"},
      {"horizon", "4096", "orbit horizon (capped at trunc_degree)"},
      {"ml_alpha", "2", "Mittag-Leffler order in (0, 2]"},
      {"theta", "1", "Mittag-Leffler shift theta > 0"},
      {"beta", "1", "Mittag-Leffler power beta"},
      {"count", "100", "number of random polynomials"},
      {"degree", "16", "degree of random polynomials"},
      {"hits", "", "orbit: CSV path for per-block orbit hits"},
      {"cstar", "", "orbit: CSV path for windowed C_star"},
  };
  return keys;
}

/// Raw values with their provenance, before typed conversion.
class ConfigSource {
 public:
  ConfigSource() {
    for (const auto& k : config_keys()) values_[k.name] = {k.fallback, "default"};
    if (const char* env = std::getenv("DUNKL_PRECISION_BITS"); env != nullptr && *env != '\0') {
      values_["precision_bits"] = {env, "environment DUNKL_PRECISION_BITS"};
    }
  }

  static bool known(const std::string& key) {
    for (const auto& k : config_keys()) {
      if (key == k.name) return true;
    }
    return false;
  }

  void load(std::istream& in, const std::string& origin) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      const std::string where = origin + ":" + std::to_string(line_no);
      if (eq == std::string::npos) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ConfigError(where + ": expected 'key = value'");
      }
      const std::string key = strip(line.substr(0, eq));
      const std::string value = strip(line.substr(eq + 1));
      if (!known(key)) throw ConfigError(where + ": unknown key '" + key + "'");
      set(key, value, where);
    }
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    load(in, path);
  }

  void set(const std::string& key, const std::string& value, const std::string& origin) {
    if (!known(key)) throw ConfigError(origin + ": unknown key '" + key + "'");
    values_[key] = {value, origin};
  }

  const std::string& value(const std::string& key) const { return values_.at(key).first; }
  const std::string& origin(const std::string& key) const { return values_.at(key).second; }
  bool is_default(const std::string& key) const { return origin(key) == "default"; }

  const std::map<std::string, std::pair<std::string, std::string>>& entries() const {
    return values_;
  }

 private:
  static std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::pair<std::string, std::string>> values_;
};

struct ExperimentConfig {
  HighReal alpha;
  double p = 2.0;
  unsigned precision_bits = kDefaultPrecisionBits;
  std::size_t trunc_degree = 4096;
  HighReal r_min;
  HighReal r_max;
  std::size_t r_points = 256;
  std::uint64_t seed = 1;
  std::string output = "-";
  ConfigSource source;

  std::string text(const std::string& key) const { return source.value(key); }

  std::size_t count(const std::string& key) const {
    const std::string& v = source.value(key);
    try {
      std::size_t used = 0;
      const unsigned long long x = std::stoull(v, &used);
      if (used != v.size() || v.front() == '-') throw std::invalid_argument(v);
      return static_cast<std::size_t>(x);
    } catch (const std::exception&) {
      throw ConfigError(source.origin(key) + ": field '" + key +
                        "': expected a nonnegative integer, got '" + v + "'");
    }
  }

  HighReal real(const std::string& key) const {
    const std::string& v = source.value(key);
    try {
      return parse_high_real(v);
    } catch (const FormatError&) {
      throw ConfigError(source.origin(key) + ": field '" + key + "': not a number: '" + v + "'");
    }
  }

  double exponent(const std::string& key) const {
    const std::string& v = source.value(key);
    if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError(source.origin(key) + ": field '" + key + "': not a number: '" + v + "'");
    }
  }

  /// `# config: key=value ...` in key order, excluding output paths so that
  /// identical experiments written to different files stay byte-identical.
  std::string banner(const std::string& subcommand) const {
    std::ostringstream out;
    out << "# config: subcommand=" << subcommand;
    for (const auto& [key, entry] : source.entries()) {
      if (key == "output" || key == "hits" || key == "cstar" || key == "series" || key == "plan" ||
          key == "input") {
        continue;
      }
      out << ' ' << key << '=' << entry.first;
    }
    return out.str();
  }
};

/// Converts and validates; sets the process precision first so every
/// HighReal field is parsed at the configured width.
inline ExperimentConfig resolve_config(const ConfigSource& src) {
  ExperimentConfig cfg;
  cfg.source = src;
  const auto fail = [&](const std::string& key, const std::string& why) {
    throw ConfigError(src.origin(key) + ": field '" + key + "': " + why);
  };
  const std::size_t bits = cfg.count("precision_bits");
  if (bits < 64) fail("precision_bits", "must be >= 64");
  if (bits > 1u << 20) fail("precision_bits", "must be <= 1048576");
  cfg.precision_bits = static_cast<unsigned>(bits);
  set_precision_bits(cfg.precision_bits);

  cfg.alpha = cfg.real("alpha");
  if (!(cfg.alpha > HighReal(-0.5) + HighReal("1e-12"))) fail("alpha", "must exceed -1/2");
  cfg.p = cfg.exponent("p");
  if (!(cfg.p >= 1.0)) fail("p", "must lie in [1, inf]");
  cfg.trunc_degree = cfg.count("trunc_degree");
  if (cfg.trunc_degree < 1) fail("trunc_degree", "must be >= 1");
  cfg.r_min = cfg.real("r_min");
  cfg.r_max = cfg.real("r_max");
  if (!(cfg.r_min > 0)) fail("r_min", "must be positive");
  if (!(cfg.r_min < cfg.r_max)) fail("r_max", "must exceed r_min");
  cfg.r_points = cfg.count("r_points");
  if (cfg.r_points < 2) fail("r_points", "must be >= 2");
  cfg.seed = cfg.count("seed");
  cfg.output = cfg.text("output");
  return cfg;
}

/// Uniform random complex coefficients in [-1, 1]^2 for degrees 0..d.
inline std::vector<std::pair<double, double>> random_coefficients(std::mt19937_64& rng,
                                                                  std::size_t degree) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i <= degree; ++i) {
    const double re = u(rng);
    const double im = u(rng);
    out.emplace_back(re, im);
  }
  return out;
}

/// CSV table with a banner line and a header row.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::string& banner, const std::vector<std::string>& columns)
      : out_(out), width_(columns.size()) {
    out_ << banner << '\n';
    row(columns);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw Error("CSV row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
  std::size_t width_;
};

/// Integers below 10^30 print exactly as integers; everything else in
/// round-trip scientific notation.
inline std::string csv_number(const HighReal& x) {
  if (x == 0) return "0";
  if (boost::multiprecision::abs(x) < HighReal("1e30") && boost::multiprecision::trunc(x) == x) {
    return x.str(0, std::ios_base::fixed).substr(0, x.str(0, std::ios_base::fixed).find('.'));
  }
  return to_decimal(x);
}

/// Fixed 20 significant digits for measured quantities.
inline std::string csv_value(const HighReal& x) { return to_decimal(x, 20); }

}  // namespace dunkl
