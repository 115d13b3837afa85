// Experiment runner: every verifier and builder as a subcommand writing CSV.
//
//   dunkl_cli [--config FILE] [--key value ...] <subcommand>
//
// Exit codes: 0 success, 1 invalid configuration or input, 2 infeasible
// construction, 3 verification failure.

#include "dunkl/config.hpp"
#include "dunkl/dunkl.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>

namespace {

using namespace dunkl;

constexpr int kExitInvalid = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitVerification = 3;

class Infeasible : public Error {
 public:
  using Error::Error;
};

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream* stream = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file = std::make_unique<std::ofstream>(path);
    if (!*file) throw ConfigError("cannot open output '" + path + "'");
    stream = file.get();
  }
  std::ostream& operator*() { return *stream; }
};

std::string fmt_double(double x) {
  if (std::isinf(x)) return "inf";
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

std::vector<HighReal> config_grid(const ExperimentConfig& cfg) {
  return log_spaced_grid(cfg.r_min, cfg.r_max, cfg.r_points);
}

SeriesFile load_series(const std::string& path) {
  if (path.empty()) throw ConfigError("field 'input': a series file is required");
  std::ifstream in(path);
  if (!in) throw ConfigError("field 'input': cannot open '" + path + "'");
  return read_series(in);
}

PlanFile load_plan(const std::string& path) {
  if (path.empty()) throw ConfigError("field 'plan': a plan file is required");
  std::ifstream in(path);
  if (!in) throw ConfigError("field 'plan': cannot open '" + path + "'");
  return read_plan(in);
}

/// The series' own alpha unless alpha was configured explicitly; the
/// returned config carries it so the banner reports what was used.
ExperimentConfig with_series_alpha(const ExperimentConfig& cfg, const SeriesFile& file) {
  ExperimentConfig out = cfg;
  if (cfg.source.is_default("alpha")) {
    out.alpha = file.alpha;
    out.source.set("alpha", to_decimal(file.alpha, 20), "series file");
  }
  return out;
}

TruncatedSeries random_polynomial(std::mt19937_64& rng, std::size_t degree, std::size_t N) {
  TruncatedSeries f(N);
  const auto c = random_coefficients(rng, std::min(degree, N));
  for (std::size_t i = 0; i < c.size(); ++i) f.set(i, Complex(c[i].first, c[i].second));
  return f;
}

// ---------------------------------------------------------------------------

int run_weights(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.count("n");
  const DunklWeights w(cfg.alpha, n);
  Output out(cfg.output);
  CsvWriter csv(*out, cfg.banner("weights"), {"n", "d_n", "log_d_n"});
  for (std::size_t i = 0; i <= n; ++i) {
    csv.row({std::to_string(i), csv_number(w.value(i)), csv_value(w.log_value(i))});
  }
  return 0;
}

int run_apply(const ExperimentConfig& base) {
  const SeriesFile file = load_series(base.text("input"));
  const ExperimentConfig cfg = with_series_alpha(base, file);
  const HighReal& alpha = cfg.alpha;
  const DunklWeights w(alpha, file.series.trunc_degree());
  const TruncatedSeries g = apply_dunkl(file.series, w, cfg.count("k"));
  Output out(cfg.output);
  write_series(*out, g, alpha);
  return 0;
}

int run_means(const ExperimentConfig& cfg) {
  TruncatedSeries f;
  if (!cfg.text("input").empty()) {
    f = load_series(cfg.text("input")).series;
  } else {
    std::mt19937_64 rng(cfg.seed);
    f = random_polynomial(rng, cfg.count("degree"), cfg.count("degree"));
  }
  const MeanEvaluator means(f);
  const auto mp = MeanParams::for_exponent(cfg.p);
  Output out(cfg.output);
  CsvWriter csv(*out, cfg.banner("means"), {"r", "p", "mean", "richardson_err"});
  for (const auto& r : config_grid(cfg)) {
    const MeanResult m = means(r, mp);
    csv.row({csv_value(r), fmt_double(cfg.p), csv_value(m.value), csv_value(m.richardson_err)});
  }
  return 0;
}

int run_lemma1(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.count("n");
  const DunklWeights w(cfg.alpha, n);
  Output out(cfg.output);
  CsvWriter csv(*out, cfg.banner("verify-lemma1"), {"n", "lemma1_ratio"});
  HighReal lo;
  HighReal hi;
  bool ok = true;
  for (std::size_t i = 0; i <= n; ++i) {
    const HighReal v = lemma1_ratio(i, w);
    csv.row({std::to_string(i), csv_value(v)});
    if (!(v > 0) || boost::multiprecision::isinf(v)) ok = false;
    if (i == 0 || v < lo) lo = v;
    if (i == 0 || v > hi) hi = v;
  }
  // two-sided boundedness: the band may not be wider than a factor 100
  if (!ok || hi > 100 * lo) {
    std::cerr << "verify-lemma1: ratio band [" << to_decimal(lo, 6) << ", " << to_decimal(hi, 6)
              << "] is not two-sided bounded\n";
    return kExitVerification;
  }
  return 0;
}

int run_lemma3(const ExperimentConfig& cfg) {
  const double q = cfg.exponent("q");
  if (!(q >= 1.0 && q <= 2.0)) throw ConfigError(cfg.source.origin("q") + ": field 'q': must lie in [1, 2]");
  const DunklWeights w(cfg.alpha, cfg.trunc_degree);
  Output out(cfg.output);
  CsvWriter csv(*out, cfg.banner("verify-lemma3"), {"r", "q", "alpha", "lemma3_ratio"});
  bool ok = true;
  for (const auto& r : config_grid(cfg)) {
    const HighReal v = lemma3_ratio(r, q, w).ratio;
    if (boost::multiprecision::isinf(v) || boost::multiprecision::isnan(v)) ok = false;
    csv.row({csv_value(r), fmt_double(q), to_decimal(cfg.alpha), csv_value(v)});
  }
  return ok ? 0 : kExitVerification;
}

int run_hy(const ExperimentConfig& cfg) {
  if (!(cfg.p > 1.0 && cfg.p <= 2.0)) {
    throw ConfigError(cfg.source.origin("p") + ": field 'p': verify-hy needs 1 < p <= 2");
  }
  std::mt19937_64 rng(cfg.seed);
  const auto mp = MeanParams::for_exponent(cfg.p);
  const std::size_t deg = cfg.count("degree");
  Output out(cfg.output);
  CsvWriter csv(*out, cfg.banner("verify-hy"), {"poly", "r", "p", "lhs", "rhs", "margin", "tolerance"});
  bool ok = true;
  const auto grid = config_grid(cfg);
  for (std::size_t i = 0; i < cfg.count("count"); ++i) {
    const TruncatedSeries f = random_polynomial(rng, deg, deg);
    for (const auto& r : grid) {
      const auto hy = hausdorff_young_check(f, r, mp);
      if (hy.margin < -HighReal("1e-6") * hy.rhs) ok = false;
      csv.row({std::to_string(i), csv_value(r), fmt_double(cfg.p), csv_value(hy.lhs),
               csv_value(hy.rhs), csv_value(hy.margin), csv_value(hy.tolerance)});
    }
  }
  return ok ? 0 : kExitVerification;
}

int run_barnes(const ExperimentConfig& cfg) {
  const HighReal a = cfg.real("ml_alpha");
  const HighReal theta = cfg.real("theta");
  const HighReal beta = cfg.real("beta");
  Output out(cfg.output);
  CsvWriter csv(*out, cfg.banner("verify-barnes"), {"r", "mittag_leffler", "barnes", "ratio"});
  bool ok = true;
  for (const auto& r : config_grid(cfg)) {
    const Complex ml = mittag_leffler(Complex(r), a, theta, beta, precision_unit(8));
    const HighReal asym = barnes_asymptotic(r, a, theta, beta);
    const HighReal ratio = ml.re / asym;
    if (r >= 10000 && (ratio < HighReal("0.95") || ratio > HighReal("1.05"))) ok = false;
    csv.row({csv_value(r), csv_value(ml.re), csv_value(asym), csv_value(ratio)});
  }
  return ok ? 0 : kExitVerification;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  body(out);
}

int run_build_hc(const ExperimentConfig& cfg) {
  const DunklWeights w(cfg.alpha, cfg.trunc_degree);
  HypercyclicConfig hc;
  hc.grid = config_grid(cfg);
  hc.orbit_radius = cfg.real("radius");
  HypercyclicBuild build;
  try {
    build = build_hypercyclic(w, RateEnvelope::log_growth(), cfg.count("targets"), hc);
  } catch (const TruncationError& e) {
    throw Infeasible(e.what());
  }
  write_file(cfg.text("series"), [&](std::ostream& o) { write_series(o, build.f, cfg.alpha); });
  write_file(cfg.text("plan"), [&](std::ostream& o) { write_plan(o, build.plan); });
  Output out(cfg.output);
  CsvWriter csv(*out, cfg.banner("build-hc"), {"k", "target_index", "target", "position", "budget", "block_norm"});
  const auto& plan = build.plan;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    csv.row({std::to_string(k + 1), std::to_string(plan.target_indices[k]), "\"" + format_poly(plan.targets[k]) + "\"",
             std::to_string(plan.positions[k]), csv_value(plan.budgets[k]), to_decimal(plan.block_norms[k], 6)});
  }
  return 0;
}

int run_build_fhc(const ExperimentConfig& cfg) {
  const DunklWeights w(cfg.alpha, cfg.trunc_degree);
  FrequentConfig fc;
  fc.grid = config_grid(cfg);
  fc.block_width = cfg.count("block_width");
  fc.budget = cfg.real("budget");
  FrequentBuild build;
  try {
    build = build_frequently_hypercyclic(w, cfg.p, RateEnvelope::log_growth(), cfg.count("targets"), fc);
  } catch (const DomainError& e) {
    throw Infeasible(e.what());
  }
  write_file(cfg.text("series"), [&](std::ostream& o) { write_series(o, build.f, cfg.alpha); });
  write_file(cfg.text("plan"), [&](std::ostream& o) { write_plan(o, build.schedule); });
  Output out(cfg.output);
  CsvWriter csv(*out, cfg.banner("build-fhc"),
                {"j", "target_index", "target", "offset", "block_width", "placements", "nominal_density"});
  const auto& s = build.schedule;
  for (std::size_t j = 1; j <= s.size(); ++j) {
    csv.row({std::to_string(j), std::to_string(s.target_indices[j - 1]), "\"" + format_poly(s.targets[j - 1]) + "\"",
             std::to_string(s.offset), std::to_string(s.block_width), std::to_string(s.placements(j).size()),
             fmt_double(s.nominal_density(j))});
  }
  return 0;
}

int run_orbit(const ExperimentConfig& base) {
  const SeriesFile file = load_series(base.text("input"));
  const ExperimentConfig cfg = with_series_alpha(base, file);
  const HighReal& alpha = cfg.alpha;
  const TruncatedSeries& f = file.series;
  const DunklWeights w(alpha, f.trunc_degree());
  const std::size_t horizon = std::min(cfg.count("horizon"), f.trunc_degree());
  const OrbitReport orbit = orbit_at_zero(f, w, horizon);
  {
    Output out(cfg.output);
    CsvWriter csv(*out, cfg.banner("orbit"), {"n", "log_abs_orbit"});
    for (std::size_t n = 0; n <= horizon; ++n) {
      const auto& m = orbit.magnitudes[n];
      csv.row({std::to_string(n), m.is_zero() ? "-inf" : csv_value(m.log_mag)});
    }
  }
  bool ok = orbit.cross_check_error <= precision_unit(40);

  if (!cfg.text("plan").empty()) {
    const PlanFile plan = load_plan(cfg.text("plan"));
    if (!plan.hc) throw ConfigError("field 'plan': orbit-hit checks need a hypercyclic (hc) plan");
    const auto report = verify_orbit_hits(f, *plan.hc, w, RateEnvelope::log_growth(), cfg.real("radius"),
                                          cfg.count("samples"));
    write_file(cfg.text("hits"), [&](std::ostream& o) {
      CsvWriter csv(o, cfg.banner("orbit"), {"k", "position", "delta", "budget", "pass"});
      for (const auto& h : report.hits) {
        csv.row({std::to_string(h.k), std::to_string(h.position), to_decimal(h.delta, 12),
                 to_decimal(h.budget, 12), h.pass ? "1" : "0"});
      }
    });
    if (!report.all_pass) {
      for (const auto& h : report.hits) {
        if (!h.pass) {
          std::cerr << "orbit: block " << h.k << " misses its target: delta " << to_decimal(h.delta, 6)
                    << " > budget " << to_decimal(h.budget, 6) << '\n';
        }
      }
      ok = false;
    }
  }

  if (!cfg.text("cstar").empty()) {
    const auto check = thm3b_bound_check(f, w, config_grid(cfg), f.trunc_degree());
    const std::vector<HighReal> r_max = {HighReal(50), HighReal(100), HighReal(200), HighReal(400)};
    const auto windowed = windowed_c_star(check, r_max);
    write_file(cfg.text("cstar"), [&](std::ostream& o) {
      CsvWriter csv(o, cfg.banner("orbit"), {"rmax", "C_star"});
      for (std::size_t i = 0; i < r_max.size(); ++i) {
        csv.row({csv_number(r_max[i]), csv_value(windowed[i])});
      }
    });
    if (!check.per_n) {
      std::cerr << "orbit: Cauchy bound violated at n = " << check.worst_n << '\n';
      ok = false;
    }
  }
  return ok ? 0 : kExitVerification;
}

int run_frequency(const ExperimentConfig& base) {
  const SeriesFile file = load_series(base.text("input"));
  const ExperimentConfig cfg = with_series_alpha(base, file);
  const PlanFile plan = load_plan(cfg.text("plan"));
  if (!plan.fhc) throw ConfigError("field 'plan': frequency needs a frequently hypercyclic (fhc) plan");
  const DunklWeights w(cfg.alpha, file.series.trunc_degree());
  const auto report = frequency_report(file.series, *plan.fhc, w, cfg.count("window"), cfg.real("eps"),
                                       cfg.real("radius"), cfg.count("samples"));
  Output out(cfg.output);
  CsvWriter csv(*out, cfg.banner("frequency"), {"j", "hits", "empirical_density", "nominal_density"});
  for (const auto& t : report) {
    csv.row({std::to_string(t.j), std::to_string(t.hits), fmt_double(t.empirical), fmt_double(t.nominal)});
  }
  return 0;
}

int run_decay(const ExperimentConfig& base) {
  const SeriesFile file = load_series(base.text("input"));
  const ExperimentConfig cfg = with_series_alpha(base, file);
  const double q = cfg.exponent("q");
  if (!(q >= 1.0 && q <= 2.0)) throw ConfigError(cfg.source.origin("q") + ": field 'q': must lie in [1, 2]");
  const DunklWeights w(cfg.alpha, file.series.trunc_degree());
  const std::size_t M = std::min(cfg.count("window"), file.series.trunc_degree());
  const auto report = density_decay_check(file.series, w, q, M);
  Output out(cfg.output);
  CsvWriter csv(*out, cfg.banner("decay"), {"m", "sigma", "event_fraction"});
  for (std::size_t m = 1; m <= M; ++m) {
    csv.row({std::to_string(m), to_decimal(HighReal(report.sigma[m - 1]), 17),
             fmt_double(report.event_fraction[m - 1])});
  }
  return report.bound_holds ? 0 : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dunkl operator toolkit: weights, integral means, growth verifiers and constructions"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");
  std::map<std::string, std::string> overrides;
  for (const auto& key : config_keys()) {
    std::string flag = std::string("--") + key.name;
    std::replace(flag.begin(), flag.end(), '_', '-');
    app.add_option_function<std::string>(
        flag, [&overrides, name = std::string(key.name)](const std::string& v) { overrides[name] = v; },
        std::string(key.help) + " (default " + (*key.fallback ? key.fallback : "none") + ")");
  }

  const std::vector<std::pair<std::string, int (*)(const ExperimentConfig&)>> commands = {
      {"weights", run_weights},         {"apply", run_apply},           {"means", run_means},
      {"verify-lemma1", run_lemma1},    {"verify-lemma3", run_lemma3},  {"verify-hy", run_hy},
      {"verify-barnes", run_barnes},    {"build-hc", run_build_hc},     {"build-fhc", run_build_fhc},
      {"orbit", run_orbit},             {"frequency", run_frequency},   {"decay", run_decay},
  };
  const std::map<std::string, std::string> descriptions = {
      {"weights", "table of d_n(alpha), n = 0..n"},
      {"apply", "Lambda^k of a series file"},
      {"means", "M_p(f, r) over the r-grid"},
      {"verify-lemma1", "d_n e^{n+alpha+1} / (n+alpha+1)^{n+alpha+1}, n = 0..n"},
      {"verify-lemma3", "normalized series sum over the r-grid"},
      {"verify-hy", "Hausdorff-Young margins on random polynomials"},
      {"verify-barnes", "Mittag-Leffler function against its leading asymptotic"},
      {"build-hc", "construct a hypercyclic entire function"},
      {"build-fhc", "construct a frequently hypercyclic entire function"},
      {"orbit", "orbit at 0, orbit hits and windowed C_star"},
      {"frequency", "per-target orbit-hit densities"},
      {"decay", "density-decay sequence sigma_m"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, fn] : commands) subs.push_back(app.add_subcommand(name, descriptions.at(name)));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitInvalid;
  }

  try {
    ConfigSource src;
    if (!config_path.empty()) src.load_file(config_path);
    for (const auto& [key, value] : overrides) src.set(key, value, "command line --" + key);
    const ExperimentConfig cfg = resolve_config(src);
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) return commands[i].second(cfg);
    }
    return kExitInvalid;
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const FormatError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}
