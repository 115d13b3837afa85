#pragma once

// Critical growth rates e^r / r^a, the weight asymptotics
//   d_n(alpha) ~ (n + alpha + 1)^{n + alpha + 1} e^{-(n + alpha + 1)},
// the series bound
//   sum_n r^{qn} / d_n^q <= C (e^r / r^{alpha + 1/2 + 1/(2p)})^q,
// the functions E_a(z; theta, beta) = sum z^n / ((n + theta)^beta Gamma(a n + 1))
// with their leading large-r asymptotics, and growth profiles of series.

#include "dunkl/dunkl_operator.hpp"
#include "dunkl/means.hpp"
#include "dunkl/numeric.hpp"
#include "dunkl/series.hpp"

#include <functional>
#include <optional>
#include <string>

namespace dunkl {

enum class EnvelopeKind { to_infinity, to_zero, constant };

/// Positive function of r multiplying a critical rate: phi -> inf
/// (permissible growth), psi -> 0 (impossible growth) or a constant C.
class RateEnvelope {
 public:
  using Fn = std::function<HighReal(const HighReal&)>;

  RateEnvelope(EnvelopeKind kind, std::string name, Fn fn)
      : kind_(kind), name_(std::move(name)), fn_(std::move(fn)) {}

  /// phi(r) = ln(e + r): nondecreasing, unbounded, phi(0) = 1.
  static RateEnvelope log_growth() {
    return {EnvelopeKind::to_infinity, "log(e+r)",
            [](const HighReal& r) { return boost::multiprecision::log(euler_e() + r); }};
  }

  /// psi(r) = 1 / ln(e + r).
  static RateEnvelope inverse_log() {
    return {EnvelopeKind::to_zero, "1/log(e+r)",
            [](const HighReal& r) { return 1 / boost::multiprecision::log(euler_e() + r); }};
  }

  static RateEnvelope constant(const HighReal& c) {
    if (!(c > 0)) throw DomainError("constant envelope must be positive");
    return {EnvelopeKind::constant, "const " + to_decimal(c, 12),
            [c](const HighReal&) { return c; }};
  }

  EnvelopeKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  HighReal operator()(const HighReal& r) const { return fn_(r); }

  /// Positivity everywhere on the grid, and the monotonicity its kind asks for.
  void validate_on(std::span<const HighReal> grid) const {
    HighReal prev;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      HighReal v = fn_(grid[i]);
      if (!(v > 0)) throw DomainError("envelope " + name_ + " is not positive on the grid");
      if (i > 0) {
        if (kind_ == EnvelopeKind::to_infinity && v < prev) {
          throw DomainError("envelope " + name_ + " decreases on the grid");
        }
        if (kind_ == EnvelopeKind::to_zero && v > prev) {
          throw DomainError("envelope " + name_ + " increases on the grid");
        }
      }
      prev = std::move(v);
    }
  }

 private:
  EnvelopeKind kind_;
  std::string name_;
  Fn fn_;
};

/// n points log-spaced over [r_min, r_max], endpoints included.
inline std::vector<HighReal> log_spaced_grid(const HighReal& r_min, const HighReal& r_max,
                                             std::size_t points) {
  if (!(r_min > 0) || !(r_max > r_min)) throw DomainError("grid needs 0 < r_min < r_max");
  if (points < 2) throw DomainError("grid needs at least 2 points");
  std::vector<HighReal> grid;
  grid.reserve(points);
  const HighReal lo = boost::multiprecision::log(r_min);
  const HighReal step = (boost::multiprecision::log(r_max) - lo) / HighReal(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    grid.push_back(boost::multiprecision::exp(lo + step * HighReal(i)));
  }
  grid.front() = r_min;
  grid.back() = r_max;
  return grid;
}

/// Default r-grid: 256 log-spaced points on [1e-2, 400].
inline std::vector<HighReal> standard_grid() {
  return log_spaced_grid(HighReal("0.01"), HighReal(400), 256);
}

enum class RateKind { hc, fhc_upper, fhc_lower };

/// Exponent a of the critical rate e^r / r^a:
///   hc        -> alpha + 1
///   fhc_upper -> alpha + 1/2 + 1/(2 max{2, p})
///   fhc_lower -> alpha + 1/2 + 1/(2 min{2, p})
/// with 1/(2p) = 0 at p = inf.
inline HighReal rate_exponent(double p, const HighReal& alpha, RateKind which) {
  if (!(p >= 1.0)) throw DomainError("rate_exponent needs p >= 1");
  const auto inv_2p = [](double x) { return std::isinf(x) ? HighReal(0) : 1 / (2 * HighReal(x)); };
  switch (which) {
    case RateKind::hc:
      return alpha + 1;
    case RateKind::fhc_upper:
      return alpha + HighReal(0.5) + inv_2p(std::max(2.0, p));
    case RateKind::fhc_lower:
      return alpha + HighReal(0.5) + inv_2p(std::min(2.0, p));
  }
  throw DomainError("unknown rate kind");
}

/// d_n(alpha) e^{n+alpha+1} / (n+alpha+1)^{n+alpha+1}, evaluated in the log domain.
inline HighReal lemma1_ratio(std::size_t n, const DunklWeights& w) {
  const HighReal x = HighReal(n) + w.alpha() + 1;
  return boost::multiprecision::exp(w.log_value(n) + x - x * boost::multiprecision::log(x));
}

/// Partial sums of E_a(z; theta, beta) until 8 consecutive next terms fall
/// below tol * |partial sum|.
inline Complex mittag_leffler(const Complex& z, const HighReal& ml_alpha, const HighReal& theta,
                              const HighReal& beta, const HighReal& tol) {
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  if (!(ml_alpha > 0 && ml_alpha <= 2)) throw DomainError("mittag_leffler needs 0 < alpha <= 2");
  if (!(theta > 0)) throw DomainError("mittag_leffler needs theta > 0");
  if (!(tol > 0)) throw DomainError("mittag_leffler needs tol > 0");
  constexpr std::size_t kMaxTerms = 1'000'000;
  constexpr int kQuietRun = 8;

  const bool integer_alpha = ml_alpha == 1 || ml_alpha == 2;
  const int step = integer_alpha ? ml_alpha.convert_to<int>() : 0;
  const HighReal tol2 = tol * tol;

  // base_n = z^n / Gamma(a n + 1); term_n = base_n (n + theta)^{-beta}
  const auto beta_factor = [&](std::size_t n) -> HighReal {
    if (beta == 0) return HighReal(1);
    const HighReal x = HighReal(n) + theta;
    if (beta == 1) return 1 / x;
    return exp(-beta * log(x));
  };

  Complex base(1.0);
  Complex sum = base * beta_factor(0);
  Complex power(1.0);
  int quiet = 0;
  for (std::size_t n = 1; n < kMaxTerms; ++n) {
    if (integer_alpha) {
      base = base * z;
      for (int j = 1; j <= step; ++j) {
        base /= HighReal(static_cast<long>(step) * static_cast<long>(n - 1) + j);
      }
    } else {
      power = power * z;
      base = power * exp(-log_gamma(ml_alpha * HighReal(n) + 1));
    }
    const Complex term = base * beta_factor(n);
    if (norm(term) < tol2 * norm(sum)) {
      if (++quiet >= kQuietRun) return sum + term;
    } else {
      quiet = 0;
    }
    sum += term;
  }
  throw DomainError("mittag_leffler did not converge within 10^6 terms");
}

/// Leading term a^{beta-1} r^{-beta/a} e^{r^{1/a}} of E_a(r; theta, beta),
/// 0 < a <= 2, r -> +inf (independent of theta).
inline HighReal barnes_asymptotic(const HighReal& r, const HighReal& ml_alpha,
                                  const HighReal& /*theta*/, const HighReal& beta) {
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  if (!(r > 0)) throw DomainError("barnes_asymptotic needs r > 0");
  if (!(ml_alpha > 0 && ml_alpha <= 2)) throw DomainError("barnes_asymptotic needs 0 < alpha <= 2");
  const HighReal log_r = log(r);
  return exp((beta - 1) * log(ml_alpha) - beta / ml_alpha * log_r + exp(log_r / ml_alpha));
}

struct Lemma3Value {
  HighReal ratio;
  std::size_t terms_used = 0;
};

/// [sum_{n<=N} (r^n / d_n)^q] / [e^r / r^{alpha + 1/2 + 1/(2p)}]^q with p the
/// conjugate of q. Without an explicit N the sum stops once past the peak
/// term and below 2^{-bits} (times a safety factor) of the largest term.
inline Lemma3Value lemma3_ratio(const HighReal& r, double q, const DunklWeights& w,
                                std::optional<std::size_t> n_terms = std::nullopt) {
  using boost::multiprecision::log;
  if (!(q >= 1.0 && q <= 2.0)) throw DomainError("lemma3_ratio needs 1 <= q <= 2");
  if (!(r > 0)) throw DomainError("lemma3_ratio needs r > 0");
  const double p = conjugate_exponent(q);
  const HighReal a = w.alpha() + HighReal(0.5) + (std::isinf(p) ? HighReal(0) : 1 / (2 * HighReal(p)));
  const HighReal qh(q);
  const HighReal log_r = log(r);
  const long double log_r_ld = to_long_double(log_r);
  const long double drop = 0.6931471805599453L * static_cast<long double>(precision_bits()) + 16.0L;

  std::vector<LogScaled> terms;
  long double peak = -std::numeric_limits<long double>::infinity();
  std::size_t n = 0;
  for (;; ++n) {
    if (n_terms && n > *n_terms) break;
    if (n > w.trunc_degree()) {
      if (n_terms) throw RangeError("lemma3_ratio: N_terms beyond weight table");
      throw RangeError("lemma3_ratio: series not converged within weight table");
    }
    const long double x = static_cast<long double>(q) *
                          (static_cast<long double>(n) * log_r_ld - w.log_value_ld(n));
    if (!n_terms && x < peak - drop && n > 0) break;
    peak = std::max(peak, x);
    terms.push_back(LogScaled::from_log(1, qh * (HighReal(n) * log_r - w.log_value(n))));
  }
  const LogScaled sum = log_scaled_sum(terms);
  const HighReal log_rhs = qh * (r - a * log_r);
  return {boost::multiprecision::exp(sum.log_mag - log_rhs), terms.size()};
}

struct GrowthProfile {
  std::vector<HighReal> r;
  std::vector<HighReal> ratio;  // M_p(f,r) r^a / (envelope(r) e^r)
  HighReal exponent;
  double p = kInfinity;
  std::optional<std::size_t> satisfied_from;  // ratio <= 1 on [index, end)
};

inline std::optional<std::size_t> satisfied_from(std::span<const HighReal> ratio) {
  std::optional<std::size_t> from;
  for (std::size_t i = ratio.size(); i-- > 0;) {
    if (ratio[i] > 1) break;
    from = i;
  }
  return from;
}

inline GrowthProfile growth_profile(const MeanEvaluator& means, double p, const HighReal& a,
                                    const RateEnvelope& env, std::span<const HighReal> grid) {
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  GrowthProfile out;
  out.exponent = a;
  out.p = p;
  const auto mp = MeanParams::for_exponent(p);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw DomainError("growth_profile grid must be positive and increasing");
    }
    const HighReal& r = grid[i];
    const HighReal m = means(r, mp).value;
    out.r.push_back(r);
    out.ratio.push_back(m == 0 ? HighReal(0) : exp(log(m) + a * log(r) - r) / env(r));
  }
  out.satisfied_from = satisfied_from(out.ratio);
  return out;
}

inline GrowthProfile growth_profile(const TruncatedSeries& f, double p, const HighReal& a,
                                    const RateEnvelope& env, std::span<const HighReal> grid) {
  return growth_profile(MeanEvaluator(f), p, a, env, grid);
}

}  // namespace dunkl
