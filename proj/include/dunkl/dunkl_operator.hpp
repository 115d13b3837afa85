#pragma once

// Dunkl weights d_n(alpha), the operator Lambda_alpha on truncated series
// (coefficient-shift form and the differential-difference form), its right
// inverse S, and general weighted backward shifts B_(a_n).
//
// Lambda_alpha acts on monomials as z^n -> (d_n / d_{n-1}) z^{n-1}, so it is
// the weighted backward shift with a_n = d_n / d_{n-1}:
//   a_n = n              for even n,
//   a_n = n + 2 alpha + 1 for odd n.
// alpha = -1/2 recovers differentiation (a_n = n, d_n = n!).

#include "dunkl/numeric.hpp"
#include "dunkl/series.hpp"

#include <concepts>
#include <memory>

namespace dunkl {

/// Smallest admissible distance of alpha from the boundary -1/2.
inline HighReal alpha_margin() { return HighReal("1e-12"); }

inline void validate_alpha(const HighReal& alpha) {
  if (!(alpha > HighReal(-0.5) + alpha_margin())) {
    throw DomainError("alpha must satisfy alpha > -1/2 (+1e-12)");
  }
}

/// d_0..d_N for one alpha, built by the product recurrence d_n = a_n d_{n-1}.
class DunklWeights {
 public:
  DunklWeights(HighReal alpha, std::size_t trunc_degree) : alpha_(std::move(alpha)) {
    validate_alpha(alpha_);
    const HighReal odd_shift = 2 * alpha_ + 1;
    ratio_.reserve(trunc_degree + 1);
    value_.reserve(trunc_degree + 1);
    log_value_.reserve(trunc_degree + 1);
    ratio_.emplace_back(0);  // a_0 unused
    value_.emplace_back(1);
    log_value_.emplace_back(0);
    log_ld_.push_back(0.0L);
    for (std::size_t n = 1; n <= trunc_degree; ++n) {
      HighReal a = (n % 2 == 0) ? HighReal(n) : HighReal(n) + odd_shift;
      value_.push_back(value_.back() * a);
      log_value_.push_back(boost::multiprecision::log(value_.back()));
      log_ld_.push_back(to_long_double(log_value_.back()));
      ratio_.push_back(std::move(a));
    }
  }

  const HighReal& alpha() const { return alpha_; }
  std::size_t trunc_degree() const { return value_.size() - 1; }

  /// d_n as LogScaled; d_n = 0 for n < 0.
  LogScaled weight(long n) const {
    if (n < 0) return LogScaled::zero();
    check(static_cast<std::size_t>(n));
    return LogScaled::from_log(1, log_value_[static_cast<std::size_t>(n)]);
  }

  const HighReal& value(std::size_t n) const { return value_[check(n)]; }
  const HighReal& log_value(std::size_t n) const { return log_value_[check(n)]; }
  long double log_value_ld(std::size_t n) const { return log_ld_[check(n)]; }

  /// a_n = d_n / d_{n-1}, n >= 1.
  const HighReal& ratio(std::size_t n) const {
    if (n == 0) throw RangeError("ratio weights start at n = 1");
    return ratio_[check(n)];
  }

  // ShiftWeights interface.
  Complex product(std::size_t n) const { return Complex(value(n)); }
  const HighReal& log_abs_product(std::size_t n) const { return log_value(n); }
  long double log_abs_product_ld(std::size_t n) const { return log_value_ld(n); }

 private:
  std::size_t check(std::size_t n) const {
    if (n >= value_.size()) throw RangeError("weight index beyond trunc_degree");
    return n;
  }

  HighReal alpha_;
  std::vector<HighReal> ratio_;
  std::vector<HighReal> value_;
  std::vector<HighReal> log_value_;
  std::vector<long double> log_ld_;
};

/// ln d_n(alpha) from the Gamma closed form
///   d_n = 2^n [n/2]! Gamma([(n+1)/2] + alpha + 1) / Gamma(alpha + 1).
inline HighReal closed_form_log_weight(std::size_t n, const HighReal& alpha) {
  validate_alpha(alpha);
  const HighReal half_floor(n / 2);
  const HighReal half_ceil((n + 1) / 2);
  return HighReal(n) * boost::multiprecision::log(HighReal(2)) + log_gamma(half_floor + 1) +
         log_gamma(half_ceil + alpha + 1) - log_gamma(alpha + 1);
}

/// Weights are cached per (alpha, trunc_degree, precision).
inline std::shared_ptr<const DunklWeights> shared_weights(const HighReal& alpha,
                                                          std::size_t trunc_degree) {
  static std::mutex mu;
  static std::map<std::tuple<std::string, std::size_t, unsigned>,
                  std::shared_ptr<const DunklWeights>>
      cache;
  auto key = std::make_tuple(to_decimal(alpha), trunc_degree, precision_bits());
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto w = std::make_shared<const DunklWeights>(alpha, trunc_degree);
  cache.emplace(std::move(key), w);
  return w;
}

// ---------------------------------------------------------------------------
// Weighted backward shifts

/// Nonzero weights a_1..a_N with cached partial products prod_{k<=n} a_k.
class WeightedShift {
 public:
  explicit WeightedShift(std::vector<Complex> weights) {
    product_.emplace_back(1);
    log_abs_.emplace_back(0);
    log_ld_.push_back(0.0L);
    weights_.emplace_back(0);
    for (auto& a : weights) {
      if (a.is_zero()) throw DomainError("weighted shift weights must be nonzero");
      product_.push_back(product_.back() * a);
      log_abs_.push_back(log_abs_.back() + boost::multiprecision::log(abs(a)));
      log_ld_.push_back(to_long_double(log_abs_.back()));
      weights_.push_back(std::move(a));
    }
  }

  static WeightedShift constant(std::size_t n, const Complex& c = Complex(1.0)) {
    return WeightedShift(std::vector<Complex>(n, c));
  }

  /// a_n = n: the differentiation operator D, i.e. the alpha -> -1/2 limit.
  static WeightedShift differentiation(std::size_t n) {
    std::vector<Complex> a;
    a.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) a.emplace_back(HighReal(k));
    return WeightedShift(std::move(a));
  }

  static WeightedShift from_dunkl(const DunklWeights& w) {
    std::vector<Complex> a;
    a.reserve(w.trunc_degree());
    for (std::size_t k = 1; k <= w.trunc_degree(); ++k) a.emplace_back(w.ratio(k));
    return WeightedShift(std::move(a));
  }

  std::size_t trunc_degree() const { return product_.size() - 1; }

  const Complex& weight(std::size_t n) const {
    if (n == 0 || n >= weights_.size()) throw RangeError("shift weight index out of range");
    return weights_[n];
  }

  Complex product(std::size_t n) const { return product_.at(n); }
  const HighReal& log_abs_product(std::size_t n) const { return log_abs_.at(n); }
  long double log_abs_product_ld(std::size_t n) const { return log_ld_.at(n); }

  /// max_n |a_n|^{1/n} over the stored range; B_(a_n) is continuous on H(C)
  /// exactly when this stays bounded as N grows.
  HighReal continuity_bound() const {
    HighReal best = 0;
    for (std::size_t n = 1; n < weights_.size(); ++n) {
      HighReal g = boost::multiprecision::exp(boost::multiprecision::log(abs(weights_[n])) /
                                              HighReal(n));
      if (g > best) best = g;
    }
    return best;
  }

 private:
  std::vector<Complex> weights_;
  std::vector<Complex> product_;
  std::vector<HighReal> log_abs_;
  std::vector<long double> log_ld_;
};

template <class W>
concept ShiftWeights = requires(const W& w, std::size_t n) {
  { w.trunc_degree() } -> std::convertible_to<std::size_t>;
  { w.product(n) } -> std::convertible_to<Complex>;
  { w.log_abs_product(n) } -> std::convertible_to<HighReal>;
  { w.log_abs_product_ld(n) } -> std::convertible_to<long double>;
};

// ---------------------------------------------------------------------------
// Operator actions

/// B^k f for a general weighted shift: c_n -> c_{n+k} P_{n+k} / P_n with
/// P_n = prod_{k<=n} a_k; the top k coefficients become 0.
template <ShiftWeights W>
TruncatedSeries apply_shift(const TruncatedSeries& f, const W& w, std::size_t k) {
  const std::size_t N = f.trunc_degree();
  if (w.trunc_degree() < N) throw RangeError("weights shorter than the series");
  std::vector<Complex> out(f.size());
  if (k > N) return TruncatedSeries(std::move(out));
  for (std::size_t n = 0; n + k <= N; ++n) {
    const Complex& c = f[n + k];
    if (c.is_zero()) continue;
    out[n] = c * (w.product(n + k) / w.product(n));
  }
  return TruncatedSeries(std::move(out));
}

/// Lambda_alpha^k f: c_n -> c_{n+k} d_{n+k} / d_n.
inline TruncatedSeries apply_dunkl(const TruncatedSeries& f, const DunklWeights& w,
                                   std::size_t k) {
  const std::size_t N = f.trunc_degree();
  if (w.trunc_degree() < N) throw RangeError("weights shorter than the series");
  std::vector<Complex> out(f.size());
  if (k > N) return TruncatedSeries(std::move(out));
  for (std::size_t n = 0; n + k <= N; ++n) {
    const Complex& c = f[n + k];
    if (c.is_zero()) continue;
    out[n] = c * (w.value(n + k) / w.value(n));
  }
  return TruncatedSeries(std::move(out));
}

/// f'(z) + (2 alpha + 1) (f(z) - f(-z)) / (2z), coefficientwise:
///   c'_n = (n+1) c_{n+1} + (2 alpha + 1) c_{n+1} [n+1 odd].
/// Computed without the weight tables.
inline TruncatedSeries apply_dunkl_direct(const TruncatedSeries& f, const HighReal& alpha) {
  validate_alpha(alpha);
  const HighReal odd_shift = 2 * alpha + 1;
  std::vector<Complex> out(f.size());
  for (std::size_t n = 0; n + 1 < f.size(); ++n) {
    const Complex& c = f[n + 1];
    if (c.is_zero()) continue;
    HighReal factor(n + 1);
    if ((n + 1) % 2 == 1) factor += odd_shift;
    out[n] = c * factor;
  }
  return TruncatedSeries(std::move(out));
}

inline TruncatedSeries apply_dunkl_direct(const TruncatedSeries& f, const DunklWeights& w) {
  return apply_dunkl_direct(f, w.alpha());
}

/// S^n f with S z^k = (d_k / d_{k+1}) z^{k+1}; Lambda^n S^n f = f.
inline TruncatedSeries right_inverse(const TruncatedSeries& f, const DunklWeights& w,
                                     std::size_t n) {
  const long deg = f.degree();
  const std::size_t N = f.trunc_degree();
  if (deg >= 0 && static_cast<std::size_t>(deg) + n > N) {
    throw RangeError("right_inverse: degree(f) + n exceeds trunc_degree");
  }
  std::vector<Complex> out(f.size());
  for (long k = 0; k <= deg; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const Complex& c = f[idx];
    if (c.is_zero()) continue;
    out[idx + n] = c * (w.value(idx) / w.value(idx + n));
  }
  return TruncatedSeries(std::move(out));
}

// ---------------------------------------------------------------------------
// Hypercyclicity diagnostics for B_(a_n)

struct ShiftDiagnostic {
  std::vector<HighReal> growth;       // g_n = |prod_{k<=n} a_k|^{1/n}, n = 1..N
  std::vector<HighReal> running_max;  // max_{j<=n} g_j
};

/// B_(a_n) is hypercyclic iff limsup g_n = infinity; the caller inspects
/// the returned sequence for divergence.
template <ShiftWeights W>
ShiftDiagnostic shift_hypercyclicity_diagnostic(const W& s, std::size_t horizon) {
  if (horizon > s.trunc_degree()) throw RangeError("horizon beyond stored weights");
  ShiftDiagnostic out;
  out.growth.reserve(horizon);
  out.running_max.reserve(horizon);
  for (std::size_t n = 1; n <= horizon; ++n) {
    out.growth.push_back(boost::multiprecision::exp(s.log_abs_product(n) / HighReal(n)));
    if (out.running_max.empty() || out.growth.back() > out.running_max.back()) {
      out.running_max.push_back(out.growth.back());
    } else {
      out.running_max.push_back(out.running_max.back());
    }
  }
  return out;
}

struct CriticalRate {
  LogScaled value;       // mu(r)
  std::size_t argmax = 0;
};

/// mu(r) = max_{0<=n<=N} r^n / |prod_{k<=n} a_k|. Values within
/// 2^{16-bits} (relative, in the log) of the running maximum count as ties,
/// and ties resolve to the smallest index.
template <ShiftWeights W>
CriticalRate critical_rate_mu(const W& s, const HighReal& r) {
  if (r < 0) throw DomainError("critical_rate_mu needs r >= 0");
  CriticalRate best{LogScaled::from_log(1, HighReal(0)), 0};
  if (r == 0) return best;
  const HighReal log_r = boost::multiprecision::log(r);
  const HighReal tie = precision_unit(16);
  for (std::size_t n = 1; n <= s.trunc_degree(); ++n) {
    HighReal v = HighReal(n) * log_r - s.log_abs_product(n);
    const HighReal margin = tie * std::max(HighReal(1), boost::multiprecision::abs(best.value.log_mag));
    if (v > best.value.log_mag + margin) {
      best.value.log_mag = std::move(v);
      best.argmax = n;
    }
  }
  return best;
}

}  // namespace dunkl
