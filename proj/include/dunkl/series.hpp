#pragma once

// Truncated Taylor series of entire functions and their values on circles.

#include "dunkl/fft.hpp"
#include "dunkl/numeric.hpp"

#include <cmath>
#include <complex>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace dunkl {

inline constexpr std::size_t kDefaultTruncDegree = 4096;

/// Coefficients c_0..c_N of f(z) = sum c_n z^n, c_n = f^{(n)}(0)/n!.
class TruncatedSeries {
 public:
  explicit TruncatedSeries(std::size_t trunc_degree = kDefaultTruncDegree)
      : coeffs_(trunc_degree + 1) {}

  explicit TruncatedSeries(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw RangeError("series needs at least one coefficient");
  }

  std::size_t trunc_degree() const { return coeffs_.size() - 1; }
  std::size_t size() const { return coeffs_.size(); }

  /// Largest n with c_n != 0, or -1 for the zero series.
  long degree() const {
    for (std::size_t n = coeffs_.size(); n-- > 0;) {
      if (!coeffs_[n].is_zero()) return static_cast<long>(n);
    }
    return -1;
  }

  bool is_zero() const { return degree() < 0; }

  const Complex& operator[](std::size_t n) const { return coeffs_[n]; }

  const Complex& at(std::size_t n) const {
    if (n >= coeffs_.size()) throw RangeError("coefficient index beyond truncation");
    return coeffs_[n];
  }

  void set(std::size_t n, Complex c) {
    if (n >= coeffs_.size()) throw RangeError("coefficient index beyond truncation");
    coeffs_[n] = std::move(c);
  }

  std::span<const Complex> coefficients() const { return coeffs_; }

 private:
  std::vector<Complex> coeffs_;
};

inline TruncatedSeries monomial(std::size_t trunc_degree, std::size_t k, Complex c) {
  if (k > trunc_degree) throw RangeError("monomial degree exceeds trunc_degree");
  TruncatedSeries f(trunc_degree);
  f.set(k, std::move(c));
  return f;
}

/// Horner evaluation over all stored coefficients.
inline Complex evaluate(const TruncatedSeries& f, const Complex& z) {
  Complex acc;
  const auto c = f.coefficients();
  for (std::size_t n = c.size(); n-- > 0;) {
    acc = acc * z;
    acc += c[n];
  }
  return acc;
}

/// f(r e^{2 pi i j/m}), j = 0..m-1, in full precision.
inline std::vector<Complex> evaluate_circle(const TruncatedSeries& f, const HighReal& r,
                                            std::size_t m) {
  if (m == 0) throw DomainError("evaluate_circle needs m >= 1");
  if (r < 0) throw DomainError("evaluate_circle needs r >= 0");
  std::vector<Complex> out;
  out.reserve(m);
  const HighReal step = 2 * pi() / HighReal(m);
  for (std::size_t j = 0; j < m; ++j) {
    out.push_back(evaluate(f, r * unit(step * HighReal(j))));
  }
  return out;
}

inline TruncatedSeries add(const TruncatedSeries& f, const TruncatedSeries& g) {
  if (f.trunc_degree() != g.trunc_degree()) {
    throw RangeError("add: mismatched truncation degrees");
  }
  std::vector<Complex> c(f.size());
  for (std::size_t n = 0; n < c.size(); ++n) c[n] = f[n] + g[n];
  return TruncatedSeries(std::move(c));
}

inline TruncatedSeries subtract(const TruncatedSeries& f, const TruncatedSeries& g) {
  if (f.trunc_degree() != g.trunc_degree()) {
    throw RangeError("subtract: mismatched truncation degrees");
  }
  std::vector<Complex> c(f.size());
  for (std::size_t n = 0; n < c.size(); ++n) c[n] = f[n] - g[n];
  return TruncatedSeries(std::move(c));
}

inline TruncatedSeries scale(const TruncatedSeries& f, const Complex& s) {
  std::vector<Complex> c(f.size());
  for (std::size_t n = 0; n < c.size(); ++n) {
    if (!f[n].is_zero()) c[n] = f[n] * s;
  }
  return TruncatedSeries(std::move(c));
}

// ---------------------------------------------------------------------------
// Circle sampling in scaled double precision.
//
// On |z| = r the terms c_n r^n span hundreds of orders of magnitude, so the
// sampler works with log|c_n| + n log r, divides out the largest term and
// keeps the normalized coefficients that survive in double precision
// (relative size above e^-745). Samples at m equispaced angles are then one
// backward DFT of the coefficients folded modulo m, which is exact for any m.

/// One nonzero coefficient c_index = exp(log_abs) * phase, |phase| = 1.
struct LogTerm {
  std::size_t index = 0;
  long double log_abs = 0;
  std::complex<double> phase{1.0, 0.0};
};

inline bool make_log_term(std::size_t index, const Complex& c, LogTerm& out) {
  if (c.is_zero()) return false;
  const HighReal mag = abs(c);
  out.index = index;
  out.log_abs = to_long_double(boost::multiprecision::log(mag));
  out.phase = {(c.re / mag).convert_to<double>(), (c.im / mag).convert_to<double>()};
  return true;
}

/// Normalized coefficients of f(r e^{it}) e^{-log_scale}, starting at index
/// `lowest`; the common factor e^{i lowest t} is dropped, which leaves every
/// modulus unchanged.
class NormalizedCircle {
 public:
  long double log_scale = -std::numeric_limits<long double>::infinity();
  std::size_t lowest = 0;
  std::vector<std::complex<double>> coeffs;

  bool is_zero() const { return coeffs.empty(); }
  std::size_t spread() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }

  /// Normalized values at t_j = 2 pi j / m.
  std::vector<std::complex<double>> samples(std::size_t m) const {
    std::vector<std::complex<double>> buf(m);
    for (std::size_t k = 0; k < coeffs.size(); ++k) buf[k % m] += coeffs[k];
    detail::BackwardDft::run(buf);
    return buf;
  }

  double modulus_at(double theta) const {
    const std::complex<double> w = std::polar(1.0, theta);
    std::complex<double> acc = 0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * w + coeffs[k];
    return std::abs(acc);
  }

  /// Largest normalized modulus over m samples, optionally refined by a
  /// golden-section search on the bracket around the best sample.
  double max_modulus(std::size_t m, bool refine) const {
    if (is_zero()) return 0.0;
    const auto vals = samples(m);
    std::size_t best = 0;
    double best_mod = -1.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = std::abs(vals[j]);
      if (v > best_mod) {
        best_mod = v;
        best = j;
      }
    }
    if (!refine || spread() == 0) return best_mod;
    const double h = 2.0 * std::numbers::pi / static_cast<double>(m);
    double a = h * (static_cast<double>(best) - 1.0);
    double b = h * (static_cast<double>(best) + 1.0);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double f1 = modulus_at(x1);
    double f2 = modulus_at(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = modulus_at(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = modulus_at(x1);
      }
    }
    return std::max({best_mod, f1, f2});
  }

  /// (1/m sum_j |F(t_j)|^p)^{1/p}: trapezoidal rule for the normalized L^p mean.
  double power_mean(std::size_t m, double p) const {
    if (is_zero()) return 0.0;
    const auto vals = samples(m);
    return power_mean_of(vals, 1, p);
  }

  /// Trapezoidal L^p mean over every `stride`-th sample of `vals`.
  static double power_mean_of(const std::vector<std::complex<double>>& vals,
                              std::size_t stride, double p) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < vals.size(); j += stride, ++count) {
      acc += std::pow(std::abs(vals[j]), p);
    }
    return std::pow(acc / static_cast<double>(count), 1.0 / p);
  }
};

class CircleSampler {
 public:
  CircleSampler() = default;

  /// `terms` must be sorted by index with distinct indices.
  explicit CircleSampler(std::vector<LogTerm> terms) : terms_(std::move(terms)) {}

  static CircleSampler from_series(const TruncatedSeries& f) {
    std::vector<LogTerm> terms;
    LogTerm t;
    for (std::size_t n = 0; n < f.size(); ++n) {
      if (make_log_term(n, f[n], t)) terms.push_back(t);
    }
    return CircleSampler(std::move(terms));
  }

  bool is_zero() const { return terms_.empty(); }
  std::span<const LogTerm> terms() const { return terms_; }

  NormalizedCircle at_radius(const HighReal& r) const {
    if (r < 0) throw DomainError("radius must be >= 0");
    if (r == 0) {
      NormalizedCircle out;
      if (!terms_.empty() && terms_.front().index == 0) {
        out.log_scale = terms_.front().log_abs;
        out.coeffs.push_back(terms_.front().phase);
      }
      return out;
    }
    return at_log_radius(to_long_double(boost::multiprecision::log(r)));
  }

  NormalizedCircle at_log_radius(long double log_r) const {
    NormalizedCircle out;
    if (terms_.empty()) return out;
    long double top = -std::numeric_limits<long double>::infinity();
    for (const auto& t : terms_) {
      top = std::max(top, t.log_abs + static_cast<long double>(t.index) * log_r);
    }
    constexpr long double kUnderflow = 745.0L;
    std::size_t lo = 0;
    std::size_t hi = 0;
    bool any = false;
    for (const auto& t : terms_) {
      const long double x = t.log_abs + static_cast<long double>(t.index) * log_r - top;
      if (x < -kUnderflow) continue;
      if (!any) lo = t.index;
      hi = t.index;
      any = true;
    }
    out.log_scale = top;
    out.lowest = lo;
    out.coeffs.assign(hi - lo + 1, {0.0, 0.0});
    for (const auto& t : terms_) {
      const long double x = t.log_abs + static_cast<long double>(t.index) * log_r - top;
      if (x < -kUnderflow || t.index < lo || t.index > hi) continue;
      out.coeffs[t.index - lo] = t.phase * static_cast<double>(std::exp(x));
    }
    return out;
  }

 private:
  std::vector<LogTerm> terms_;
};

/// e^{log_scale} * value as a HighReal.
inline HighReal rescale(long double log_scale, double value) {
  if (value == 0.0 || std::isinf(log_scale)) return HighReal(0);
  return boost::multiprecision::exp(HighReal(log_scale)) * HighReal(value);
}

/// max over m circle samples of |f(R e^{2 pi i j/m})|; by the maximum-modulus
/// principle this approximates sup over the closed disk of radius R.
inline HighReal sup_on_disk(const CircleSampler& sampler, const HighReal& radius,
                            std::size_t m) {
  if (m == 0) throw DomainError("sup_on_disk needs m >= 1");
  const auto circle = sampler.at_radius(radius);
  if (circle.is_zero()) return HighReal(0);
  return rescale(circle.log_scale, circle.max_modulus(m, false));
}

inline HighReal sup_on_disk(const TruncatedSeries& f, const HighReal& radius, std::size_t m) {
  return sup_on_disk(CircleSampler::from_series(f), radius, m);
}

// ---------------------------------------------------------------------------
// Series files:
//   dunklseries v1
//   alpha=<decimal>
//   precision_bits=<int>
//   n_coeffs=<int>
//   <n> <re> <im>      (n_coeffs lines)

struct SeriesFile {
  TruncatedSeries series;
  HighReal alpha;
  unsigned precision_bits = kDefaultPrecisionBits;
};

inline void write_series(std::ostream& out, const TruncatedSeries& f, const HighReal& alpha) {
  out << "dunklseries v1\n";
  out << "alpha=" << to_decimal(alpha) << "\n";
  out << "precision_bits=" << precision_bits() << "\n";
  out << "n_coeffs=" << f.size() << "\n";
  for (std::size_t n = 0; n < f.size(); ++n) {
    out << n << ' ' << to_decimal(f[n].re) << ' ' << to_decimal(f[n].im) << '\n';
  }
}

namespace detail {
inline std::string expect_key(std::istream& in, const std::string& key, int line_no) {
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("line " + std::to_string(line_no) + ": missing '" + key + "='");
  }
  const std::string prefix = key + "=";
  if (line.rfind(prefix, 0) != 0) {
    throw FormatError("line " + std::to_string(line_no) + ": expected '" + prefix + "'");
  }
  return line.substr(prefix.size());
}
}  // namespace detail

inline SeriesFile read_series(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "dunklseries v1") {
    throw FormatError("line 1: expected 'dunklseries v1'");
  }
  HighReal alpha = parse_high_real(detail::expect_key(in, "alpha", 2));
  unsigned bits = 0;
  std::size_t count = 0;
  try {
    bits = static_cast<unsigned>(std::stoul(detail::expect_key(in, "precision_bits", 3)));
    count = std::stoul(detail::expect_key(in, "n_coeffs", 4));
  } catch (const std::invalid_argument&) {
    throw FormatError("lines 3-4: expected integers");
  }
  if (count == 0) throw FormatError("line 4: n_coeffs must be >= 1");
  std::vector<Complex> coeffs(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int line_no = static_cast<int>(i) + 5;
    if (!std::getline(in, line)) {
      throw FormatError("line " + std::to_string(line_no) + ": missing coefficient");
    }
    std::istringstream row(line);
    std::size_t n = 0;
    std::string re;
    std::string im;
    if (!(row >> n >> re >> im)) {
      throw FormatError("line " + std::to_string(line_no) + ": expected '<n> <re> <im>'");
    }
    if (n >= count) {
      throw FormatError("line " + std::to_string(line_no) + ": index out of range");
    }
    coeffs[n] = Complex(parse_high_real(re), parse_high_real(im));
  }
  return {TruncatedSeries(std::move(coeffs)), std::move(alpha), bits};
}

}  // namespace dunkl
