#pragma once

// Configurable-precision real/complex arithmetic, log-domain scalars and
// log-gamma. Every other header builds on the types defined here.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dunkl {

/// Binary floating point value carried at the process-wide precision
/// (see set_precision_bits). Round-to-nearest throughout.
using HighReal = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0>,
    boost::multiprecision::et_off>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Index or degree outside the stored truncation.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Malformed series / plan / config text.
class FormatError : public Error {
 public:
  using Error::Error;
};

inline constexpr unsigned kDefaultPrecisionBits = 256;

namespace detail {
inline unsigned& nominal_bits() {
  static unsigned bits = kDefaultPrecisionBits;
  return bits;
}
}  // namespace detail

/// Sets the mantissa width used for every HighReal created afterwards.
/// The effective width is the smallest MPFR width >= bits that the
/// decimal-digit interface of the backend can express (at most 2 extra bits).
inline void set_precision_bits(unsigned bits) {
  if (bits < 24) throw DomainError("precision_bits must be >= 24");
  unsigned d10 = 1;
  while (boost::multiprecision::detail::digits10_2_2(d10) < bits) ++d10;
  HighReal::default_precision(d10);
  detail::nominal_bits() = bits;
}

inline unsigned precision_bits() { return detail::nominal_bits(); }

namespace detail {
// Applies the default width before main() so HighReal never starts at the
// backend's own 50-digit default.
inline const bool precision_initialized = (set_precision_bits(kDefaultPrecisionBits), true);
}  // namespace detail

/// Restores the previous precision on scope exit.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(unsigned bits) : saved_(precision_bits()) {
    set_precision_bits(bits);
  }
  ~ScopedPrecision() { set_precision_bits(saved_); }
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  unsigned saved_;
};

/// 2^(shift - precision_bits): the unit used by all relative tolerances.
inline HighReal precision_unit(int shift = 0) {
  return boost::multiprecision::ldexp(HighReal(1),
                                      shift - static_cast<int>(precision_bits()));
}

inline HighReal pi() {
  HighReal r;
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

inline HighReal euler_e() { return boost::multiprecision::exp(HighReal(1)); }

inline long double to_long_double(const HighReal& x) {
  return x.convert_to<long double>();
}

/// Shortest decimal string that parses back to the identical value at the
/// current precision.
inline std::string to_decimal(const HighReal& x) {
  if (x == 0) return "0";
  return x.str(0, std::ios_base::scientific);
}

/// Decimal with a fixed number of significant digits (CSV output).
inline std::string to_decimal(const HighReal& x, int digits) {
  if (x == 0) return "0";
  return x.str(digits, std::ios_base::scientific);
}

inline HighReal parse_high_real(const std::string& text) {
  try {
    if (text == "inf" || text == "+inf") {
      return HighReal(std::numeric_limits<double>::infinity());
    }
    return HighReal(text);
  } catch (const std::exception&) {
    throw FormatError("not a decimal number: '" + text + "'");
  }
}

// ---------------------------------------------------------------------------
// Complex

struct Complex {
  HighReal re;
  HighReal im;

  Complex() : re(0), im(0) {}
  Complex(HighReal r) : re(std::move(r)), im(0) {}  // NOLINT
  Complex(HighReal r, HighReal i) : re(std::move(r)), im(std::move(i)) {}
  Complex(double r) : re(r), im(0) {}  // NOLINT
  Complex(double r, double i) : re(r), im(i) {}

  bool is_zero() const { return re == 0 && im == 0; }

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const HighReal& s) {
    re *= s;
    im *= s;
    return *this;
  }
  Complex& operator/=(const HighReal& s) {
    re /= s;
    im /= s;
    return *this;
  }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Complex operator*(Complex a, const HighReal& s) { return a *= s; }
  friend Complex operator*(const HighReal& s, Complex a) { return a *= s; }
  friend Complex operator/(Complex a, const HighReal& s) { return a /= s; }
  friend Complex operator/(const Complex& a, const Complex& b) {
    HighReal den = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
  }
  friend bool operator==(const Complex& a, const Complex& b) {
    return a.re == b.re && a.im == b.im;
  }
};

inline HighReal norm(const Complex& z) { return z.re * z.re + z.im * z.im; }

inline HighReal abs(const Complex& z) {
  if (z.im == 0) return boost::multiprecision::abs(z.re);
  if (z.re == 0) return boost::multiprecision::abs(z.im);
  return boost::multiprecision::sqrt(norm(z));
}

/// e^{i theta}
inline Complex unit(const HighReal& theta) {
  return {boost::multiprecision::cos(theta), boost::multiprecision::sin(theta)};
}

inline std::complex<double> to_std(const Complex& z) {
  return {z.re.convert_to<double>(), z.im.convert_to<double>()};
}

// ---------------------------------------------------------------------------
// LogScaled

/// sign * exp(log_mag); log_mag is ignored when sign == 0.
struct LogScaled {
  int sign = 0;
  HighReal log_mag = 0;

  static LogScaled zero() { return {}; }
  static LogScaled from_log(int sign, HighReal log_mag) {
    if (sign == 0) return {};
    return {sign > 0 ? 1 : -1, std::move(log_mag)};
  }
  static LogScaled from_value(const HighReal& x) {
    if (x == 0) return {};
    return {x > 0 ? 1 : -1, boost::multiprecision::log(boost::multiprecision::abs(x))};
  }

  bool is_zero() const { return sign == 0; }

  HighReal to_high() const {
    if (sign == 0) return HighReal(0);
    HighReal m = boost::multiprecision::exp(log_mag);
    return sign > 0 ? m : HighReal(-m);
  }

  friend LogScaled operator*(const LogScaled& a, const LogScaled& b) {
    if (a.sign == 0 || b.sign == 0) return {};
    return {a.sign * b.sign, a.log_mag + b.log_mag};
  }
  friend LogScaled operator/(const LogScaled& a, const LogScaled& b) {
    if (b.sign == 0) throw DomainError("LogScaled division by zero");
    if (a.sign == 0) return {};
    return {a.sign * b.sign, a.log_mag - b.log_mag};
  }
};

/// Sum of sign*exp(log) terms with the running maximum log shifted out
/// before exponentiating. Empty input gives zero.
inline LogScaled log_scaled_sum(std::span<const LogScaled> terms) {
  const HighReal* max_log = nullptr;
  for (const auto& t : terms) {
    if (t.sign != 0 && (max_log == nullptr || t.log_mag > *max_log)) max_log = &t.log_mag;
  }
  if (max_log == nullptr) return LogScaled::zero();
  const HighReal shift = *max_log;
  HighReal acc = 0;
  for (const auto& t : terms) {
    if (t.sign == 0) continue;
    HighReal v = boost::multiprecision::exp(t.log_mag - shift);
    if (t.sign > 0) {
      acc += v;
    } else {
      acc -= v;
    }
  }
  if (acc == 0) return LogScaled::zero();
  return {acc > 0 ? 1 : -1, shift + boost::multiprecision::log(boost::multiprecision::abs(acc))};
}

// ---------------------------------------------------------------------------
// log-gamma

namespace detail {

using Rational = boost::multiprecision::cpp_rational;

/// B_0, B_2, B_4, ... as exact rationals (B_1 is never needed).
inline const Rational& bernoulli_even(std::size_t k) {
  static std::mutex mu;
  static std::vector<Rational> all{Rational(1)};  // B_0..B_m, all indices
  std::lock_guard lock(mu);
  const std::size_t need = 2 * k;
  while (all.size() <= need) {
    const std::size_t m = all.size();
    // sum_{j=0}^{m} C(m+1, j) B_j = 0
    boost::multiprecision::cpp_int binom = 1;  // C(m+1, 0)
    Rational acc = 0;
    for (std::size_t j = 0; j < m; ++j) {
      acc += Rational(binom) * all[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    all.push_back(-acc / Rational(m + 1));
  }
  return all[need];
}

inline HighReal to_high(const Rational& q) {
  return HighReal(boost::multiprecision::numerator(q).str()) /
         HighReal(boost::multiprecision::denominator(q).str());
}

struct StirlingTable {
  unsigned bits = 0;
  std::vector<HighReal> coef;  // coef[k] = B_{2k}/(2k(2k-1)), k >= 1
  HighReal half_log_two_pi;
  HighReal cutoff;
};

inline const StirlingTable& stirling_table() {
  static std::mutex mu;
  static std::map<unsigned, StirlingTable> cache;
  std::lock_guard lock(mu);
  const unsigned bits = precision_bits();
  auto it = cache.find(bits);
  if (it != cache.end()) return it->second;
  StirlingTable t;
  t.bits = bits;
  // Shifting the argument to x >= 0.3*bits keeps the smallest Stirling term
  // far below 2^-bits; the number of terms used is decided per call.
  t.cutoff = HighReal(std::max(12.0, std::ceil(0.3 * bits)));
  t.half_log_two_pi = boost::multiprecision::log(2 * pi()) / 2;
  const std::size_t max_terms = bits / 2 + 8;
  t.coef.emplace_back(0);
  for (std::size_t k = 1; k <= max_terms; ++k) {
    t.coef.push_back(to_high(bernoulli_even(k)) / HighReal((2 * k) * (2 * k - 1)));
  }
  return cache.emplace(bits, std::move(t)).first->second;
}

}  // namespace detail

/// ln Gamma(x) for x > 0: argument shifted up to the precision-dependent
/// cutoff, Stirling series there, then the shift product divided back out.
inline HighReal log_gamma(const HighReal& x) {
  using boost::multiprecision::log;
  if (!(x > 0)) throw DomainError("log_gamma requires x > 0");
  if (x == 1 || x == 2) return HighReal(0);
  const auto& table = detail::stirling_table();

  HighReal y = x;
  HighReal shift_product = 1;
  bool shifted = false;
  while (y < table.cutoff) {
    shift_product *= y;
    y += 1;
    shifted = true;
  }

  HighReal result = (y - HighReal(0.5)) * log(y) - y + table.half_log_two_pi;
  const HighReal inv_y2 = 1 / (y * y);
  HighReal power = 1 / y;
  const HighReal stop = precision_unit(-8) * boost::multiprecision::abs(result);
  for (std::size_t k = 1; k < table.coef.size(); ++k) {
    HighReal term = table.coef[k] * power;
    result += term;
    if (boost::multiprecision::abs(term) < stop) break;
    power *= inv_y2;
  }
  if (shifted) result -= log(shift_product);
  return result;
}

}  // namespace dunkl
