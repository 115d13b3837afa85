#pragma once

// Integral means M_p(f, r) = ((1/2pi) int |f(re^{it})|^p dt)^{1/p}, 1 <= p < inf,
// M_inf(f, r) = max_{|z|=r} |f(z)|, and the Hausdorff-Young comparison
// (sum |c_n r^n|^q)^{1/q} <= M_p(f, r) for 1 < p <= 2.

#include "dunkl/numeric.hpp"
#include "dunkl/series.hpp"

#include <limits>
#include <optional>

namespace dunkl {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// 1/p + 1/q = 1 with q = inf at p = 1 and q = 1 at p = inf.
inline double conjugate_exponent(double p) {
  if (!(p >= 1.0)) throw DomainError("exponent must be >= 1");
  if (p == 1.0) return kInfinity;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

struct MeanParams {
  double p = 2.0;
  double q = 2.0;
  std::size_t quad_points = 4096;

  static MeanParams for_exponent(double p, std::size_t quad_points = 4096) {
    if (quad_points == 0) throw DomainError("quad_points must be >= 1");
    return {p, conjugate_exponent(p), quad_points};
  }
};

struct MeanResult {
  HighReal value;
  HighReal richardson_err;  // |Q_{2m} - Q_m|
  std::size_t points = 0;   // m actually used
};

/// Evaluates M_p(f, ·) repeatedly over radius/exponent sweeps; the log-domain
/// coefficient table is built once.
class MeanEvaluator {
 public:
  explicit MeanEvaluator(const TruncatedSeries& f) : sampler_(CircleSampler::from_series(f)) {
    for (std::size_t n = 0; n < f.size(); ++n) {
      if (!f[n].is_zero()) squares_.emplace_back(n, norm(f[n]));
    }
  }

  const CircleSampler& sampler() const { return sampler_; }

  /// p = 2: Parseval; p = inf: sampled maximum refined by golden section;
  /// otherwise the trapezoidal rule. m = max(quad_points, 8 * spread).
  MeanResult operator()(const HighReal& r, const MeanParams& mp) const {
    if (r < 0) throw DomainError("mean_p needs r >= 0");
    if (!(mp.p >= 1.0)) throw DomainError("mean_p needs p >= 1");
    const auto circle = sampler_.at_radius(r);
    MeanResult out;
    if (circle.is_zero()) {
      out.value = 0;
      out.richardson_err = 0;
      out.points = mp.quad_points;
      return out;
    }
    const std::size_t m = std::max<std::size_t>(mp.quad_points, 8 * circle.spread());
    out.points = m;
    if (std::isinf(mp.p)) {
      const double coarse = circle.max_modulus(m, true);
      const double fine = circle.max_modulus(2 * m, true);
      out.value = rescale(circle.log_scale, fine);
      out.richardson_err = rescale(circle.log_scale, std::abs(fine - coarse));
      return out;
    }
    const auto vals = circle.samples(2 * m);
    const double fine = NormalizedCircle::power_mean_of(vals, 1, mp.p);
    const double coarse = NormalizedCircle::power_mean_of(vals, 2, mp.p);
    out.richardson_err = rescale(circle.log_scale, std::abs(fine - coarse));
    out.value = (mp.p == 2.0) ? parseval(r, circle.log_scale) : rescale(circle.log_scale, fine);
    return out;
  }

 private:
  /// (sum |c_n|^2 r^{2n})^{1/2}, skipping terms below the working precision
  /// relative to the largest one.
  HighReal parseval(const HighReal& r, long double log_scale) const {
    if (r == 0) {
      return (!squares_.empty() && squares_.front().first == 0)
                 ? boost::multiprecision::sqrt(squares_.front().second)
                 : HighReal(0);
    }
    const long double log_r = to_long_double(boost::multiprecision::log(r));
    const long double cutoff =
        2 * log_scale - 0.7L * static_cast<long double>(precision_bits()) - 20.0L;
    const HighReal log_r2 = 2 * boost::multiprecision::log(r);
    HighReal acc = 0;
    auto terms = sampler_.terms();
    for (std::size_t i = 0; i < squares_.size(); ++i) {
      const long double x = 2 * terms[i].log_abs + 2 * static_cast<long double>(terms[i].index) * log_r;
      if (x < cutoff) continue;
      acc += squares_[i].second * boost::multiprecision::exp(HighReal(squares_[i].first) * log_r2);
    }
    return boost::multiprecision::sqrt(acc);
  }

  CircleSampler sampler_;
  std::vector<std::pair<std::size_t, HighReal>> squares_;
};

inline MeanResult mean_p(const TruncatedSeries& f, const HighReal& r, const MeanParams& mp) {
  return MeanEvaluator(f)(r, mp);
}

/// Trapezoidal M_p on exactly m points (no Parseval shortcut); used to
/// cross-check the closed form.
inline HighReal mean_p_trapezoid(const TruncatedSeries& f, const HighReal& r, double p,
                                 std::size_t m) {
  const auto circle = CircleSampler::from_series(f).at_radius(r);
  if (circle.is_zero()) return HighReal(0);
  if (std::isinf(p)) return rescale(circle.log_scale, circle.max_modulus(m, false));
  return rescale(circle.log_scale, circle.power_mean(m, p));
}

struct HausdorffYoungResult {
  HighReal lhs;        // (sum_n |c_n r^n|^q)^{1/q}
  HighReal rhs;        // M_p(f, r)
  HighReal margin;     // rhs - lhs
  HighReal tolerance;  // quadrature discrepancy of rhs
};

/// F(t) = f(r e^{it}) has Fourier coefficients c_n r^n (n >= 0).
inline HausdorffYoungResult hausdorff_young_check(const TruncatedSeries& f, const HighReal& r,
                                                  const MeanParams& mp) {
  if (!(mp.p > 1.0 && mp.p <= 2.0)) throw DomainError("Hausdorff-Young needs 1 < p <= 2");
  if (!(r > 0)) throw DomainError("Hausdorff-Young needs r > 0");
  const double q = conjugate_exponent(mp.p);
  std::vector<LogScaled> terms;
  const HighReal log_r = boost::multiprecision::log(r);
  const HighReal qh(q);
  for (std::size_t n = 0; n < f.size(); ++n) {
    if (f[n].is_zero()) continue;
    terms.push_back(LogScaled::from_log(
        1, qh * (boost::multiprecision::log(abs(f[n])) + HighReal(n) * log_r)));
  }
  HausdorffYoungResult out;
  const LogScaled sum = log_scaled_sum(terms);
  out.lhs = sum.is_zero() ? HighReal(0) : boost::multiprecision::exp(sum.log_mag / qh);
  const MeanResult rhs = mean_p(f, r, mp);
  out.rhs = rhs.value;
  out.tolerance = rhs.richardson_err;
  out.margin = out.rhs - out.lhs;
  return out;
}

}  // namespace dunkl
