#pragma once

// Orbits at the origin, v_n = Lambda^n f(0) = c_n d_n, and the Cauchy
// estimate behind the non-existence of hypercyclic functions of growth
// M_1(f, r) <= C e^r / r^{alpha+1}:
//   |c_n| d_n <= [M_1(f, r) r^{alpha+1} e^{-r}] d_n e^r / r^{n+alpha+1},
// evaluated at r = n + alpha + 1.

#include "dunkl/dunkl_operator.hpp"
#include "dunkl/growth.hpp"
#include "dunkl/means.hpp"
#include "dunkl/numeric.hpp"
#include "dunkl/series.hpp"

#include <algorithm>
#include <vector>

namespace dunkl {

struct OrbitReport {
  std::vector<Complex> values;         // v_n, n = 0..N
  std::vector<LogScaled> magnitudes;   // |v_n| in the log domain
  std::size_t sup_index = 0;
  LogScaled sup;                       // max_n |v_n|
  std::size_t cross_checked = 0;       // n <= 64 compared with the operator itself
  HighReal cross_check_error;          // largest relative discrepancy found
};

/// v_n = c_n P_n with P_n = prod_{k<=n} a_k (d_n for Dunkl weights). For
/// n <= min(N, 64) the value is recomputed as coefficient 0 of B^n f.
template <ShiftWeights W>
OrbitReport orbit_at_zero(const TruncatedSeries& f, const W& w, std::size_t horizon) {
  if (horizon > f.trunc_degree()) throw RangeError("orbit horizon beyond trunc_degree");
  if (w.trunc_degree() < horizon) throw RangeError("weights shorter than the horizon");
  OrbitReport out;
  out.cross_check_error = 0;
  for (std::size_t n = 0; n <= horizon; ++n) {
    const Complex& c = f[n];
    if (c.is_zero()) {
      out.values.emplace_back();
      out.magnitudes.push_back(LogScaled::zero());
      continue;
    }
    out.values.push_back(c * w.product(n));
    const LogScaled mag =
        LogScaled::from_log(1, boost::multiprecision::log(abs(c)) + w.log_abs_product(n));
    if (out.sup.is_zero() || mag.log_mag > out.sup.log_mag) {
      out.sup = mag;
      out.sup_index = n;
    }
    out.magnitudes.push_back(mag);
  }
  const std::size_t check = std::min<std::size_t>(horizon, 64);
  for (std::size_t n = 0; n <= check; ++n) {
    const Complex direct = apply_shift(f, w, n)[0];
    const HighReal scale = abs(out.values[n]);
    const HighReal err = abs(direct - out.values[n]);
    const HighReal rel = scale == 0 ? err : err / scale;
    out.cross_check_error = std::max(out.cross_check_error, rel);
    ++out.cross_checked;
  }
  return out;
}

struct CauchyBoundCheck {
  HighReal c_star;          // sup_r M_1(f, r) r^{alpha+1} / e^r over the grid
  HighReal c_star_radius;   // where the supremum was attained
  HighReal orbit_sup;       // max_{n<=N} |v_n|
  std::size_t orbit_sup_index = 0;
  HighReal lemma1_sup;      // max_{n<=N} d_n e^{n+alpha+1} / (n+alpha+1)^{n+alpha+1}
  bool consistent = false;  // orbit_sup <= c_star * lemma1_sup
  bool per_n = false;       // |v_n| <= c_star * lemma1_ratio(n) for every n <= N
  std::size_t worst_n = 0;  // n with the largest |v_n| / (c_star lemma1_ratio(n))
  HighReal worst_ratio;
  std::vector<HighReal> radii;    // merged grid
  std::vector<HighReal> profile;  // M_1(f, r) r^{alpha+1} / e^r on it
};

/// Relative slack allowed for the quadrature rounding of M_1.
inline constexpr double kCauchySlack = 1e-9;

inline std::vector<HighReal> merged_cauchy_grid(std::span<const HighReal> grid,
                                                const HighReal& alpha, std::size_t horizon) {
  std::vector<HighReal> radii(grid.begin(), grid.end());
  for (std::size_t n = 0; n <= horizon; ++n) radii.push_back(HighReal(n) + alpha + 1);
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  return radii;
}

inline CauchyBoundCheck thm3b_bound_check(const TruncatedSeries& f, const DunklWeights& w,
                                          std::span<const HighReal> grid, std::size_t horizon) {
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  if (horizon > f.trunc_degree()) throw RangeError("horizon beyond trunc_degree");
  const HighReal a = w.alpha() + 1;
  CauchyBoundCheck out;
  out.radii = merged_cauchy_grid(grid, w.alpha(), horizon);
  const MeanEvaluator means(f);
  const auto mp = MeanParams::for_exponent(1.0);
  out.c_star = 0;
  out.c_star_radius = out.radii.front();
  for (const auto& r : out.radii) {
    if (!(r > 0)) throw DomainError("thm3b_bound_check needs a positive grid");
    const HighReal m1 = means(r, mp).value;
    HighReal v = m1 == 0 ? HighReal(0) : exp(log(m1) + a * log(r) - r);
    if (v > out.c_star) {
      out.c_star = v;
      out.c_star_radius = r;
    }
    out.profile.push_back(std::move(v));
  }

  const OrbitReport orbit = orbit_at_zero(f, w, horizon);
  out.orbit_sup = orbit.sup.is_zero() ? HighReal(0) : orbit.sup.to_high();
  out.orbit_sup_index = orbit.sup_index;
  out.lemma1_sup = 0;
  out.worst_ratio = 0;
  out.per_n = true;
  for (std::size_t n = 0; n <= horizon; ++n) {
    const HighReal l1 = lemma1_ratio(n, w);
    out.lemma1_sup = std::max(out.lemma1_sup, l1);
    if (orbit.magnitudes[n].is_zero()) continue;
    const HighReal bound = out.c_star * l1;
    const HighReal ratio = bound == 0 ? HighReal(std::numeric_limits<double>::infinity())
                                      : orbit.magnitudes[n].to_high() / bound;
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_n = n;
    }
    if (ratio > 1 + HighReal(kCauchySlack)) out.per_n = false;
  }
  out.consistent = out.orbit_sup <= out.c_star * out.lemma1_sup * (1 + HighReal(kCauchySlack));
  return out;
}

/// C_star restricted to r <= r_max, for each r_max: the supremum over a
/// window that grows with r_max.
inline std::vector<HighReal> windowed_c_star(const CauchyBoundCheck& check,
                                             std::span<const HighReal> r_max) {
  std::vector<HighReal> out;
  for (const auto& top : r_max) {
    HighReal best = 0;
    for (std::size_t i = 0; i < check.radii.size() && check.radii[i] <= top; ++i) {
      best = std::max(best, check.profile[i]);
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace dunkl
