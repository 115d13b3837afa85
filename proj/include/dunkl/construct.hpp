#pragma once

// Builders for Lambda_alpha-hypercyclic and frequently hypercyclic entire
// functions, their verifiers, and the density-decay diagnostic.
//
// A hypercyclic build places blocks S^{m_k} Q_k, one per target polynomial,
// at increasing positions m_k; then Lambda^{m_k} f = Q_k + (later blocks,
// shifted down). A frequently hypercyclic build places S^n Q_j at every n of
// a residue class A_j = {m0 + B (2^j k + 2^{j-1}) : k >= 0}.

#include "dunkl/dunkl_operator.hpp"
#include "dunkl/growth.hpp"
#include "dunkl/means.hpp"
#include "dunkl/numeric.hpp"
#include "dunkl/series.hpp"

#include <boost/rational.hpp>

#include <bit>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace dunkl {

using Rational = boost::rational<long long>;

/// Coefficients b_0..b_d of a polynomial with rational coefficients; empty
/// for the zero polynomial, otherwise the last entry is nonzero.
using RationalPoly = std::vector<Rational>;

inline long degree(const RationalPoly& q) { return static_cast<long>(q.size()) - 1; }

inline void trim(RationalPoly& q) {
  while (!q.empty() && q.back().numerator() == 0) q.pop_back();
}

inline HighReal to_high(const Rational& x) {
  return HighReal(x.numerator()) / HighReal(x.denominator());
}

inline TruncatedSeries to_series(const RationalPoly& q, std::size_t trunc_degree) {
  if (degree(q) > static_cast<long>(trunc_degree)) throw RangeError("polynomial exceeds trunc_degree");
  TruncatedSeries out(trunc_degree);
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i].numerator() != 0) out.set(i, Complex(to_high(q[i])));
  }
  return out;
}

/// "p/q" per coefficient, comma separated, lowest degree first; "0" for zero.
inline std::string format_poly(const RationalPoly& q) {
  if (q.empty()) return "0";
  std::ostringstream out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i > 0) out << ',';
    out << q[i].numerator();
    if (q[i].denominator() != 1) out << '/' << q[i].denominator();
  }
  return out.str();
}

inline RationalPoly parse_poly(const std::string& text) {
  RationalPoly q;
  if (text == "0") return q;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      const auto slash = item.find('/');
      if (slash == std::string::npos) {
        q.emplace_back(std::stoll(item));
      } else {
        q.emplace_back(std::stoll(item.substr(0, slash)), std::stoll(item.substr(slash + 1)));
      }
    } catch (const std::exception&) {
      throw FormatError("bad rational coefficient '" + item + "'");
    }
  }
  trim(q);
  return q;
}

// ---------------------------------------------------------------------------
// Target enumeration
//
// Rationals are listed as rho_0 = 0, rho_{2k-1} = s(k)/s(k+1),
// rho_{2k} = -s(k)/s(k+1), with s Stern's diatomic sequence (the
// Calkin-Wilf order of the positive rationals). A polynomial of degree
// <= D is the tuple (i_0..i_D) of rational indices of its coefficients.
// Tuples are ordered by height i_0 + ... + i_D, then lexicographically
// on (i_D, ..., i_0). Index 1 is the zero polynomial, 2 is 1, 3 is z, ...,
// D+2 is z^D, D+3 is -1, D+4 is 1 + z.

inline unsigned long long stern_diatomic(unsigned long long n) {
  unsigned long long a = 1;  // s(n) = a s(m) + b s(m+1) for the current m
  unsigned long long b = 0;
  while (n > 0) {
    if (n % 2 == 0) {
      a += b;
    } else {
      b += a;
    }
    n /= 2;
  }
  return b;
}

inline Rational rational_at(unsigned long long index) {
  if (index == 0) return Rational(0);
  const unsigned long long k = (index + 1) / 2;
  const Rational v(static_cast<long long>(stern_diatomic(k)),
                   static_cast<long long>(stern_diatomic(k + 1)));
  return index % 2 == 1 ? v : -v;
}

namespace detail {
using Count = unsigned __int128;

inline Count saturating_binomial(unsigned long long n, unsigned long long k) {
  constexpr Count kCap = static_cast<Count>(1) << 120;
  Count c = 1;
  for (unsigned long long i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > kCap) return kCap;
  }
  return c;
}

// number of tuples of `slots` nonnegative integers with sum `total`
inline Count tuples(unsigned long long slots, unsigned long long total) {
  if (slots == 0) return total == 0 ? 1 : 0;
  return saturating_binomial(total + slots - 1, slots - 1);
}
}  // namespace detail

inline RationalPoly enumerate_targets(std::size_t index, std::size_t max_degree = 8) {
  if (index == 0) throw DomainError("target index starts at 1");
  const unsigned long long slots = max_degree + 1;
  detail::Count rank = index - 1;
  unsigned long long height = 0;
  while (rank >= detail::tuples(slots, height)) {
    rank -= detail::tuples(slots, height);
    ++height;
  }
  std::vector<unsigned long long> idx(slots, 0);
  unsigned long long left = height;
  for (std::size_t pos = slots; pos-- > 1;) {
    unsigned long long v = 0;
    for (;; ++v) {
      const detail::Count block = detail::tuples(pos, left - v);
      if (rank < block) break;
      rank -= block;
    }
    idx[pos] = v;
    left -= v;
  }
  idx[0] = left;
  RationalPoly q(slots);
  for (std::size_t i = 0; i < slots; ++i) q[i] = rational_at(idx[i]);
  trim(q);
  return q;
}

// ---------------------------------------------------------------------------
// Weighted norms on an r-grid

/// sup over a grid of M_inf(g, r) r^a / (env(r) e^r), the norm of the
/// weighted Banach spaces used by both builders.
class GridNorm {
 public:
  GridNorm(std::span<const HighReal> grid, const HighReal& exponent, const RateEnvelope& env) {
    if (grid.empty()) throw DomainError("empty r-grid");
    for (const auto& r : grid) {
      if (!(r > 0)) throw DomainError("r-grid must be positive");
      const HighReal lr = boost::multiprecision::log(r);
      log_r_.push_back(to_long_double(lr));
      log_weight_.push_back(
          to_long_double(exponent * lr - boost::multiprecision::log(env(r)) - r));
    }
  }

  std::size_t size() const { return log_r_.size(); }
  long double log_r(std::size_t i) const { return log_r_[i]; }
  long double log_weight(std::size_t i) const { return log_weight_[i]; }

  /// log of the norm of sum_t exp(log_abs_t) phase_t z^{index_t}; -inf for 0.
  long double log_norm(const CircleSampler& g) const {
    long double best = -std::numeric_limits<long double>::infinity();
    if (g.is_zero()) return best;
    for (std::size_t i = 0; i < log_r_.size(); ++i) {
      const auto circle = g.at_log_radius(log_r_[i]);
      const std::size_t m = std::max<std::size_t>(64, 8 * circle.spread());
      const double mod = circle.max_modulus(m, circle.spread() > 0);
      best = std::max(best, circle.log_scale + std::log(static_cast<long double>(mod)) +
                                log_weight_[i]);
    }
    return best;
  }

 private:
  std::vector<long double> log_r_;
  std::vector<long double> log_weight_;
};

/// Log terms of S^m Q: coefficient b_i d_i / d_{i+m} at index i + m.
inline CircleSampler shifted_block(const RationalPoly& q, const DunklWeights& w, std::size_t m) {
  std::vector<LogTerm> terms;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i].numerator() == 0) continue;
    const long double b = static_cast<long double>(q[i].numerator()) /
                          static_cast<long double>(q[i].denominator());
    LogTerm t;
    t.index = i + m;
    t.log_abs = std::log(std::fabs(b)) + w.log_value_ld(i) - w.log_value_ld(i + m);
    t.phase = {b < 0 ? -1.0 : 1.0, 0.0};
    terms.push_back(t);
  }
  return CircleSampler(std::move(terms));
}

/// Adds S^m Q to f coefficientwise, in full precision.
inline void place_block(TruncatedSeries& f, const RationalPoly& q, const DunklWeights& w,
                        std::size_t m) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i].numerator() == 0) continue;
    f.set(i + m, f[i + m] + Complex(to_high(q[i]) * w.value(i) / w.value(i + m)));
  }
}

// ---------------------------------------------------------------------------
// Hypercyclic construction

struct ConstructionPlan {
  HighReal alpha;
  std::size_t trunc_degree = 0;
  std::vector<std::size_t> target_indices;  // 0 when a target was given explicitly
  std::vector<RationalPoly> targets;
  std::vector<std::size_t> positions;       // m_k
  std::vector<HighReal> budgets;            // eps_k = 2^{-k}
  std::vector<HighReal> block_norms;        // measured weighted norm of S^{m_k} Q_k
  HighReal orbit_radius = HighReal(2);

  std::size_t size() const { return targets.size(); }
};

/// Thrown when the truncation degree cannot hold the requested blocks.
class TruncationError : public RangeError {
 public:
  TruncationError(const std::string& what, std::size_t achievable)
      : RangeError(what), achievable_(achievable) {}
  std::size_t achievable() const { return achievable_; }

 private:
  std::size_t achievable_;
};

struct HypercyclicConfig {
  std::vector<RationalPoly> targets;  // empty: enumerate_targets(1..K)
  std::size_t max_degree = 8;
  std::vector<HighReal> grid;         // empty: standard_grid()
  HighReal orbit_radius = HighReal(2);  // radius of the orbit-hit checks
};

struct HypercyclicBuild {
  TruncatedSeries f;
  ConstructionPlan plan;
};

inline HypercyclicBuild build_hypercyclic(const DunklWeights& w, const RateEnvelope& env,
                                          std::size_t K, const HypercyclicConfig& cfg = {}) {
  if (K == 0) throw DomainError("build_hypercyclic needs K >= 1");
  if (env.kind() != EnvelopeKind::to_infinity) {
    throw DomainError("build_hypercyclic needs an envelope tending to infinity");
  }
  const std::size_t N = w.trunc_degree();
  const std::vector<HighReal> grid = cfg.grid.empty() ? standard_grid() : cfg.grid;
  env.validate_on(grid);
  const GridNorm norm(grid, w.alpha() + 1, env);
  if (!(cfg.orbit_radius > 0)) throw DomainError("orbit_radius must be positive");
  std::vector<HighReal> near_grid;
  for (const auto& r : grid) {
    if (r < cfg.orbit_radius) near_grid.push_back(r);
  }
  near_grid.push_back(cfg.orbit_radius);
  const GridNorm near(near_grid, w.alpha() + 1, env);

  HypercyclicBuild out{TruncatedSeries(N), {}};
  ConstructionPlan& plan = out.plan;
  plan.alpha = w.alpha();
  plan.trunc_degree = N;
  plan.orbit_radius = cfg.orbit_radius;

  std::size_t lower = 1;
  for (std::size_t k = 1; k <= K; ++k) {
    RationalPoly q;
    std::size_t index = 0;
    if (cfg.targets.empty()) {
      index = k;
      q = enumerate_targets(k, cfg.max_degree);
    } else {
      if (k > cfg.targets.size()) throw DomainError("fewer explicit targets than K");
      q = cfg.targets[k - 1];
      trim(q);
    }
    const std::size_t deg = q.empty() ? 0 : static_cast<std::size_t>(degree(q));
    const long double log_budget = -static_cast<long double>(k) * std::numbers::ln2_v<long double>;
    std::optional<std::size_t> found;
    long double found_log_norm = 0;
    // (a) m >= lower keeps blocks disjoint; (b) the block itself is small in
    // the weighted norm; (c) its image under every earlier Lambda^{m_i} is
    // small on the orbit-check disk, so earlier hits stay within budget.
    const auto disturbs_earlier = [&](std::size_t m) {
      for (std::size_t p : plan.positions) {
        if (near.log_norm(shifted_block(q, w, m - p)) > log_budget) return true;
      }
      return false;
    };
    for (std::size_t m = lower; m + deg <= N; ++m) {
      const long double ln = norm.log_norm(shifted_block(q, w, m));
      if (ln <= log_budget && !disturbs_earlier(m)) {
        found = m;
        found_log_norm = ln;
        break;
      }
    }
    if (!found) {
      throw TruncationError("build_hypercyclic: trunc_degree " + std::to_string(N) +
                                " exhausted at block " + std::to_string(k) +
                                "; largest achievable K is " + std::to_string(k - 1),
                            k - 1);
    }
    place_block(out.f, q, w, *found);
    plan.target_indices.push_back(index);
    plan.targets.push_back(q);
    plan.positions.push_back(*found);
    plan.budgets.push_back(boost::multiprecision::ldexp(HighReal(1), -static_cast<int>(k)));
    plan.block_norms.push_back(q.empty() ? HighReal(0)
                                         : boost::multiprecision::exp(HighReal(found_log_norm)));
    lower = *found + deg + 1;
  }
  return out;
}

struct OrbitHit {
  std::size_t k = 0;
  std::size_t position = 0;
  HighReal delta;   // sup_{|z|=R} |Lambda^{m_k} f - Q_k|
  HighReal budget;  // sum_{j>k} eps_j phi(R) e^R / R^{alpha+1} + rounding allowance
  bool pass = false;
};

struct OrbitHitReport {
  std::vector<OrbitHit> hits;
  bool all_pass = true;
};

/// Rounding allowance added to every budget: 2^{32-bits} max(1, sup|Q_k|).
inline OrbitHitReport verify_orbit_hits(const TruncatedSeries& f, const ConstructionPlan& plan,
                                        const DunklWeights& w, const RateEnvelope& env,
                                        const HighReal& R, std::size_t m) {
  if (!(R > 0)) throw DomainError("verify_orbit_hits needs R > 0");
  if (plan.trunc_degree != f.trunc_degree()) throw DomainError("plan does not match series");
  const HighReal scale =
      env(R) * boost::multiprecision::exp(R - (w.alpha() + 1) * boost::multiprecision::log(R));
  OrbitHitReport report;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    HighReal tail = 0;
    for (std::size_t j = k + 1; j < plan.size(); ++j) tail += plan.budgets[j];
    const TruncatedSeries target = to_series(plan.targets[k], f.trunc_degree());
    const TruncatedSeries diff = subtract(apply_dunkl(f, w, plan.positions[k]), target);
    OrbitHit hit;
    hit.k = k + 1;
    hit.position = plan.positions[k];
    hit.delta = sup_on_disk(diff, R, m);
    const HighReal target_sup = sup_on_disk(target, R, m);
    hit.budget = tail * scale + precision_unit(32) * std::max(HighReal(1), target_sup);
    hit.pass = hit.delta <= hit.budget;
    report.all_pass = report.all_pass && hit.pass;
    report.hits.push_back(std::move(hit));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Tails of sum_n S^n y

/// Upper bound for || sum_{n>N} S^n y || in the space normed by
/// sup_r M_p(g, r) r^a / (env(r) e^r), a = alpha + 1/2 + 1/(2p), taken over
/// the grid. With p' = max(2, p) and q its conjugate, Hausdorff-Young gives
///   M_p'(sum_{t>N+i} z^t / d_t, r) <= (sum_{t>N+i} (r^t / d_t)^q)^{1/q},
/// and y = sum b_i z^i contributes |b_i| d_i times that. The bound dominates
/// every finite subset of the tail and is nonincreasing in N.
inline HighReal fuc_tail_norms(const RationalPoly& y, const DunklWeights& w, double p,
                               const RateEnvelope& env, std::size_t N,
                               std::span<const HighReal> grid) {
  const double pe = std::max(2.0, p);
  const long double q = static_cast<long double>(conjugate_exponent(pe));
  const GridNorm norm(grid, rate_exponent(pe, w.alpha(), RateKind::fhc_upper), env);
  const std::size_t top = w.trunc_degree();
  constexpr long double kNegligible = 80.0L;
  long double best = -std::numeric_limits<long double>::infinity();
  for (std::size_t g = 0; g < norm.size(); ++g) {
    const long double lr = norm.log_r(g);
    long double total = -std::numeric_limits<long double>::infinity();
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i].numerator() == 0) continue;
      const long double b = std::fabs(static_cast<long double>(y[i].numerator()) /
                                      static_cast<long double>(y[i].denominator()));
      // log-sum-exp of q (t log r - log d_t), t > N + i, stopping once past
      // the peak and far below the running sum
      const auto log_add = [](long double a, long double x) {
        return a > x ? a + std::log1p(std::exp(x - a)) : x + std::log1p(std::exp(a - x));
      };
      if (N + i + 1 > top) throw RangeError("fuc_tail_norms: tail starts beyond the weight table");
      long double acc = -std::numeric_limits<long double>::infinity();
      long double prev = -std::numeric_limits<long double>::infinity();
      std::size_t t = N + i + 1;
      for (; t <= top; ++t) {
        const long double x = q * (static_cast<long double>(t) * lr - w.log_value_ld(t));
        acc = log_add(acc, x);
        if (x < prev && x < acc - kNegligible) break;
        prev = x;
      }
      if (t > top) {
        // a_t >= t, so beyond the table each term shrinks by at least
        // rho = (r / (top + 1))^q: close the tail with a geometric bound
        const long double log_rho = q * (lr - std::log(static_cast<long double>(top + 1)));
        if (log_rho >= 0) throw RangeError("fuc_tail_norms: tail not resolved within the weight table");
        acc = log_add(acc, prev + log_rho - std::log1p(-std::exp(log_rho)));
      }
      const long double term = std::log(b) + w.log_value_ld(i) + acc / q;
      total = total > term ? total + std::log1p(std::exp(term - total))
                           : term + std::log1p(std::exp(total - term));
    }
    best = std::max(best, total + norm.log_weight(g));
  }
  if (std::isinf(best)) return HighReal(0);
  return boost::multiprecision::exp(HighReal(best));
}

// ---------------------------------------------------------------------------
// Frequently hypercyclic construction

/// Residue-class schedule A_j = {m0 + B (2^j k + 2^{j-1}) : k >= 0},
/// j = 1..J. Classes are disjoint (j - 1 is the 2-adic valuation of
/// (n - m0)/B) and consecutive placements are >= B apart.
struct FhcSchedule {
  HighReal alpha;
  std::size_t trunc_degree = 0;
  double p = 2.0;
  std::size_t block_width = 16;  // B
  std::size_t offset = 0;        // m0
  std::vector<std::size_t> target_indices;
  std::vector<RationalPoly> targets;

  std::size_t size() const { return targets.size(); }
  std::size_t last_placement() const { return trunc_degree - block_width; }

  /// Target number j (1-based) scheduled at n, if any.
  std::optional<std::size_t> target_at(std::size_t n) const {
    if (n <= offset || (n - offset) % block_width != 0) return std::nullopt;
    if (n > last_placement()) return std::nullopt;
    const std::size_t u = (n - offset) / block_width;
    const auto j = static_cast<std::size_t>(std::countr_zero(u)) + 1;
    if (j > targets.size()) return std::nullopt;
    return j;
  }

  std::vector<std::size_t> placements(std::size_t j) const {
    std::vector<std::size_t> out;
    const std::size_t first = offset + block_width * (std::size_t{1} << (j - 1));
    const std::size_t step = block_width * (std::size_t{1} << j);
    for (std::size_t n = first; n <= last_placement(); n += step) out.push_back(n);
    return out;
  }

  double nominal_density(std::size_t j) const {
    return 1.0 / (static_cast<double>(block_width) * std::ldexp(1.0, static_cast<int>(j)));
  }
};

struct FrequentConfig {
  std::size_t block_width = 16;
  std::vector<RationalPoly> targets;  // empty: enumerate_targets(1..J)
  std::size_t max_degree = 8;
  HighReal budget = HighReal(0.5);    // bound on the summed tail norms
  std::vector<HighReal> grid;         // empty: standard_grid()
};

struct FrequentBuild {
  TruncatedSeries f;
  FhcSchedule schedule;
  HighReal tail_norm;  // sum_j fuc_tail_norms(Q_j, m0)
};

inline FrequentBuild build_frequently_hypercyclic(const DunklWeights& w, double p,
                                                  const RateEnvelope& env, std::size_t J,
                                                  const FrequentConfig& cfg = {}) {
  if (J == 0) throw DomainError("build_frequently_hypercyclic needs J >= 1");
  if (J > 40) throw DomainError("build_frequently_hypercyclic supports J <= 40");
  if (!(p >= 1.0)) throw DomainError("build_frequently_hypercyclic needs p >= 1");
  if (env.kind() != EnvelopeKind::to_infinity) {
    throw DomainError("build_frequently_hypercyclic needs an envelope tending to infinity");
  }
  const std::size_t N = w.trunc_degree();
  const std::vector<HighReal> grid = cfg.grid.empty() ? standard_grid() : cfg.grid;
  env.validate_on(grid);

  FhcSchedule s;
  s.alpha = w.alpha();
  s.trunc_degree = N;
  s.p = p;
  s.block_width = cfg.block_width;
  long max_deg = 0;
  for (std::size_t j = 1; j <= J; ++j) {
    RationalPoly q;
    std::size_t index = 0;
    if (cfg.targets.empty()) {
      index = j;
      q = enumerate_targets(j, cfg.max_degree);
    } else {
      if (j > cfg.targets.size()) throw DomainError("fewer explicit targets than J");
      q = cfg.targets[j - 1];
      trim(q);
    }
    max_deg = std::max(max_deg, degree(q));
    s.target_indices.push_back(index);
    s.targets.push_back(std::move(q));
  }
  if (s.block_width == 0 || static_cast<long>(s.block_width) <= max_deg) {
    throw DomainError("infeasible schedule: block width B must exceed every target degree (B = " +
                      std::to_string(s.block_width) + ", max degree " + std::to_string(max_deg) +
                      ")");
  }
  if (N < s.block_width) throw DomainError("infeasible schedule: trunc_degree < B");

  const auto total_tail = [&](std::size_t m0) {
    HighReal sum = 0;
    try {
      for (const auto& q : s.targets) sum += fuc_tail_norms(q, w, p, env, m0, grid);
    } catch (const RangeError& e) {
      throw DomainError(std::string("infeasible schedule: ") + e.what());
    }
    return sum;
  };
  // smallest m0 whose tail bound fits the budget; the bound is nonincreasing in m0
  std::size_t lo = 0;
  std::size_t hi = s.last_placement();
  if (total_tail(hi) > cfg.budget) {
    throw DomainError("infeasible schedule: tail norm exceeds the budget for every offset m0");
  }
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (total_tail(mid) <= cfg.budget) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  s.offset = lo;
  for (std::size_t j = 1; j <= J; ++j) {
    if (s.offset + s.block_width * (std::size_t{1} << (j - 1)) > s.last_placement()) {
      throw DomainError("infeasible schedule: class A_" + std::to_string(j) +
                        " has no placement below trunc_degree - B");
    }
  }

  FrequentBuild out{TruncatedSeries(N), s, total_tail(s.offset)};
  for (std::size_t j = 1; j <= J; ++j) {
    for (std::size_t n : s.placements(j)) place_block(out.f, s.targets[j - 1], w, n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orbit frequencies

/// Lambda^n f for every n, from the nonzero coefficients of f. Low indices
/// (<= exact_degree) stay in full precision so targets can be subtracted;
/// higher ones are log terms.
class SparseOrbit {
 public:
  SparseOrbit(const TruncatedSeries& f, const DunklWeights& w, std::size_t exact_degree)
      : w_(w), exact_degree_(exact_degree) {
    for (std::size_t t = 0; t < f.size(); ++t) {
      LogTerm lt;
      if (make_log_term(t, f[t], lt)) {
        index_.push_back(t);
        coeff_.push_back(f[t]);
        log_.push_back(lt);
      }
    }
  }

  /// Terms of Lambda^n f - target, with log terms below `log_floor` at
  /// radius R (given as log R) dropped.
  CircleSampler minus(std::size_t n, const RationalPoly& target, long double log_radius,
                      long double log_floor) const {
    std::vector<Complex> low(exact_degree_ + 1);
    for (std::size_t i = 0; i < target.size() && i <= exact_degree_; ++i) {
      low[i] = Complex(-to_high(target[i]));
    }
    std::vector<LogTerm> terms;
    std::vector<LogTerm> high;
    const auto first = std::lower_bound(index_.begin(), index_.end(), n) - index_.begin();
    for (auto e = static_cast<std::size_t>(first); e < index_.size(); ++e) {
      const std::size_t t = index_[e];
      const std::size_t out = t - n;
      if (out <= exact_degree_) {
        low[out] += coeff_[e] * (w_.value(t) / w_.value(out));
        continue;
      }
      LogTerm lt = log_[e];
      lt.index = out;
      lt.log_abs += w_.log_value_ld(t) - w_.log_value_ld(out);
      if (lt.log_abs + static_cast<long double>(out) * log_radius < log_floor) continue;
      high.push_back(lt);
    }
    for (std::size_t i = 0; i <= exact_degree_; ++i) {
      LogTerm lt;
      if (make_log_term(i, low[i], lt)) terms.push_back(lt);
    }
    terms.insert(terms.end(), high.begin(), high.end());
    return CircleSampler(std::move(terms));
  }

 private:
  const DunklWeights& w_;
  std::size_t exact_degree_;
  std::vector<std::size_t> index_;
  std::vector<Complex> coeff_;
  std::vector<LogTerm> log_;
};

struct TargetFrequency {
  std::size_t j = 0;
  std::size_t hits = 0;
  double empirical = 0.0;  // hits / N_window
  double nominal = 0.0;    // 1 / (B 2^j)
};

/// Fraction of n in 1..N_window with sup_{|z|=R} |Lambda^n f - Q_j| < eps.
inline std::vector<TargetFrequency> frequency_report(const TruncatedSeries& f,
                                                     const FhcSchedule& schedule,
                                                     const DunklWeights& w,
                                                     std::size_t n_window, const HighReal& eps,
                                                     const HighReal& R, std::size_t m) {
  if (n_window == 0) throw DomainError("frequency_report needs N_window >= 1");
  if (n_window > f.trunc_degree() - std::min(f.trunc_degree(), schedule.block_width)) {
    throw DomainError("frequency_report needs N_window <= trunc_degree - B");
  }
  if (!(eps > 0) || !(R > 0) || m == 0) throw DomainError("frequency_report needs eps, R, m > 0");
  long exact = 0;
  for (const auto& q : schedule.targets) exact = std::max(exact, degree(q));
  const SparseOrbit orbit(f, w, static_cast<std::size_t>(std::max(0L, exact)));
  const long double log_r = to_long_double(boost::multiprecision::log(R));
  const long double log_eps = to_long_double(boost::multiprecision::log(eps));
  const long double floor = log_eps - 60.0L;

  std::vector<TargetFrequency> out;
  for (std::size_t j = 1; j <= schedule.size(); ++j) {
    TargetFrequency tf;
    tf.j = j;
    tf.nominal = schedule.nominal_density(j);
    for (std::size_t n = 1; n <= n_window; ++n) {
      const auto circle = orbit.minus(n, schedule.targets[j - 1], log_r, floor).at_log_radius(log_r);
      if (circle.is_zero()) {
        ++tf.hits;
        continue;
      }
      const long double v = circle.log_scale + std::log(static_cast<long double>(circle.max_modulus(m, false)));
      if (v < log_eps) ++tf.hits;
    }
    tf.empirical = static_cast<double>(tf.hits) / static_cast<double>(n_window);
    out.push_back(tf);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Density decay

struct DecayReport {
  double q = 1.0;
  std::vector<long double> sigma;           // sigma_m, m = 1..M (index m-1)
  std::vector<double> event_fraction;       // #{n <= m : |c_n d_n| > 1} / m
  long double sigma_window_min = 0;         // min sigma_m over m in [M/2, M]
  double event_window_min = 0;              // min event fraction over [M/2, M]
  bool bound_holds = true;                  // event_fraction <= sigma for every m
};

/// sigma_m = (1/m) sum_{n=0}^{m} (|c_n| d_n)^q. A frequently hypercyclic f
/// needs the event |Lambda^n f(0)| > 1 to have positive lower density, and
/// that density is at most liminf sigma_m.
inline DecayReport density_decay_check(const TruncatedSeries& f, const DunklWeights& w, double q,
                                       std::size_t M) {
  if (!(q >= 1.0 && q <= 2.0)) throw DomainError("density_decay_check needs 1 <= q <= 2");
  if (M == 0 || M > f.trunc_degree()) throw DomainError("density_decay_check needs 1 <= M <= trunc_degree");
  DecayReport out;
  out.q = q;
  long double acc = 0;
  std::size_t events = 0;
  const auto add = [&](std::size_t n) {
    if (f[n].is_zero()) return;
    const long double lv = to_long_double(boost::multiprecision::log(abs(f[n]))) + w.log_value_ld(n);
    acc += std::exp(static_cast<long double>(q) * lv);
    if (lv > 0) ++events;
  };
  add(0);
  for (std::size_t m = 1; m <= M; ++m) {
    add(m);
    const long double sigma = acc / static_cast<long double>(m);
    const double frac = static_cast<double>(events) / static_cast<double>(m);
    out.sigma.push_back(sigma);
    out.event_fraction.push_back(frac);
    if (static_cast<long double>(frac) > sigma) out.bound_holds = false;
  }
  const std::size_t from = std::max<std::size_t>(1, M / 2);
  out.sigma_window_min = *std::min_element(out.sigma.begin() + static_cast<long>(from - 1), out.sigma.end());
  out.event_window_min =
      *std::min_element(out.event_fraction.begin() + static_cast<long>(from - 1), out.event_fraction.end());
  return out;
}

// ---------------------------------------------------------------------------
// Plan files:
//   dunklplan v1
//   kind=hc | fhc
//   alpha=<decimal>
//   precision_bits=<int>
//   trunc_degree=<int>
// hc:  orbit_radius=<dec> blocks=<K>, then K lines
//      `block <k> index=<i> position=<m> budget=<dec> coeffs=<poly>`
// fhc: p=<dec|inf> block_width=<B> offset=<m0> targets=<J>, then J lines
//      `target <j> index=<i> coeffs=<poly>`

struct PlanFile {
  std::string kind;  // "hc" or "fhc"
  unsigned precision_bits = 0;
  std::optional<ConstructionPlan> hc;
  std::optional<FhcSchedule> fhc;
};

inline void write_plan(std::ostream& out, const ConstructionPlan& plan) {
  out << "dunklplan v1\nkind=hc\nalpha=" << to_decimal(plan.alpha)
      << "\nprecision_bits=" << precision_bits() << "\ntrunc_degree=" << plan.trunc_degree
      << "\norbit_radius=" << to_decimal(plan.orbit_radius) << "\nblocks=" << plan.size() << '\n';
  for (std::size_t k = 0; k < plan.size(); ++k) {
    out << "block " << (k + 1) << " index=" << plan.target_indices[k]
        << " position=" << plan.positions[k] << " budget=" << to_decimal(plan.budgets[k])
        << " coeffs=" << format_poly(plan.targets[k]) << '\n';
  }
}

inline void write_plan(std::ostream& out, const FhcSchedule& s) {
  out << "dunklplan v1\nkind=fhc\nalpha=" << to_decimal(s.alpha)
      << "\nprecision_bits=" << precision_bits() << "\ntrunc_degree=" << s.trunc_degree
      << "\np=" << (std::isinf(s.p) ? std::string("inf") : to_decimal(HighReal(s.p)))
      << "\nblock_width=" << s.block_width << "\noffset=" << s.offset
      << "\ntargets=" << s.size() << '\n';
  for (std::size_t j = 0; j < s.size(); ++j) {
    out << "target " << (j + 1) << " index=" << s.target_indices[j]
        << " coeffs=" << format_poly(s.targets[j]) << '\n';
  }
}

namespace detail {

inline std::size_t parse_count(const std::string& text, int line_no) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw FormatError("line " + std::to_string(line_no) + ": expected a nonnegative integer, got '" +
                      text + "'");
  }
}

// "key=value" fields after a leading word, e.g. `block 3 index=3 position=9`
inline std::string field(const std::string& line, const std::string& key, int line_no) {
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    if (tok.rfind(key + "=", 0) == 0) return tok.substr(key.size() + 1);
  }
  throw FormatError("line " + std::to_string(line_no) + ": missing field '" + key + "'");
}

}  // namespace detail

inline PlanFile read_plan(std::istream& in) {
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || line != "dunklplan v1") {
    throw FormatError("line 1: expected header 'dunklplan v1'");
  }
  const auto next_key = [&](const std::string& key) {
    ++line_no;
    return detail::expect_key(in, key, line_no);
  };
  const auto next_count = [&](const std::string& key) {
    const std::string text = next_key(key);
    return detail::parse_count(text, line_no);
  };
  PlanFile file;
  file.kind = next_key("kind");
  if (file.kind != "hc" && file.kind != "fhc") {
    throw FormatError("line 2: kind must be hc or fhc");
  }
  HighReal alpha;
  try {
    alpha = parse_high_real(next_key("alpha"));
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception&) {
    throw FormatError("line 3: bad alpha");
  }
  file.precision_bits =
      static_cast<unsigned>(next_count("precision_bits"));
  const std::size_t trunc = next_count("trunc_degree");

  const auto next_line = [&](const std::string& word) {
    ++line_no;
    if (!std::getline(in, line)) {
      throw FormatError("line " + std::to_string(line_no) + ": unexpected end of file");
    }
    if (line.rfind(word + " ", 0) != 0) {
      throw FormatError("line " + std::to_string(line_no) + ": expected '" + word + " ...'");
    }
  };

  if (file.kind == "hc") {
    ConstructionPlan plan;
    plan.alpha = alpha;
    plan.trunc_degree = trunc;
    try {
      plan.orbit_radius = parse_high_real(next_key("orbit_radius"));
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception&) {
      throw FormatError("line " + std::to_string(line_no) + ": bad orbit_radius");
    }
    const std::size_t K = next_count("blocks");
    for (std::size_t k = 0; k < K; ++k) {
      next_line("block");
      plan.target_indices.push_back(detail::parse_count(detail::field(line, "index", line_no), line_no));
      plan.positions.push_back(detail::parse_count(detail::field(line, "position", line_no), line_no));
      try {
        plan.budgets.push_back(parse_high_real(detail::field(line, "budget", line_no)));
      } catch (const FormatError&) {
        throw;
      } catch (const std::exception&) {
        throw FormatError("line " + std::to_string(line_no) + ": bad budget");
      }
      try {
        plan.targets.push_back(parse_poly(detail::field(line, "coeffs", line_no)));
      } catch (const FormatError& e) {
        throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
      }
      plan.block_norms.emplace_back(0);
    }
    file.hc = std::move(plan);
  } else {
    FhcSchedule s;
    s.alpha = alpha;
    s.trunc_degree = trunc;
    const std::string p = next_key("p");
    try {
      s.p = p == "inf" ? kInfinity : std::stod(p);
    } catch (const std::exception&) {
      throw FormatError("line " + std::to_string(line_no) + ": bad p");
    }
    s.block_width = next_count("block_width");
    s.offset = next_count("offset");
    const std::size_t J = next_count("targets");
    for (std::size_t j = 0; j < J; ++j) {
      next_line("target");
      s.target_indices.push_back(detail::parse_count(detail::field(line, "index", line_no), line_no));
      try {
        s.targets.push_back(parse_poly(detail::field(line, "coeffs", line_no)));
      } catch (const FormatError& e) {
        throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (s.block_width == 0 || s.block_width > trunc) throw FormatError("block_width out of range");
    file.fhc = std::move(s);
  }
  return file;
}

}  // namespace dunkl
