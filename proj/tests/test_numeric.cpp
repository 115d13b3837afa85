#include "test_support.hpp"

#include <boost/multiprecision/cpp_int.hpp>

using namespace dunkl;
using testing::rel_err;

TEST_CASE("log_gamma at the textbook points", "[numeric]") {
  CHECK(log_gamma(HighReal(1)) == 0);
  CHECK(rel_err(log_gamma(HighReal(5)), boost::multiprecision::log(HighReal(24))) < precision_unit(8));
  CHECK(rel_err(log_gamma(HighReal("0.5")), boost::multiprecision::log(pi()) / 2) < precision_unit(16));
  CHECK_THROWS_AS(log_gamma(HighReal(0)), DomainError);
  CHECK_THROWS_AS(log_gamma(HighReal(-2)), DomainError);
}

TEST_CASE("log_gamma agrees with the MPFR gamma function", "[numeric][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 9.0);
  for (int i = 0; i < 200; ++i) {
    const HighReal x = boost::multiprecision::exp(HighReal(u(rng)));
    const HighReal oracle = boost::multiprecision::lgamma(x);
    const HighReal got = log_gamma(x);
    // absolute near the zeros of ln Gamma at 1 and 2, relative elsewhere
    const HighReal scale = std::max(HighReal(1), boost::multiprecision::abs(oracle));
    INFO("x = " << to_decimal(x, 20));
    CHECK(boost::multiprecision::abs(got - oracle) / scale < precision_unit(16));
  }
}

TEST_CASE("log_gamma satisfies the recurrence ln Gamma(x+1) = ln Gamma(x) + ln x", "[numeric][property]") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.05, 300.0);
  for (int i = 0; i < 100; ++i) {
    const HighReal x(u(rng));
    const HighReal lhs = log_gamma(x + 1);
    const HighReal rhs = log_gamma(x) + boost::multiprecision::log(x);
    CHECK(boost::multiprecision::abs(lhs - rhs) < precision_unit(20) * std::max(HighReal(1), boost::multiprecision::abs(lhs)));
  }
}

TEST_CASE("log_gamma follows the working precision", "[numeric]") {
  ScopedPrecision wide(512);
  const HighReal got = log_gamma(HighReal("0.5"));
  CHECK(rel_err(got, boost::multiprecision::log(pi()) / 2) < precision_unit(16));
  CHECK(precision_unit() < HighReal("1e-150"));
}

TEST_CASE("log_scaled_sum examples", "[numeric]") {
  const std::vector<LogScaled> ones = {LogScaled::from_log(1, HighReal(0)), LogScaled::from_log(1, HighReal(0))};
  const LogScaled two = log_scaled_sum(ones);
  CHECK(two.sign == 1);
  CHECK(rel_err(two.log_mag, boost::multiprecision::log(HighReal(2))) < precision_unit(4));

  const HighReal x("3.25");
  const std::vector<LogScaled> cancel = {LogScaled::from_log(1, x), LogScaled::from_log(-1, x)};
  CHECK(log_scaled_sum(cancel).sign == 0);
  CHECK(log_scaled_sum(std::vector<LogScaled>{}).is_zero());
}

TEST_CASE("log_scaled_sum at extreme magnitudes matches exact rational sums", "[numeric][property]") {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  const HighReal ln10 = boost::multiprecision::log(HighReal(10));

  // 10^e + 10^-e for exponents small enough for an exact rational oracle,
  // then the same code path at e = 400
  for (int e : {1, 5, 20, 60}) {
    const cpp_int big = boost::multiprecision::pow(cpp_int(10), e);
    const cpp_rational exact = cpp_rational(big) + cpp_rational(cpp_int(1), big);
    const HighReal oracle = boost::multiprecision::log(detail::to_high(exact));
    const std::vector<LogScaled> terms = {LogScaled::from_log(1, e * ln10), LogScaled::from_log(1, -e * ln10)};
    const LogScaled s = log_scaled_sum(terms);
    CHECK(s.sign == 1);
    CHECK(rel_err(s.log_mag, oracle) < precision_unit(8));
  }
  const std::vector<LogScaled> huge = {LogScaled::from_log(1, 400 * ln10), LogScaled::from_log(1, -400 * ln10)};
  const LogScaled s = log_scaled_sum(huge);
  CHECK(s.sign == 1);
  CHECK(rel_err(s.log_mag, 400 * ln10) < precision_unit(8));
}

TEST_CASE("log_scaled_sum signed mixtures match direct summation", "[numeric][property]") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> mag(-30.0, 30.0);
  std::bernoulli_distribution neg(0.4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LogScaled> terms;
    HighReal direct = 0;
    for (int i = 0; i < 12; ++i) {
      const HighReal lm(mag(rng));
      const int sign = neg(rng) ? -1 : 1;
      terms.push_back(LogScaled::from_log(sign, lm));
      direct += sign * boost::multiprecision::exp(lm);
    }
    const LogScaled s = log_scaled_sum(terms);
    CHECK(rel_err(s.to_high(), direct) < precision_unit(40));
  }
}

TEST_CASE("decimal strings round-trip at the working precision", "[numeric][property]") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-700.0, 700.0);
  for (int i = 0; i < 100; ++i) {
    const HighReal x = boost::multiprecision::exp(HighReal(u(rng))) / 3;
    CHECK(parse_high_real(to_decimal(x)) == x);
    CHECK(parse_high_real(to_decimal(-x)) == -x);
  }
  CHECK(to_decimal(HighReal(0)) == "0");
  CHECK(boost::multiprecision::isinf(parse_high_real("inf")));
  CHECK_THROWS_AS(parse_high_real("1.5x"), FormatError);
  CHECK_THROWS_AS(parse_high_real(""), FormatError);
}

TEST_CASE("precision control", "[numeric]") {
  CHECK(precision_bits() == 256);
  {
    ScopedPrecision narrow(64);
    CHECK(precision_bits() == 64);
    CHECK(HighReal(1).precision() < 30);
  }
  CHECK(precision_bits() == 256);
  CHECK(HighReal(1).precision() >= 77);
  CHECK_THROWS_AS(set_precision_bits(8), DomainError);
}

TEST_CASE("complex arithmetic", "[numeric]") {
  const Complex a(HighReal(1), HighReal(2));
  const Complex b(HighReal(3), HighReal(-1));
  CHECK(a * b == Complex(HighReal(5), HighReal(5)));
  CHECK(rel_err((a * b) / b, a) < precision_unit(4));
  CHECK(abs(Complex(HighReal(3), HighReal(4))) == 5);
  CHECK(rel_err(unit(pi() / 2), Complex(HighReal(0), HighReal(1))) < precision_unit(4));
}
