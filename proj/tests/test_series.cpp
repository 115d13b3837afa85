#include "test_support.hpp"

#include <sstream>

using namespace dunkl;
using testing::exp_series;
using testing::rel_err;

TEST_CASE("monomials", "[series]") {
  const TruncatedSeries one = monomial(8, 0, Complex(1.0));
  CHECK(one.degree() == 0);
  CHECK(one[0] == Complex(1.0));

  const TruncatedSeries f = monomial(8, 3, Complex(2.0));
  CHECK(f.degree() == 3);
  CHECK(f[3] == Complex(2.0));
  CHECK(f[2].is_zero());

  CHECK_THROWS_AS(monomial(8, 9, Complex(1.0)), RangeError);
  CHECK(TruncatedSeries(4).is_zero());
}

TEST_CASE("pointwise evaluation", "[series]") {
  TruncatedSeries f(4);
  f.set(0, Complex(1.0));
  f.set(1, Complex(1.0));
  CHECK(evaluate(f, Complex(0.0, 1.0)) == Complex(1.0, 1.0));
  CHECK(evaluate(monomial(4, 3, Complex(1.0)), Complex(2.0)) == Complex(8.0));
}

TEST_CASE("truncated exponential at z = 1 is e to the truncation tail", "[series]") {
  const Complex v = evaluate(exp_series(64), Complex(1.0));
  // the omitted tail is below 2/65!
  CHECK(boost::multiprecision::abs(v.re - euler_e()) < HighReal("1e-60"));
  CHECK(v.im == 0);
}

TEST_CASE("circle evaluation examples", "[series]") {
  const auto z = evaluate_circle(monomial(4, 1, Complex(1.0)), HighReal(1), 4);
  REQUIRE(z.size() == 4);
  const std::vector<Complex> want = {Complex(1.0), Complex(0.0, 1.0), Complex(-1.0), Complex(0.0, -1.0)};
  for (std::size_t j = 0; j < 4; ++j) CHECK(abs(z[j] - want[j]) < precision_unit(8));

  for (const auto& v : evaluate_circle(monomial(4, 0, Complex(1.0)), HighReal(7), 3)) CHECK(v == Complex(1.0));

  for (const auto& v : evaluate_circle(monomial(4, 2, Complex(1.0)), HighReal(2), 2)) {
    CHECK(abs(v - Complex(4.0)) < precision_unit(8));
  }
}

TEST_CASE("linear operations", "[series]") {
  const TruncatedSeries z = monomial(4, 1, Complex(1.0));
  CHECK(add(z, z)[1] == Complex(2.0));
  CHECK(subtract(z, z).is_zero());
  CHECK(scale(z, Complex(0.0, 3.0))[1] == Complex(0.0, 3.0));
  CHECK_THROWS_AS(add(z, TruncatedSeries(5)), RangeError);
}

TEST_CASE("sup on the disk of a monomial is R^n for any sample count", "[series]") {
  for (std::size_t n : {0u, 1u, 5u, 40u}) {
    for (std::size_t m : {1u, 3u, 64u}) {
      const HighReal R("1.75");
      const HighReal got = sup_on_disk(monomial(64, n, Complex(1.0)), R, m);
      CHECK(rel_err(got, boost::multiprecision::pow(R, n)) < 1e-14);
    }
  }
}

TEST_CASE("sup on the unit disk of the exponential against a dense oracle", "[series]") {
  const TruncatedSeries f = exp_series(64);
  const HighReal coarse = sup_on_disk(f, HighReal(1), 512);
  const HighReal dense = sup_on_disk(f, HighReal(1), 1 << 16);
  CHECK(boost::multiprecision::abs(coarse - dense) < HighReal("1e-3"));
  CHECK(rel_err(dense, euler_e()) < 1e-12);
}

TEST_CASE("scaled-double circle samples match full-precision evaluation", "[series][property]") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> lr(-2.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const TruncatedSeries f = testing::random_poly(rng, 40, 64);
    if (f.is_zero()) continue;
    const HighReal r = boost::multiprecision::exp(HighReal(lr(rng)));
    const std::size_t m = 16 + static_cast<std::size_t>(trial);
    const auto exact = evaluate_circle(f, r, m);
    const auto circle = CircleSampler::from_series(f).at_radius(r);
    const auto fast = circle.samples(m);
    HighReal top = 0;
    for (const auto& v : exact) top = std::max(top, abs(v));
    for (std::size_t j = 0; j < m; ++j) {
      // restore the dropped common phase e^{i lowest t}
      const double t = 2.0 * std::numbers::pi * static_cast<double>(circle.lowest * j % m) / static_cast<double>(m);
      const std::complex<double> v = fast[j] * std::polar(1.0, t);
      const HighReal got_re = rescale(circle.log_scale, v.real());
      const HighReal got_im = rescale(circle.log_scale, v.imag());
      const HighReal err = abs(Complex(got_re, got_im) - exact[j]);
      CHECK(testing::to_double(err / top) < 1e-12);
    }
  }
}

TEST_CASE("series files round-trip and re-evaluate identically", "[series][property]") {
  std::mt19937_64 rng(22);
  const TruncatedSeries f = testing::random_poly(rng, 60, 80);
  std::stringstream io;
  write_series(io, f, HighReal("0.75"));
  const SeriesFile back = read_series(io);
  CHECK(back.alpha == HighReal("0.75"));
  CHECK(back.precision_bits == precision_bits());
  REQUIRE(back.series.trunc_degree() == f.trunc_degree());
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const Complex z(u(rng), u(rng));
    CHECK(evaluate(back.series, z) == evaluate(f, z));
  }
}

TEST_CASE("malformed series files are rejected with a line number", "[series]") {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_series(in);
  };
  CHECK_THROWS_AS(parse("dunklseries v2\n"), FormatError);
  CHECK_THROWS_WITH(parse("dunklseries v1\nalpha=0\nprecision_bits=256\nn_coeffs=2\n0 1 0\n"),
                    Catch::Matchers::ContainsSubstring("line 6"));
  CHECK_THROWS_WITH(parse("dunklseries v1\nalpha=0\nprecision_bits=256\nn_coeffs=1\n0 one 0\n"),
                    Catch::Matchers::ContainsSubstring("one"));
  CHECK_THROWS_AS(parse("dunklseries v1\nbeta=0\n"), FormatError);
}
