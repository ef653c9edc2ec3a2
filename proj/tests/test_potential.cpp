#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qps/potential.hpp"
#include "test_support.hpp"

using namespace qps;
namespace ts = testing_support;

TEST_CASE("frequency vector enforces the standing assumptions") {
  CHECK_THROWS_AS(FrequencyVector({}, 0.5, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyVector({0.0, 0.0}, 0.5, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyVector({1.0}, 0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyVector({1.0}, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyVector({1.0, ts::kSqrt2}, 0.5, 2.0), std::invalid_argument);
  CHECK_NOTHROW(FrequencyVector({1.0, ts::kSqrt2}, 0.5, 2.5));
}

TEST_CASE("validate_potential evaluates the decay inequality on both sides") {
  FrequencyVector f({1.0}, 0.5, 1.5);

  SUBCASE("zero potential has no violations") {
    FourierPotential p(f, {}, 0.0, 1.0);
    CHECK(validate_potential(p).ok());
  }
  SUBCASE("coefficient above the envelope is named") {
    std::map<MultiIndex, std::complex<double>> c{{{1}, 0.001}, {{-1}, 0.001}};
    FourierPotential p(f, c, 0.001, 1.0);
    const auto rep = validate_potential(p);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.violations.size() == 2);  // both signs violate
    CHECK(rep.violations.front().n == MultiIndex{-1});
    CHECK(rep.violations.front().lhs == doctest::Approx(0.001));
    CHECK(rep.violations.front().rhs == doctest::Approx(0.001 * std::exp(-1.0)));
  }
  SUBCASE("coefficient below the envelope passes") {
    std::map<MultiIndex, std::complex<double>> c{{{1}, 0.0003}, {{-1}, 0.0003}};
    FourierPotential p(f, c, 0.001, 1.0);
    CHECK(validate_potential(p).ok());
  }
  SUBCASE("origin coefficient and missing mirror are violations") {
    std::map<MultiIndex, std::complex<double>> c{{{0}, 0.1}, {{2}, 1e-5}};
    FourierPotential p(f, c, 0.001, 1.0);
    const auto rep = validate_potential(p);
    CHECK(rep.violations.size() == 2);
  }
  SUBCASE("idempotent and order-independent") {
    std::map<MultiIndex, std::complex<double>> c;
    c[{1}] = std::complex<double>(1e-4, 2e-5);
    c[{-1}] = std::conj(c[{1}]);
    c[{3}] = std::complex<double>(1e-6, 0.0);
    c[{-3}] = 1e-6;
    FourierPotential p(f, c, 0.001, 1.0);
    const auto r1 = validate_potential(p);
    const auto r2 = validate_potential(p);
    CHECK(r1.to_string() == r2.to_string());
  }
}

TEST_CASE("eval_potential") {
  SUBCASE("zero potential is zero") {
    CHECK(eval_potential(ts::free_potential(), 1.234) == 0.0);
  }
  SUBCASE("cosine pair at the origin and at pi") {
    const double g = 1e-3;
    const auto p = ts::periodic_potential(g);
    CHECK(eval_potential(p, 0.0) == doctest::Approx(2.0 * g).epsilon(1e-12));
    CHECK(eval_potential(p, M_PI) == doctest::Approx(-2.0 * g).epsilon(1e-12));
  }
  SUBCASE("real-valued for hermitian maps: |Im| below 1e-12 * sum|c|") {
    const auto p = ts::golden_potential();
    std::mt19937_64 rng(7);
    const double budget = 1e-12 * p.coeff_l1();
    for (int i = 0; i < 1000; ++i) {
      const double x = 200.0 * (double(rng() >> 11) * 0x1.0p-53 - 0.5);
      std::complex<double> s(0.0, 0.0);
      for (const auto& [n, c] : p.coeffs)
        s += c * std::exp(std::complex<double>(0.0, p.freq.dot(n) * x));
      CHECK(std::abs(s.imag()) < budget);
      CHECK(eval_potential(p, x) == s.real());
    }
  }
  SUBCASE("periodicity for nu = 1") {
    const auto p = ts::periodic_potential(1e-3);
    for (double x : {0.0, 0.7, 2.9, -4.2})
      CHECK(eval_potential(p, x + 2.0 * M_PI) ==
            doctest::Approx(eval_potential(p, x)).epsilon(1e-12));
  }
}

namespace {
// brute-force reference in long double, no canonicalization tricks
struct BruteScan {
  long double worst_ratio = 1e300L;
  long double min_den = 1e300L;
};
BruteScan brute_diophantine(const FrequencyVector& f, int N) {
  BruteScan out;
  for_each_in_ball(f.nu, N, [&](const MultiIndex& n) {
    if (is_zero(n)) return;
    long double d = 0.0L;
    for (int i = 0; i < f.nu; ++i) d += (long double)f.omega[i] * n[i];
    d = fabsl(d);
    const long double r = d * powl((long double)l1_norm(n), (long double)f.b0);
    out.worst_ratio = std::min(out.worst_ratio, r);
    out.min_den = std::min(out.min_den, d);
  });
  return out;
}
}  // namespace

TEST_CASE("diophantine_scan") {
  SUBCASE("integer frequency: worst ratio 1 at n = 1") {
    FrequencyVector f({1.0}, 0.5, 1.5);
    for (int N : {1, 4, 9}) {
      const auto scan = diophantine_scan(f, N);
      CHECK(scan.worst_ratio == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(scan.worst_n == MultiIndex{1});
      CHECK(scan.holds(f.a0));
    }
  }
  SUBCASE("omega = (1, sqrt 2): Pell denominators") {
    FrequencyVector f({1.0, ts::kSqrt2}, 0.5, 2.5);
    const auto s5 = diophantine_scan(f, 5);
    CHECK(s5.min_denominator == doctest::Approx(0.1715728752538097).epsilon(1e-12));
    CHECK(s5.min_denominator_n == MultiIndex{3, -2});
    CHECK(s5.worst_ratio == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s5.worst_n == MultiIndex{1, 0});

    const auto s12 = diophantine_scan(f, 12);
    CHECK(s12.min_denominator == doctest::Approx(0.0710678118654755).epsilon(1e-10));
    CHECK(s12.min_denominator_n == MultiIndex{7, -5});
    CHECK(s12.holds(f.a0));

    const auto brute = brute_diophantine(f, 12);
    CHECK(s12.worst_ratio == doctest::Approx((double)brute.worst_ratio).epsilon(1e-13));
    CHECK(s12.min_denominator == doctest::Approx((double)brute.min_den).epsilon(1e-13));
  }
  SUBCASE("nonincreasing in N") {
    FrequencyVector f({1.0, ts::kSqrt2}, 0.5, 2.5);
    double prev = std::numeric_limits<double>::infinity();
    for (int N = 1; N <= 14; ++N) {
      const auto s = diophantine_scan(f, N);
      CHECK(s.worst_ratio <= prev + 1e-18);
      prev = s.worst_ratio;
    }
  }
  SUBCASE("rationally dependent omega reports the dependency") {
    FrequencyVector f({1.0, 0.5}, 0.5, 2.5);
    try {
      diophantine_scan(f, 3);
      FAIL("expected DegenerateFrequencyError");
    } catch (const DegenerateFrequencyError& e) {
      CHECK(e.dependency == MultiIndex{1, -2});
    }
  }
  SUBCASE("threaded scan agrees with serial") {
    FrequencyVector f({1.0, ts::kSqrt2}, 0.5, 2.5);
    const auto s1 = diophantine_scan(f, 10, 1);
    const auto s4 = diophantine_scan(f, 10, 4);
    CHECK(s1.worst_ratio == s4.worst_ratio);
    CHECK(s1.worst_n == s4.worst_n);
  }
}
