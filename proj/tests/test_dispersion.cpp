#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qps/dispersion.hpp"
#include "test_support.hpp"

using namespace qps;
namespace ts = testing_support;
using cd = std::complex<double>;

TEST_CASE("build_matrix") {
  SUBCASE("zero potential is diagonal with (n.omega + k)^2") {
    const auto p = ts::free_potential(2);
    const auto g = build_matrix(p, 0.3, 3);
    CHECK(g.basis.size() == ball_size(2, 3));
    for (int i = 0; i < g.matrix.rows(); ++i)
      for (int j = 0; j < g.matrix.cols(); ++j) {
        if (i == j) {
          const double q = p.freq.dot(g.basis[i]) + 0.3;
          CHECK(g.matrix(i, i) == cd(q * q, 0.0));
        } else {
          CHECK(g.matrix(i, j) == cd(0.0, 0.0));
        }
      }
  }
  SUBCASE("periodic pair couples adjacent modes") {
    const double g = 1e-3;
    const auto p = ts::periodic_potential(g);
    const auto op = build_matrix(p, 0.3, 1);
    REQUIRE(op.matrix.rows() == 3);
    const int i0 = op.index_of({0}), im = op.index_of({-1}), ip = op.index_of({1});
    CHECK(op.matrix(i0, i0) == cd(0.09, 0.0));
    CHECK(op.matrix(im, im).real() == doctest::Approx(0.49).epsilon(1e-15));
    CHECK(op.matrix(ip, ip).real() == doctest::Approx(1.69).epsilon(1e-15));
    CHECK(op.matrix(ip, i0) == cd(g, 0.0));    // c(1)
    CHECK(op.matrix(i0, im) == cd(g, 0.0));    // c(1)
    CHECK(op.matrix(ip, im) == cd(0.0, 0.0));  // c(2) = 0
    CHECK((op.matrix - op.matrix.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("dimension count and cap") {
    CHECK(ball_size(2, 2) == 13);
    const auto p = ts::free_potential(2);
    CHECK(build_matrix(p, 0.0, 2).matrix.rows() == 13);
    CHECK_THROWS_AS(build_matrix(p, 0.0, 200, 1000), BoxTooLargeError);
  }
}

TEST_CASE("eigensolve_hermitian") {
  SUBCASE("diagonal matrix: sorted diagonal, coordinate vectors") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = 3.0; m(1, 1) = -1.0; m(2, 2) = 2.0; m(3, 3) = 0.5;
    const auto sol = eigensolve_hermitian(m);
    const double expect[] = {-1.0, 0.5, 2.0, 3.0};
    for (int i = 0; i < 4; ++i) {
      CHECK(sol.values(i) == doctest::Approx(expect[i]).epsilon(1e-15));
      int big = 0;
      for (int r = 1; r < 4; ++r)
        if (std::abs(sol.vectors(r, i)) > std::abs(sol.vectors(big, i))) big = r;
      CHECK(std::abs(sol.vectors(big, i)) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("2x2 closed form with complex coupling") {
    const double a = 0.7, b = -0.4;
    const cd g(2e-3, -1e-3);
    Eigen::MatrixXcd m(2, 2);
    m << a, g, std::conj(g), b;
    const auto sol = eigensolve_hermitian(m);
    const double disc = std::sqrt(0.25 * (a - b) * (a - b) + std::norm(g));
    CHECK(sol.values(0) == doctest::Approx(0.5 * (a + b) - disc).epsilon(1e-14));
    CHECK(sol.values(1) == doctest::Approx(0.5 * (a + b) + disc).epsilon(1e-14));
  }
  SUBCASE("random 50x50: residual contract in full") {
    std::mt19937_64 rng(5);
    auto u = [&] { return double(rng() >> 11) * 0x1.0p-53 - 0.5; };
    Eigen::MatrixXcd m(50, 50);
    for (int j = 0; j < 50; ++j) {
      m(j, j) = cd(4.0 * u(), 0.0);
      for (int i = 0; i < j; ++i) {
        m(i, j) = cd(u(), u());
        m(j, i) = std::conj(m(i, j));
      }
    }
    const auto sol = eigensolve_hermitian(m);
    const double norm_m = std::max(std::abs(sol.values(0)), std::abs(sol.values(49)));
    for (int i = 0; i < 50; ++i) {
      CHECK((m * sol.vectors.col(i) - sol.values(i) * sol.vectors.col(i)).norm() <=
            1e-10 * norm_m);
      if (i) CHECK(sol.values(i) >= sol.values(i - 1));
    }
    CHECK((sol.vectors.adjoint() * sol.vectors - Eigen::MatrixXcd::Identity(50, 50))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
  SUBCASE("rejects non-hermitian input") {
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    CHECK_THROWS_AS(eigensolve_hermitian(m), std::invalid_argument);
  }
}

TEST_CASE("dispersion_at") {
  SUBCASE("free dispersion is exact") {
    const auto p = ts::free_potential(1);
    for (double k : {0.1, 0.37, 1.21, 2.6}) {
      const auto s = dispersion_at(p, k, 6);
      CHECK(std::abs(s.energy - k * k) < 1e-12);
      CHECK(s.phi.at({0}) == cd(1.0, 0.0));
      for (const auto& [n, c] : s.phi)
        if (!is_zero(n)) CHECK(std::abs(c) < 1e-14);
      CHECK(s.trunc_error < 1e-10);
    }
  }
  SUBCASE("second-order perturbation oracle, frozen") {
    const double g = 1e-3;
    const auto p = ts::periodic_potential(g);
    // oracle: k^2 - 2 g^2 / (1 - 4 k^2) at k = 0.1
    const double correction = -2.0 * g * g / (1.0 - 4.0 * 0.1 * 0.1);
    CHECK(correction == doctest::Approx(-2.0833333333333333e-6).epsilon(1e-12));
    CHECK(ts::pt2_energy(p, 0.1) == doctest::Approx(0.1 * 0.1 + correction).epsilon(1e-15));
    const auto s = dispersion_at(p, 0.1, 6);
    CHECK(std::abs(s.energy - (0.01 + correction)) < 1e-9);
  }
  SUBCASE("galerkin convergence ratio test") {
    const auto p = ts::golden_potential();
    for (double k : {0.11, 0.37}) {
      const double e4 = dispersion_at(p, k, 6).energy;
      const double e8 = dispersion_at(p, k, 12).energy;
      const double e16 = dispersion_at(p, k, 24).energy;
      CHECK(std::abs(e8 - e16) <= std::max(std::abs(e4 - e8), 1e-13));
    }
  }
  SUBCASE("symmetry E(-k) = E(k), phi(n;-k) = conj(phi(-n;k))") {
    const auto p = ts::golden_potential();
    for (double k : {0.11, 0.23, 0.37}) {
      const auto sp = dispersion_at(p, k, 8);
      const auto sm = dispersion_at(p, -k, 8);
      CHECK(std::abs(sp.energy - sm.energy) <=
            2.0 * (sp.trunc_error + sm.trunc_error) + 1e-12);
      for (const auto& [n, c] : sp.phi) {
        const cd other = sm.phi.at(negated(n));
        CHECK(std::abs(other - std::conj(c)) < 1e-9);
      }
    }
  }
  SUBCASE("energy symmetry over 100 random momenta") {
    const auto p = ts::golden_potential();
    std::mt19937_64 rng(2718);
    int tested = 0;
    while (tested < 100) {
      const double k = 0.05 + 3.0 * (double(rng() >> 11) * 0x1.0p-53);
      try {
        const auto sp = dispersion_at(p, k, 6);
        const auto sm = dispersion_at(p, -k, 6);
        CHECK(std::abs(sp.energy - sm.energy) <=
              2.0 * (sp.trunc_error + sm.trunc_error) + 1e-12);
        ++tested;
      } catch (const AmbiguousSelectionError&) {
        // near-resonant draw; skip
      }
    }
  }
  SUBCASE("near-resonant k is reported ambiguous") {
    const auto p = ts::periodic_potential(1e-3);
    CHECK_THROWS_AS(dispersion_at(p, 0.5 + 1e-9, 6), AmbiguousSelectionError);
  }
}

TEST_CASE("gap_edges") {
  SUBCASE("free operator has no gaps") {
    const auto p = ts::free_potential(1);
    const auto e = gap_edges(p, {1}, 6);
    CHECK(e.closed);
    CHECK(e.e_minus == e.e_plus);
    CHECK(e.e_minus == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("first periodic gap: width 2g by the two-level oracle") {
    const double g = 1e-3;
    const auto p = ts::periodic_potential(g);
    const auto e = gap_edges(p, {1}, 8);
    CHECK_FALSE(e.closed);
    CHECK(e.mass_ok);
    CHECK(e.mass_min > 0.99);
    CHECK(e.method2_sides == 2);
    // two-level oracle: eigenvalues k^2 +- |c(1)| at k = 1/2
    CHECK(std::abs((e.e_plus - e.e_minus) - 2.0 * g) < 1e-5);
    CHECK(0.5 * (e.e_plus + e.e_minus) == doctest::Approx(0.25).epsilon(1e-2));
    CHECK(e.err < 1e-6);
    // method-1 vs method-2 agreement within err
    CHECK(std::abs(*e.method2_minus - e.e_minus) <= e.err);
    CHECK(std::abs(*e.method2_plus - e.e_plus) <= e.err);
    // decay bound with the honest eps = g e^{kappa0}
    CHECK(e.e_plus - e.e_minus <=
          2.0 * p.eps * std::exp(-0.5 * p.kappa0) + 2.0 * e.err);
  }
  SUBCASE("label sign is immaterial") {
    const auto p = ts::periodic_potential(1e-3);
    const auto e1 = gap_edges(p, {1}, 8);
    const auto e2 = gap_edges(p, {-1}, 8);
    CHECK(e1.e_minus == e2.e_minus);
    CHECK(e1.e_plus == e2.e_plus);
  }
  SUBCASE("rejects labels outside the box and the origin") {
    const auto p = ts::periodic_potential(1e-3);
    CHECK_THROWS_AS(gap_edges(p, {9}, 8), std::invalid_argument);
    CHECK_THROWS_AS(gap_edges(p, {0}, 8), std::invalid_argument);
  }
}

TEST_CASE("verify_dispersion_bounds") {
  SUBCASE("free dispersion satisfies both bounds") {
    const auto p = ts::free_potential(1);
    const auto r = verify_dispersion_bounds(p, 0.2, 0.35, 1e-2, 6);
    CHECK(r.pass);
    CHECK(r.diff == doctest::Approx(0.35 * 0.35 - 0.04).epsilon(1e-9));
    CHECK(r.k0 == doctest::Approx(0.35 / 1024.0).epsilon(1e-15));
    CHECK(r.lower_margin > 0.0);
    CHECK(r.upper_margin > 0.0);
  }
  SUBCASE("monotonicity on the periodic example") {
    const auto p = ts::periodic_potential(1e-3);
    for (auto [k1, k] : std::vector<std::pair<double, double>>{
             {0.1, 0.2}, {0.3, 0.42}, {0.55, 0.71}, {0.8, 0.95}}) {
      const auto r = verify_dispersion_bounds(p, k1, k, 1e-2, 8);
      CHECK(r.diff > 0.0);
      CHECK(r.pass);
    }
  }
  SUBCASE("rejects out-of-range pairs") {
    const auto p = ts::free_potential(1);
    CHECK_THROWS_AS(verify_dispersion_bounds(p, -0.1, 0.1, 1e-2, 6), std::invalid_argument);
    CHECK_THROWS_AS(verify_dispersion_bounds(p, 0.2, 0.1, 1e-2, 6), std::invalid_argument);
    CHECK_THROWS_AS(verify_dispersion_bounds(p, 0.2, 0.5, 1e-2, 6), std::invalid_argument);
  }
}

TEST_CASE("floquet_residual") {
  std::vector<double> xs;
  for (int i = 0; i <= 64; ++i) xs.push_back(-10.0 + 20.0 * i / 64.0);

  SUBCASE("plane wave solves the free equation") {
    const auto p = ts::free_potential(1);
    const auto s = dispersion_at(p, 0.37, 6);
    const auto r = floquet_residual(p, s, xs);
    CHECK(r.max_residual < 1e-12);
    CHECK(r.tail_bound == 0.0);
  }
  SUBCASE("periodic example: small residual, dominated by the tail bound") {
    const auto p = ts::periodic_potential(1e-3);
    const auto s = dispersion_at(p, 0.2, 8);
    const auto r = floquet_residual(p, s, xs);
    CHECK(r.max_residual < 1e-8);
    CHECK(r.max_residual <= r.tail_bound + 1e-10);
  }
  SUBCASE("residual shrinks as the box doubles") {
    const auto p = ts::periodic_potential(1e-3);
    double prev = -1.0;
    for (int N : {2, 4, 8}) {
      const auto s = dispersion_at(p, 0.2, N);
      const double res = floquet_residual(p, s, xs).max_residual;
      if (prev >= 0.0) CHECK(res <= 10.0 * prev);
      prev = res;
    }
  }
}
