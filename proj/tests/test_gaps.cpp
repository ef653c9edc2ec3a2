#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qps/gaps.hpp"
#include "test_support.hpp"

using namespace qps;
namespace ts = testing_support;

namespace {
GapCatalog synthetic_catalog(int nu, double eps, double kappa0,
                             std::vector<Gap> gaps, double bottom = 0.0) {
  GapCatalog cat;
  cat.nu = nu;
  cat.eps = eps;
  cat.kappa0 = kappa0;
  cat.bottom = bottom;
  cat.label_radius = 4;
  cat.tail_mass = 0.0;
  cat.gaps = std::move(gaps);
  return cat;
}
}  // namespace

TEST_CASE("shell counts") {
  SUBCASE("exact counts match brute-force enumeration") {
    for (int nu = 1; nu <= 3; ++nu)
      for (int r = 0; r <= 7; ++r) {
        int brute = 0;
        for_each_in_ball(nu, r, [&](const MultiIndex& n) {
          if (l1_norm(n) == r) ++brute;
        });
        CHECK(shell_count(nu, r) == double(brute));
        CHECK(shell_count_bound(nu, r) >= shell_count(nu, r));
      }
  }
  SUBCASE("nu = 1 tail sum has a closed form") {
    for (double kappa0 : {0.5, 1.0})
      for (int R : {1, 5, 11}) {
        const double exact = ts::tail_closed_form_nu1(kappa0, R);
        const double bound = shell_tail_sum(1, kappa0, R);
        CHECK(bound >= exact * (1.0 - 1e-14));
        CHECK(bound <= exact * (1.0 + 1e-9));
      }
  }
  SUBCASE("nu = 2 tail sum upper-bounds a long partial sum") {
    const double x = std::exp(-0.5);
    double partial = 0.0;
    for (int r = 5; r <= 400; ++r) partial += 4.0 * r * std::pow(x, r);
    const double bound = shell_tail_sum(2, 1.0, 5);
    CHECK(bound >= partial);
    CHECK(bound <= partial * (1.0 + 1e-9));
  }
}

TEST_CASE("gap_tail_bound") {
  SUBCASE("frozen nu = 1 example") {
    // 4e-3 * e^{-5.5} / (1 - e^{-1/2})
    const double closed = 4e-3 * std::exp(-5.5) / (1.0 - std::exp(-0.5));
    CHECK(closed == doctest::Approx(4.1546e-5).epsilon(1e-3));
    const double bound = gap_tail_bound(1e-3, 1.0, 1, 10);
    CHECK(bound >= closed * (1.0 - 1e-14));
    CHECK(bound <= closed * (1.0 + 1e-9));
  }
  SUBCASE("zero potential has zero tail") { CHECK(gap_tail_bound(0.0, 1.0, 2, 4) == 0.0); }
  SUBCASE("monotone in M") {
    double prev = std::numeric_limits<double>::infinity();
    for (int M = 1; M <= 12; ++M) {
      const double t = gap_tail_bound(1e-3, 1.0, 2, M);
      CHECK(t <= prev);
      prev = t;
    }
  }
}

TEST_CASE("build_catalog on the free operator") {
  const auto p = ts::free_potential(1);
  const auto cat = build_catalog(p, 3, 6);
  CHECK(cat.bottom == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std::abs(cat.bottom) < 1e-12);
  CHECK(cat.tail_mass == 0.0);
  REQUIRE(cat.gaps.size() == 3);  // canonical labels 1, 2, 3
  for (const auto& g : cat.gaps) {
    CHECK(g.closed);
    CHECK(g.width() == 0.0);
    const double km = 0.5 * l1_norm(g.label);
    CHECK(g.e_minus == doctest::Approx(km * km).epsilon(1e-12));
  }
  CHECK(cat.unresolved.empty());
  CHECK(cat.certifiable());
}

TEST_CASE("periodic catalog matches the degenerate perturbation oracle") {
  const double g = 1e-3;
  const auto p = ts::periodic_potential(g);
  const auto cat = build_catalog(p, 3, 8);
  REQUIRE(cat.gaps.size() == 3);
  CHECK(cat.certifiable());

  // bottom = -2 g^2 + O(g^4) by second order at k = 0
  CHECK(cat.bottom == doctest::Approx(-2.0 * g * g).epsilon(1e-3));

  const double w1 = cat.gaps[0].width();
  const double w2 = cat.gaps[1].width();
  const double w3 = cat.gaps[2].width();
  const double o1 = ts::hill_gap_width_oracle(p, 1);
  const double o2 = ts::hill_gap_width_oracle(p, 2);
  const double o3 = ts::hill_gap_width_oracle(p, 3);
  // oracle sanity at leading order: 2g, 2g^2, g^3/2
  CHECK(o1 == doctest::Approx(2.0 * g).epsilon(1e-4));
  CHECK(o2 == doctest::Approx(2.0 * g * g).epsilon(2e-3));
  CHECK(o3 == doctest::Approx(0.5 * g * g * g).epsilon(2e-2));
  CHECK(std::abs(w1 - o1) <= 0.02 * o1 + 1e-11);
  CHECK(std::abs(w2 - o2) <= 0.05 * o2 + 1e-11);
  CHECK(std::abs(w3 - o3) <= 0.05 * o3 + 1e-10);

  SUBCASE("deterministic across thread counts") {
    const auto cat3 = build_catalog(p, 3, 8, 3);
    REQUIRE(cat3.gaps.size() == cat.gaps.size());
    for (std::size_t i = 0; i < cat.gaps.size(); ++i) {
      CHECK(cat3.gaps[i].e_minus == cat.gaps[i].e_minus);
      CHECK(cat3.gaps[i].e_plus == cat.gaps[i].e_plus);
      CHECK(cat3.gaps[i].err == cat.gaps[i].err);
    }
    CHECK(cat3.bottom == cat.bottom);
  }

  SUBCASE("decay check passes with the honest eps and fails with eps = g") {
    CHECK(verify_gap_decay(cat).pass);
    GapCatalog dishonest = cat;
    dishonest.eps = g;  // violates the coefficient envelope, and the gap bound
    const auto rep = verify_gap_decay(dishonest);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_label == MultiIndex{1});
    // width 2e-3 against bound 2e-3 * e^{-1/2} ~ 1.213e-3
    CHECK(rep.worst_margin < 0.0);
  }

  SUBCASE("total gap mass stays below the shell-sum constant times eps") {
    double total = cat.tail_mass;
    for (const auto& gp : cat.gaps) total += gp.width();
    CHECK(total <= 2.0 * p.eps * shell_tail_sum(1, p.kappa0, 1));
  }

  SUBCASE("separation and bottom checks with fitted constants") {
    const auto sep = verify_gap_separation(cat, 1e-6, 8.0);
    CHECK(sep.pass);
    CHECK(sep.fitted_a > 0.0);
    const auto bot = verify_bottom_separation(cat, 1e-6, 8.0);
    CHECK(bot.pass);
    CHECK(bot.fitted_a > 0.0);
    // fits are honest: rechecking with the fitted constants passes
    CHECK(verify_gap_separation(cat, sep.fitted_a, 8.0).pass);
    CHECK(verify_bottom_separation(cat, bot.fitted_a, 8.0).pass);
  }

  SUBCASE("inverse coefficient check at kappa = 5 kappa0") {
    const auto inv = inverse_coefficient_check(p, cat, 5.0);
    CHECK(inv.eps_prime == doctest::Approx(2.0 * g * std::exp(5.0)).epsilon(1e-2));
    CHECK(inv.conclusion_pass);
    // the m = 1 margin is sqrt(2 g e^5) e^{-5/2} - g ~ 0.0437
    CHECK(inv.worst_margin == doctest::Approx(0.0437).epsilon(0.02));
    CHECK_THROWS_AS(inverse_coefficient_check(p, cat, 4.0), std::invalid_argument);
  }
}

TEST_CASE("free-operator separation geometry") {
  SUBCASE("nu = 1 point gaps at k_m^2") {
    const auto p = ts::free_potential(1);
    const auto cat = build_catalog(p, 2, 6);
    REQUIRE(cat.gaps.size() == 2);
    const auto sep = verify_gap_separation(cat, 0.5, 1.0);
    CHECK(sep.pass);
    // dist([0.25,0.25],[1,1]) = 0.75, larger label norm 2
    CHECK(sep.fitted_a == doctest::Approx(1.5).epsilon(1e-9));
    const auto bot = verify_bottom_separation(cat, 0.2, 1.0);
    CHECK(bot.pass);
    CHECK(bot.fitted_a == doctest::Approx(0.25).epsilon(1e-9));
  }
  SUBCASE("nu = 2 bottom distance at the (1,-1) label") {
    const auto p = ts::free_potential(2);
    const auto e = gap_edges(p, {1, -1}, 6);
    CHECK(e.closed);
    CHECK(e.e_minus == doctest::Approx(0.042893218813452475).epsilon(1e-12));
  }
}

TEST_CASE("injected-fault catalogs") {
  SUBCASE("decay violation is named") {
    std::vector<Gap> gaps;
    gaps.push_back({{1, 0}, 0.24, 0.2406, 1e-9, false});
    gaps.push_back({{2, 0}, 0.9, 0.9 + 5e-3, 1e-9, false});  // far above 2 eps e^{-|m|/2}
    auto cat = synthetic_catalog(2, 1e-3, 1.0, gaps);
    const auto rep = verify_gap_decay(cat);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_label == MultiIndex{2, 0});
    REQUIRE(rep.findings.size() == 1);
    CHECK(rep.findings[0].find("(2,0)") != std::string::npos);
  }
  SUBCASE("separation violation is named") {
    std::vector<Gap> gaps;
    gaps.push_back({{1, 0}, 0.25, 0.251, 1e-12, false});
    gaps.push_back({{1, 1}, 0.2511, 0.252, 1e-12, false});  // nearly touching
    auto cat = synthetic_catalog(2, 1e-3, 1.0, gaps);
    const auto rep = verify_gap_separation(cat, 0.5, 2.0);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_margin < 0.0);
  }
  SUBCASE("bottom violation is named") {
    std::vector<Gap> gaps;
    gaps.push_back({{1, 0}, 1e-6, 2e-6, 1e-12, false});
    auto cat = synthetic_catalog(2, 1e-3, 1.0, gaps);
    const auto rep = verify_bottom_separation(cat, 0.5, 2.0);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_m == MultiIndex{1, 0});
  }
  SUBCASE("monotone in err: enlarging err can only flip FAIL to PASS") {
    std::vector<Gap> tight;
    tight.push_back({{1, 0}, 0.25, 0.2506, 0.0, false});
    tight.push_back({{1, 1}, 0.2508, 0.2512, 0.0, false});
    auto cat = synthetic_catalog(2, 1e-3, 1.0, tight);
    const auto strict = verify_gap_separation(cat, 3.2e-3, 2.0);  // bound 8e-4 > dist 2e-4
    CHECK_FALSE(strict.pass);
    for (auto& gp : cat.gaps) gp.err = 1e-3;
    const auto loose = verify_gap_separation(cat, 3.2e-3, 2.0);
    CHECK(loose.pass);
    CHECK(loose.worst_margin >= strict.worst_margin);
  }
  SUBCASE("inverse check flags a coefficient breaking the conclusion") {
    FrequencyVector f({1.0, ts::kSqrt2}, 0.5, 2.5);
    std::map<MultiIndex, std::complex<double>> c;
    c[{1, 0}] = 0.05;
    c[{-1, 0}] = 0.05;
    FourierPotential p(f, c, 0.06, 1.0);
    const double kappa = 5.0;
    std::vector<Gap> gaps;
    const double epsp = 1e-8;
    gaps.push_back({{1, 0}, 0.25, 0.25 + epsp * std::exp(-kappa), 0.0, false});
    auto cat = synthetic_catalog(2, 0.06, 1.0, gaps);
    const auto rep = inverse_coefficient_check(p, cat, kappa);
    CHECK(rep.eps_prime == doctest::Approx(epsp).epsilon(1e-9));
    CHECK_FALSE(rep.conclusion_pass);
    CHECK(rep.worst_coeff == MultiIndex{-1, 0});
  }
}

TEST_CASE("small two-frequency catalog is coherent") {
  const auto p = ts::golden_potential();
  const auto cat = build_catalog(p, 4, 8);
  CHECK(cat.certifiable());
  CHECK(cat.gaps.size() == 20);  // canonical labels with |m|_1 <= 4
  CHECK(verify_gap_decay(cat).pass);
  int open = 0;
  for (const auto& g : cat.gaps) open += g.closed ? 0 : 1;
  CHECK(open >= 10);  // every in-support label carries |c(m)| = eps e^{-|m|}
  double total = cat.tail_mass;
  for (const auto& g : cat.gaps) total += g.width();
  CHECK(total <= 2.0 * p.eps * shell_tail_sum(2, p.kappa0, 1));
}
