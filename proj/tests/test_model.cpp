#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qdchain/model.hpp"

using namespace qdchain;

TEST_CASE("optimal couplings") {
  SUBCASE("small chains") {
    CHECK(optimal_couplings(2, 1.0) == std::vector<double>{1.0});
    const auto t3 = optimal_couplings(3, 1.0);
    REQUIRE(t3.size() == 2);
    CHECK(t3[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(t3[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  }
  SUBCASE("mirror symmetric and positive") {
    for (int n = 2; n <= 30; ++n) {
      const auto t = optimal_couplings(n, 0.7);
      REQUIRE(t.size() == static_cast<std::size_t>(n - 1));
      for (std::size_t j = 0; j < t.size(); ++j) {
        CHECK(t[j] > 0.0);
        CHECK(t[j] == t[t.size() - 1 - j]);
      }
    }
  }
  SUBCASE("scales with t0") {
    const auto a = optimal_couplings(20, 1.0);
    const auto b = optimal_couplings(20, 2.5);
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(b[j] == doctest::Approx(2.5 * a[j]));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(optimal_couplings(1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(optimal_couplings(5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(optimal_couplings(5, -1.0), std::invalid_argument);
  }
}

TEST_CASE("split optimal couplings close the middle bond") {
  const auto t = split_optimal_couplings(20, 10, 1.0);
  const auto half = optimal_couplings(10, 1.0);
  REQUIRE(t.size() == 19);
  CHECK(t[9] == 0.0);
  for (int j = 0; j < 9; ++j) {
    CHECK(t[j] == half[j]);
    CHECK(t[10 + j] == half[j]);
  }
  CHECK_THROWS_AS(split_optimal_couplings(20, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(split_optimal_couplings(20, 20, 1.0), std::invalid_argument);
}

TEST_CASE("chain validation") {
  ChainParams p = uniform_chain(5);
  CHECK_NOTHROW(p.validate());

  SUBCASE("single dot") { CHECK_NOTHROW(uniform_chain(1).validate()); }
  SUBCASE("wrong coupling count") {
    p.couplings.push_back(1.0);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  }
  SUBCASE("negative coupling allowed only as a disorder draw") {
    p.couplings[2] = -0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_NOTHROW(p.validate_shape());
  }
  SUBCASE("negative gamma and V") {
    p.gamma = -0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.gamma = 0.0;
    p.v = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  }
  SUBCASE("nonpositive U") {
    p.u = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  }
  SUBCASE("no dots") { CHECK_THROWS_AS(uniform_chain(0), std::invalid_argument); }
}

TEST_CASE("disorder sampling") {
  const ChainParams mean = uniform_chain(8, 1.0, 0.3);

  SUBCASE("zero widths reproduce the chain") {
    Rng rng(5);
    const auto d = sample_disorder(mean, {0.0, 0.0, 0}, rng);
    CHECK(d.eps == mean.eps);
    CHECK(d.couplings == mean.couplings);
  }
  SUBCASE("same stream, same draw") {
    Rng a(42), b(42);
    const DisorderSpec spec{0.1, 0.05, 0};
    const auto x = sample_disorder(mean, spec, a);
    const auto y = sample_disorder(mean, spec, b);
    CHECK(x.eps == y.eps);
    CHECK(x.couplings == y.couplings);
  }
  SUBCASE("sample means within five standard errors") {
    const DisorderSpec spec{0.1, 0.05, 0};
    Rng rng(2024);
    const int draws = 10000;
    double se = 0.0, st = 0.0, se2 = 0.0, st2 = 0.0;
    for (int k = 0; k < draws; ++k) {
      const auto d = sample_disorder(mean, spec, rng);
      se += d.eps[3];
      se2 += d.eps[3] * d.eps[3];
      st += d.couplings[4];
      st2 += d.couplings[4] * d.couplings[4];
    }
    const double me = se / draws, mt = st / draws;
    CHECK(std::abs(me - 0.3) < 5.0 * 0.1 / std::sqrt(draws));
    CHECK(std::abs(mt - 1.0) < 5.0 * 0.05 / std::sqrt(draws));
    // Widths are standard deviations.
    CHECK(std::sqrt(se2 / draws - me * me) == doctest::Approx(0.1).epsilon(0.05));
    CHECK(std::sqrt(st2 / draws - mt * mt) == doctest::Approx(0.05).epsilon(0.05));
  }
  SUBCASE("negative draws are kept") {
    Rng rng(1);
    const ChainParams weak = uniform_chain(50, 0.01);
    const auto d = sample_disorder(weak, {0.0, 1.0, 0}, rng);
    CHECK(std::any_of(d.couplings.begin(), d.couplings.end(), [](double t) { return t < 0.0; }));
  }
  SUBCASE("negative widths rejected") {
    CHECK_THROWS_AS((DisorderSpec{-0.1, 0.0, 0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((DisorderSpec{0.0, -0.1, 0}.validate()), std::invalid_argument);
  }
  SUBCASE("energy scale of the fluctuation") {
    CHECK(to_micro_ev(0.1, 50.0) == doctest::Approx(5.0));
  }
}

TEST_CASE("regime validation") {
  using S = RegimeWarning::Severity;
  auto has = [](const std::vector<RegimeWarning>& w, S s) {
    return std::any_of(w.begin(), w.end(), [&](const RegimeWarning& x) { return x.severity == s; });
  };
  ChainParams p = uniform_chain(20);

  SUBCASE("infinite U gives no warnings") { CHECK(validate_regime(p, 1e6).empty()); }
  SUBCASE("U = 100 at tau = 20 is marginal") {
    p.u = 100.0;
    const auto w = validate_regime(p, 20.0);
    CHECK_FALSE(has(w, S::hard));
    CHECK(has(w, S::marginal));
    CHECK(w.front().message.find("100 vs 80") != std::string::npos);
  }
  SUBCASE("U = 100 has no hard violation up to tau = 25") {
    p.u = 100.0;
    for (double tau : {1.0, 10.0, 20.0, 25.0}) CHECK_FALSE(has(validate_regime(p, tau), S::hard));
    CHECK(has(validate_regime(p, 30.0), S::hard));
  }
  SUBCASE("U below the tunnelling scale") {
    p.u = 0.5;
    CHECK(has(validate_regime(p, 0.01), S::hard));
  }
  SUBCASE("large U is clean") {
    p.u = 1e6;
    CHECK(validate_regime(p, 20.0).empty());
  }
  SUBCASE("strong detector coupling") {
    p.gamma = 2.0;
    CHECK(has(validate_regime(p, 1.0), S::marginal));
  }
}

TEST_CASE("material estimates") {
  const MaterialParams gaas;
  CHECK(gaas.eps_r == 13.0);
  CHECK(gaas.m_star == 0.067);

  const auto e = estimate_parameters(gaas);
  // Independent evaluation of both formulas at R = 50 nm.
  const double charging = 1.602176634e-19 / (8.0 * 13.0 * 8.8541878128e-12 * 50e-9);  // volts = eV
  const double spacing = std::pow(1.054571817e-34, 2) * M_PI / (0.067 * 9.1093837015e-31 * 2.5e-15);
  CHECK(e.charging_uev == doctest::Approx(charging * 1e6).epsilon(1e-12));
  CHECK(e.level_spacing_joule == doctest::Approx(spacing).epsilon(1e-12));
  CHECK(e.charging_joule / e.level_spacing_joule > 1.0);

  MaterialParams big = gaas;
  big.radius *= 2.0;
  const auto e2 = estimate_parameters(big);
  CHECK(e2.charging_joule == doctest::Approx(e.charging_joule / 2.0).epsilon(1e-14));
  CHECK(e2.level_spacing_joule == doctest::Approx(e.level_spacing_joule / 4.0).epsilon(1e-14));

  MaterialParams bad = gaas;
  bad.radius = 0.0;
  CHECK_THROWS_AS(estimate_parameters(bad), std::invalid_argument);
  bad.radius = -1e-9;
  CHECK_THROWS_AS(estimate_parameters(bad), std::invalid_argument);
}
