#include <doctest.h>

#include <numeric>
#include <set>

#include "qdchain/hilbert.hpp"

using namespace qdchain;

TEST_CASE("pair indexing") {
  CHECK(index_2e(1, 2, 2) == 0);
  CHECK(dim_2e(2) == 1);
  CHECK(dim_2e(10) == 45);
  CHECK(dim_2e(20) == 190);

  SUBCASE("row-major order") {
    CHECK(index_2e(1, 3, 4) == 1);
    CHECK(index_2e(1, 4, 4) == 2);
    CHECK(index_2e(2, 3, 4) == 3);
    CHECK(index_2e(3, 4, 4) == 5);
  }
  SUBCASE("bijection") {
    for (int n = 2; n <= 30; ++n) {
      std::set<std::size_t> seen;
      for (int i = 1; i < n; ++i)
        for (int j = i + 1; j <= n; ++j) {
          const auto k = index_2e(i, j, n);
          CHECK(k < dim_2e(n));
          seen.insert(k);
          CHECK(pair_2e(k, n) == std::pair{i, j});
        }
      CHECK(seen.size() == dim_2e(n));
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(index_2e(2, 2, 5), std::invalid_argument);
    CHECK_THROWS_AS(index_2e(3, 2, 5), std::invalid_argument);
    CHECK_THROWS_AS(index_2e(0, 2, 5), std::invalid_argument);
    CHECK_THROWS_AS(index_2e(1, 6, 5), std::invalid_argument);
    CHECK_THROWS_AS(pair_2e(10, 5), std::invalid_argument);
  }
}

TEST_CASE("sector bases") {
  const auto b1 = SectorBasis::one_electron(7, Spin::down);
  CHECK(b1.dim() == 7);
  CHECK(b1.electrons() == 1);
  CHECK(b1.first_spin() == Spin::down);
  CHECK(b1.label() == "1e[down] n=7");

  const auto b2 = SectorBasis::two_electron(20, Spin::up, Spin::down);
  CHECK(b2.dim() == 190);
  CHECK(b2.electrons() == 2);
  CHECK(b2.label() == "2e[up,down] n=20");
  CHECK(b2.same_orbitals(SectorBasis::two_electron(20, Spin::down, Spin::down)));
  CHECK_FALSE(b2.same_orbitals(b1));

  CHECK_THROWS_AS(SectorBasis::one_electron(0), std::invalid_argument);
  CHECK_THROWS_AS(SectorBasis::two_electron(1), std::invalid_argument);
  CHECK_THROWS_AS(StateVector(b1, Eigen::VectorXcd::Zero(6)), std::invalid_argument);
}

TEST_CASE("occupations") {
  SUBCASE("localized one electron") {
    const auto occ = occupation_1e(StateVector::localized_1e(5, 1));
    CHECK(occ == std::vector<double>{1, 0, 0, 0, 0});
  }
  SUBCASE("equal superposition") {
    StateVector s(SectorBasis::one_electron(4), Eigen::VectorXcd::Constant(4, 0.5));
    for (double p : occupation_1e(s)) CHECK(p == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("localized pairs") {
    auto occ = occupation_2e(StateVector::localized_2e(6, 1, 2));
    CHECK(occ == std::vector<double>{1, 1, 0, 0, 0, 0});
    occ = occupation_2e(StateVector::localized_2e(6, 1, 6));
    CHECK(occ == std::vector<double>{1, 0, 0, 0, 0, 1});
  }
  SUBCASE("sum rules for arbitrary amplitudes") {
    for (int n : {2, 5, 13}) {
      Eigen::VectorXcd a = Eigen::VectorXcd::Random(static_cast<Eigen::Index>(dim_2e(n)));
      const StateVector s(SectorBasis::two_electron(n), a);
      const auto occ = occupation_2e(s);
      double total = 0.0;
      for (double p : occ) {
        CHECK(p >= 0.0);
        total += p;
      }
      CHECK(total == doctest::Approx(2.0 * s.norm2()).epsilon(1e-12));

      const StateVector s1(SectorBasis::one_electron(n), Eigen::VectorXcd::Random(n));
      const auto o1 = occupation_1e(s1);
      CHECK(std::accumulate(o1.begin(), o1.end(), 0.0) == doctest::Approx(s1.norm2()).epsilon(1e-12));
    }
  }
  SUBCASE("wrong sector") {
    CHECK_THROWS_AS(occupation_1e(StateVector::localized_2e(4, 1, 2)), std::invalid_argument);
    CHECK_THROWS_AS(occupation_2e(StateVector::localized_1e(4, 1)), std::invalid_argument);
    CHECK_THROWS_AS(StateVector::localized_1e(4, 5), std::invalid_argument);
  }
}
