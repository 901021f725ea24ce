#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdchain/analytic.hpp"
#include "qdchain/hamiltonian.hpp"

using namespace qdchain;
using cd = std::complex<double>;

TEST_CASE("uniform chain amplitudes") {
  SUBCASE("prefactor") {
    for (int n : {1, 2, 5, 20}) CHECK(analytic::chebyshev_prefactor(n) == doctest::Approx(2.0 / (n + 1)));
  }
  SUBCASE("start on dot 1") {
    for (int n : {2, 5, 20})
      for (int j = 1; j <= n; ++j)
        CHECK(std::abs(analytic::uniform_1e_amplitude(n, 1.0, 0.0, j) - (j == 1 ? 1.0 : 0.0)) < 1e-13);
  }
  SUBCASE("normalized") {
    for (double tau : {0.3, 4.0, 27.0}) {
      double s = 0.0;
      for (int j = 1; j <= 12; ++j) s += std::norm(analytic::uniform_1e_amplitude(12, 0.8, tau, j));
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("matches the matrix exponential") {
    const int n = 9;
    const Eigen::MatrixXcd h = build_1e(uniform_chain(n, 0.8)).dense();
    for (double tau : {0.5, 6.0, 21.0}) {
      const Eigen::VectorXcd psi = (cd(0, -tau) * h).exp().col(0);
      for (int j = 1; j <= n; ++j)
        CHECK(std::abs(psi(j - 1) - analytic::uniform_1e_amplitude(n, 0.8, tau, j)) < 1e-11);
    }
  }
}

TEST_CASE("optimal chain amplitudes") {
  SUBCASE("end-dot probability") {
    for (double tau : {0.1, 0.9, 1.3}) {
      const double want = std::pow(std::sin(tau), 2 * 19);
      CHECK(std::norm(analytic::optimal_1e_amplitude(20, 1.0, tau, 20)) == doctest::Approx(want).epsilon(1e-12));
    }
    CHECK(std::norm(analytic::optimal_1e_amplitude(20, 1.0, std::numbers::pi / 2, 20)) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("normalized for large chains") {
    // Log-space binomials keep this finite far beyond 64-bit factorials.
    double s = 0.0;
    for (int j = 1; j <= 200; ++j) s += std::norm(analytic::optimal_1e_amplitude(200, 1.0, 0.77, j));
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("matches the matrix exponential") {
    const int n = 8;
    const Eigen::MatrixXcd h = build_1e(optimal_chain(n, 1.3)).dense();
    for (double tau : {0.4, 2.2}) {
      const Eigen::VectorXcd psi = (cd(0, -tau) * h).exp().col(0);
      for (int j = 1; j <= n; ++j)
        CHECK(std::abs(psi(j - 1) - analytic::optimal_1e_amplitude(n, 1.3, tau, j)) < 1e-11);
    }
  }
}

TEST_CASE("optimal chain pair amplitudes") {
  const int n = 7;
  SUBCASE("initial pair") {
    for (int i = 1; i < n; ++i)
      for (int j = i + 1; j <= n; ++j)
        CHECK(std::abs(analytic::optimal_2e_amplitude(n, 1.0, 0.0, i, j) - (i == 1 && j == 2 ? 1.0 : 0.0)) <
              1e-14);
  }
  SUBCASE("matches the matrix exponential") {
    const Eigen::MatrixXcd h = build_2e(optimal_chain(n)).dense();
    for (double tau : {0.3, 1.1, 5.0}) {
      const Eigen::VectorXcd psi = (cd(0, -tau) * h).exp().col(0);
      for (int i = 1; i < n; ++i)
        for (int j = i + 1; j <= n; ++j)
          CHECK(std::abs(psi(index_2e(i, j, n)) - analytic::optimal_2e_amplitude(n, 1.0, tau, i, j)) < 1e-11);
    }
  }
  SUBCASE("pair sums follow a single electron on a 2n-3 chain") {
    for (double tau : {0.2, 0.8, 1.4}) {
      for (int s = 0; s <= 2 * n - 4; ++s) {
        double pair = 0.0;
        for (int i = 1; i < n; ++i)
          for (int j = i + 1; j <= n; ++j)
            if (i + j - 3 == s) pair += std::norm(analytic::optimal_2e_amplitude(n, 1.0, tau, i, j));
        const double single = std::norm(analytic::optimal_1e_amplitude(2 * n - 3, 1.0, tau, s + 1));
        CHECK(pair == doctest::Approx(single).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("closed-form spectra") {
  using analytic::SpectrumKind;
  auto numeric = [](const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return std::vector<double>(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  };
  SUBCASE("uniform") {
    const auto s = analytic::spectrum({SpectrumKind::uniform_1e, 10, 1.0});
    const auto e = numeric(build_1e(uniform_chain(10)).dense_real());
    REQUIRE(s.size() == 10);
    for (int k = 0; k < 10; ++k) CHECK(s[k] == doctest::Approx(e[k]).epsilon(1e-12));
  }
  SUBCASE("optimal one electron is equally spaced") {
    const auto s = analytic::spectrum({SpectrumKind::optimal_1e, 6, 1.0});
    CHECK(s == std::vector<double>{-5, -3, -1, 1, 3, 5});
  }
  SUBCASE("optimal pair has 2n-3 levels") {
    for (int n : {2, 3, 10, 20}) {
      const auto s = analytic::spectrum({SpectrumKind::optimal_2e, n, 1.0});
      CHECK(s.size() == static_cast<std::size_t>(2 * n - 3));
      CHECK(s.front() == doctest::Approx(-(2.0 * n - 4)));
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(analytic::spectrum({SpectrumKind::optimal_2e, 1, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(analytic::spectrum({SpectrumKind::uniform_1e, 0, 1.0}), std::invalid_argument);
  }
}

TEST_CASE("effective pair coupling") {
  CHECK(analytic::effective_pair_coupling(1.0, 10.0) == doctest::Approx(0.1));
  CHECK(analytic::effective_pair_coupling(2.0, 4.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(analytic::effective_pair_coupling(1.0, 0.0), std::invalid_argument);
}
