#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "qdchain/propagate.hpp"

using namespace qdchain;
using cd = std::complex<double>;

namespace {

// exp(-i H tau) psi by the dense matrix exponential.
Eigen::VectorXcd expm_oracle(const SectorHamiltonian& h, const Eigen::VectorXcd& psi, double tau) {
  const Eigen::MatrixXcd a = cd(0.0, -tau) * h.dense();
  return a.exp() * psi;
}

ChainParams messy_chain(int n) {
  ChainParams p = uniform_chain(n);
  for (int j = 0; j < n; ++j) p.eps[j] = 0.1 * std::sin(1.3 * j);
  for (int j = 0; j + 1 < n; ++j) p.couplings[j] = 1.0 + 0.2 * std::cos(0.7 * j);
  p.v = 0.6;
  return p;
}

double max_diff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("spectral evolution against the matrix exponential") {
  for (double gamma : {0.0, 0.25}) {
    auto p = messy_chain(7);
    p.gamma = gamma;
    for (Sector s : {Sector::one_electron, Sector::two_electron}) {
      const auto h = build(p, s);
      const auto psi0 = s == Sector::one_electron ? StateVector::localized_1e(7, 2)
                                                  : StateVector::localized_2e(7, 1, 4);
      EvolutionPlan plan;
      plan.times = {0.0, 0.5, 3.0, 11.0};
      const auto out = evolve(h, psi0, plan);
      REQUIRE(out.size() == 4);
      for (std::size_t k = 0; k < out.size(); ++k)
        CHECK(max_diff(out[k].amps, expm_oracle(h, psi0.amps, plan.times[k])) < 1e-10);
    }
  }
}

TEST_CASE("stepping agrees with the spectral path") {
  auto p = messy_chain(6);
  p.gamma = 0.2;
  const auto h = build_2e(p);
  const auto psi0 = StateVector::localized_2e(6, 1, 2);
  EvolutionPlan plan;
  plan.times = {0.3, 2.0, 7.5};
  const auto spectral = evolve(h, psi0, plan);
  plan.method = Method::stepping;
  plan.tol = 1e-12;
  const auto stepped = evolve(h, psi0, plan);
  for (std::size_t k = 0; k < plan.times.size(); ++k)
    CHECK(max_diff(spectral[k].amps, stepped[k].amps) < 1e-8);
}

TEST_CASE("block-diagonal chains") {
  // A closed bond splits the chain; the spectral path works block by block.
  auto p = uniform_chain(8);
  p.couplings[3] = 0.0;
  p.gamma = 0.3;
  const auto h = build_2e(p);
  SpectralPropagator prop(h);
  CHECK(prop.blocks() == 3);
  CHECK(prop.well_conditioned());
  const auto psi0 = StateVector::localized_2e(8, 2, 7);
  const auto c = prop.coefficients(psi0.amps);
  for (double tau : {0.0, 1.0, 4.0})
    CHECK(max_diff(prop.state_at(c, tau), expm_oracle(h, psi0.amps, tau)) < 1e-10);
}

TEST_CASE("norm") {
  SUBCASE("conserved without the detector") {
    const auto h = build_2e(messy_chain(10));
    EvolutionPlan plan;
    for (int k = 0; k <= 50; ++k) plan.times.push_back(0.7 * k);
    for (const auto& s : evolve(h, StateVector::localized_2e(10, 3, 9), plan))
      CHECK(s.norm2() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("non-increasing with the detector") {
    auto p = messy_chain(5);
    p.gamma = 0.5;
    EvolutionPlan plan;
    for (int k = 0; k <= 100; ++k) plan.times.push_back(0.2 * k);
    const auto samples = evolve(build_1e(p), StateVector::localized_1e(5, 1), plan);
    const auto surv = survival_probability(samples);
    for (std::size_t k = 1; k < surv.size(); ++k) CHECK(surv[k] <= surv[k - 1] + 1e-14);
    CHECK(surv.back() < 0.9);
  }
  SUBCASE("single dot decays exponentially") {
    auto p = uniform_chain(1);
    p.gamma = 0.2;
    EvolutionPlan plan;
    plan.times = {0.0, 1.0, 5.0, 20.0};
    const auto out = evolve(build_1e(p), StateVector::localized_1e(1, 1), plan);
    for (std::size_t k = 0; k < out.size(); ++k)
      CHECK(out[k].norm2() == doctest::Approx(std::exp(-0.2 * plan.times[k])).epsilon(1e-12));
  }
}

TEST_CASE("input validation") {
  const auto h = build_1e(uniform_chain(4));
  EvolutionPlan plan;
  plan.times = {0.0, 1.0};
  CHECK_THROWS_AS(evolve(h, StateVector::localized_1e(5, 1), plan), std::invalid_argument);
  CHECK_THROWS_AS(evolve(h, StateVector::localized_2e(4, 1, 2), plan), std::invalid_argument);

  StateVector loose(SectorBasis::one_electron(4), Eigen::VectorXcd::Constant(4, 1.0));
  CHECK_THROWS_AS(evolve(h, loose, plan), std::invalid_argument);
  plan.require_normalized = false;
  CHECK_NOTHROW(evolve(h, loose, plan));

  plan.times = {1.0, 0.5};
  CHECK_THROWS_AS(evolve(h, StateVector::localized_1e(4, 1), plan), std::invalid_argument);
  plan.times = {-1.0};
  CHECK_THROWS_AS(evolve(h, StateVector::localized_1e(4, 1), plan), std::invalid_argument);
  plan.times = {1.0};
  plan.tol = 0.0;
  CHECK_THROWS_AS(evolve(h, StateVector::localized_1e(4, 1), plan), std::invalid_argument);
}

TEST_CASE("integration failure carries the time reached") {
  const IntegrationFailure e("step size underflow", 3.5);
  CHECK(e.tau() == 3.5);
  CHECK(std::string(e.what()) == "step size underflow");
}
