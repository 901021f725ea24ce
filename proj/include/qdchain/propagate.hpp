#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qdchain/hamiltonian.hpp"
#include "qdchain/hilbert.hpp"

namespace qdchain {

class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(const std::string& what, double tau)
      : std::runtime_error(what), tau_(tau) {}
  double tau() const { return tau_; }

 private:
  double tau_;
};

enum class Method { spectral, stepping };

struct EvolutionPlan {
  Method method = Method::spectral;
  std::vector<double> times;  // sample times, strictly increasing, >= 0
  double tol = 1e-12;         // local error tolerance for stepping
  bool require_normalized = true;

  void validate() const;
};

/// Dense eigendecomposition of a time-independent H_eff, so that
/// psi(tau) = V exp(-i Lambda tau) V^{-1} psi(0) can be evaluated at any tau.
/// Each connected block of H (e.g. the halves of a chain with a closed bond)
/// is diagonalized on its own; Hermitian blocks use the symmetric solver.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const SectorHamiltonian& h);

  /// Largest eigenvector-matrix condition number over the blocks
  /// (1 for Hermitian H).
  double condition() const { return condition_; }
  bool well_conditioned() const { return condition_ <= kMaxCondition; }
  std::size_t blocks() const { return blocks_.size(); }

  /// All eigenvalues, block by block.
  Eigen::VectorXcd eigenvalues() const;

  Eigen::VectorXcd coefficients(const Eigen::VectorXcd& psi0) const;
  Eigen::VectorXcd state_at(const Eigen::VectorXcd& coeffs, double tau) const;
  double norm2_at(const Eigen::VectorXcd& coeffs, double tau) const;

  static constexpr double kMaxCondition = 1e8;
  static constexpr std::size_t kMaxDim = 2000;

 private:
  struct Block {
    std::vector<Eigen::Index> index;
    bool hermitian;
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
    Eigen::MatrixXcd inverse;
  };

  Eigen::Index dim_;
  bool hermitian_;
  std::vector<Block> blocks_;
  double condition_ = 1.0;
};

/// Adaptive Dormand-Prince integration of i dpsi/dtau = H psi from 0 to each
/// requested time. Throws IntegrationFailure when the step size collapses.
std::vector<Eigen::VectorXcd> integrate(const SectorHamiltonian& h, const Eigen::VectorXcd& psi0,
                                        std::span<const double> times, double tol);

/// Samples psi(tau) for each plan time. The spectral method falls back to
/// stepping when H is too large or its eigenvectors are ill-conditioned.
std::vector<StateVector> evolve(const SectorHamiltonian& h, const StateVector& psi0,
                                const EvolutionPlan& plan);

/// ||psi(tau)||^2 per sample.
std::vector<double> survival_probability(std::span<const StateVector> samples);

}  // namespace qdchain
