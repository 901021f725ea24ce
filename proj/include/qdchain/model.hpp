#pragma once

// Chain configuration for a linear array of tunnel-coupled quantum dots.
//
// All energies are in units of the mean tunnel coupling t0 and times in
// units of 1/t0 (hbar = 1). Only estimate_parameters() works in SI.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qdchain {

using Rng = std::mt19937_64;

struct ChainParams {
  int n = 1;
  std::vector<double> eps;        // on-site energy per dot, size n
  std::vector<double> couplings;  // bond j couples dots j and j+1, size n-1
  double v = 0.0;                 // nearest-neighbour interdot repulsion
  std::optional<double> u;        // on-site repulsion; empty means infinite
  double gamma = 0.0;             // detector coupling on the last dot

  /// Throws std::invalid_argument if any invariant is broken.
  void validate() const;
  /// Like validate() but accepts negative couplings, which a disorder draw
  /// may produce.
  void validate_shape() const;

  double max_coupling() const;
};

ChainParams uniform_chain(int n, double t0 = 1.0, double eps0 = 0.0);
ChainParams optimal_chain(int n, double t0 = 1.0, double eps0 = 0.0);

/// t0 * sqrt((n - j) * j) for j = 1 .. n-1.
std::vector<double> optimal_couplings(int n, double t0);

/// Optimal profile applied separately to dots 1..left and left+1..n with
/// the bond between them set to zero.
std::vector<double> split_optimal_couplings(int n, int left, double t0);

struct DisorderSpec {
  double delta_eps = 0.0;  // standard deviation of each eps_j
  double delta_t = 0.0;    // standard deviation of each coupling
  std::uint64_t seed = 0;

  void validate() const;
  bool trivial() const { return delta_eps == 0.0 && delta_t == 0.0; }
};

/// One Gaussian draw of the chain around its mean values. Energies are
/// drawn first (dot order), then couplings (bond order). Negative couplings
/// are kept as sampled.
ChainParams sample_disorder(const ChainParams& params, const DisorderSpec& spec,
                            Rng& rng);

struct RegimeWarning {
  enum class Severity { marginal, hard };
  Severity severity;
  std::string message;
};

/// Advisory checks of the Coulomb-blockade / tight-binding assumptions over
/// a run of length tau_max. Never throws.
std::vector<RegimeWarning> validate_regime(const ChainParams& params, double tau_max);

struct MaterialParams {
  double eps_r = 13.0;   // relative permittivity (GaAs)
  double m_star = 0.067; // effective mass in units of the electron mass (GaAs)
  double radius = 50e-9; // dot radius in metres
};

struct EnergyEstimate {
  double charging_joule;
  double level_spacing_joule;
  double charging_uev;
  double level_spacing_uev;
};

/// U ~ e^2 / C_g with C_g ~ 8 eps_r eps_0 R, and
/// level spacing ~ hbar^2 pi / (m* R^2).
EnergyEstimate estimate_parameters(const MaterialParams& mat);

inline double to_micro_ev(double value_in_t0, double t0_micro_ev) {
  return value_in_t0 * t0_micro_ev;
}

}  // namespace qdchain
