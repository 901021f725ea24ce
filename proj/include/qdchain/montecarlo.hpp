#pragma once

// Quantum-jump (Monte Carlo wavefunction) simulation of the detector on the
// last dot.
//
// Between jumps a trajectory evolves under H_eff = H - (i/2) gamma n_N. A jump
// happens when ||psi||^2 falls to a uniform random r; the electron on dot N is
// removed, the state renormalized, the sector demoted (2e -> 1e -> vacuum)
// and a fresh r drawn. Each trajectory owns an RNG stream derived from the
// master seed and its index, so ensembles are identical for any thread count.

#include <cstdint>
#include <span>
#include <vector>

#include "qdchain/hilbert.hpp"
#include "qdchain/model.hpp"

namespace qdchain {

enum class DisorderMode { per_trajectory, fixed };

struct Snapshot {
  double tau;
  int electrons;
  std::vector<double> occupation;  // per dot, of the renormalized state
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  int initial_electrons = 0;
  std::vector<double> jump_times;  // strictly increasing
  ChainParams disorder_draw;
  std::vector<Snapshot> samples;
};

struct TrajectoryOptions {
  double tau_end = 100.0;
  std::vector<double> snapshot_times;  // optional, increasing
  double localization_tol = 1e-6;      // jump-time bisection width
};

/// SplitMix64 of (master, index); the seed of trajectory `index`.
std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index);

/// One trajectory. Draws the disorder realization first, then one r per
/// jump, all from Rng(seed).
TrajectoryRecord run_trajectory(const ChainParams& params, const DisorderSpec& spec,
                                const StateVector& initial, std::uint64_t seed,
                                const TrajectoryOptions& opts);

struct EnsembleOptions {
  std::size_t trajectories = 5000;
  std::uint64_t master_seed = 0;
  int threads = 0;  // 0 = OpenMP default
  DisorderMode disorder_mode = DisorderMode::per_trajectory;
  TrajectoryOptions trajectory;
};

/// Trajectories run in parallel; results are ordered by trajectory index.
std::vector<TrajectoryRecord> run_ensemble(const ChainParams& params, const DisorderSpec& spec,
                                           const StateVector& initial, const EnsembleOptions& opts);

/// Plain loop over trajectories. Reference for run_ensemble.
std::vector<TrajectoryRecord> run_ensemble_serial(const ChainParams& params,
                                                  const DisorderSpec& spec,
                                                  const StateVector& initial,
                                                  const EnsembleOptions& opts);

struct DetectorSignal {
  std::vector<double> bin_edges;
  std::vector<double> signal;     // clicks per unit time per trajectory
  std::vector<double> std_error;  // of the mean, per bin
  std::size_t n_trajectories = 0;

  std::vector<double> bin_centers() const;
};

std::vector<double> uniform_edges(double tau_end, int bins);

/// Histogram of all jump times divided by (trajectories * bin width). The
/// standard error comes from the spread of per-trajectory bin counts, which
/// is binomial when a trajectory clicks at most once per bin.
DetectorSignal detector_signal(std::span<const TrajectoryRecord> records,
                               std::span<const double> bin_edges);

struct MasterEquationResult {
  std::vector<double> times;
  std::vector<std::vector<double>> populations;  // rho_jj at each time
  std::vector<double> vacuum;                    // probability already detected
  std::vector<double> flux;                      // gamma rho_NN
};

/// Density-matrix integration of the one-electron problem with the detector,
///   drho/dtau = -i[H, rho] - (gamma/2){n_N, rho},  dp0/dtau = gamma rho_NN,
/// built directly from the chain parameters. Validation oracle for the jump
/// engine; refuses chains with more than kMaxOracleDots dots.
MasterEquationResult master_equation_oracle(const ChainParams& params, const StateVector& initial,
                                            std::span<const double> times, double tol = 1e-12);

inline constexpr int kMaxOracleDots = 32;

}  // namespace qdchain
