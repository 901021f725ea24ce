#pragma once

// Three-step generation of a spatially separated entangled electron pair:
//   1. the electrons on dots 1 and N are carried to the double dot (L, R)
//      by two decoupled optimal-coupling half-chains;
//   2. a sech tunnelling pulse on the L-R barrier produces a transient
//      Heisenberg exchange whose area theta rotates the spin pair;
//   3. the half-chains carry the electrons back to the ends.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdchain/hilbert.hpp"
#include "qdchain/model.hpp"
#include "qdchain/montecarlo.hpp"

namespace qdchain {

/// t_e(tau) = te_max sech((tau - center)/width); J(tau) = 4 t_e(tau)^2 / U.
struct ExchangePulse {
  double te_max = 0.0;
  double width = 1.0;
  double center = 0.0;
  double u = 100.0;

  void validate() const;
  double tunneling(double tau) const;
  double exchange(double tau) const;

  /// Adiabaticity advisories: 1/width and te_max should both be << U.
  std::vector<std::string> advisories() const;

  /// Width giving area theta for the given peak and U:
  /// theta = 8 te_max^2 width / U.
  static ExchangePulse with_area(double theta, double te_max, double u, double center = 0.0);
};

/// Closed form of the integral of J over the whole real line.
double pulse_area(const ExchangePulse& pulse);

/// Adaptive Gauss-Kronrod quadrature of an arbitrary exchange envelope on
/// [a, b]; infinite limits are allowed.
double pulse_area_quadrature(const std::function<double(double)>& exchange, double a, double b);
double pulse_area_quadrature(const ExchangePulse& pulse);

/// Spin-pair basis order: up-up, up-down, down-up, down-down, the first spin
/// belonging to the lower-numbered dot.
int spin_pair_index(Spin first, Spin second);

/// cos(theta/2) 1 + i sin(theta/2) SWAP. This is exp(-i theta H) for
/// H = -S_L.S_R up to the global phase exp(i theta/4), chosen so that the
/// triplet picks up exp(i theta/2) and |ud> -> cos|ud> + i sin|du>.
Eigen::Matrix4cd exchange_unitary(double theta);

/// Two electrons: one orbital pair-amplitude vector per spin pair.
struct SpinPairState {
  int n = 2;
  std::array<Eigen::VectorXcd, 4> orbital;

  static SpinPairState zero(int n);
  /// |i_a, j_b> with i < j.
  static SpinPairState product(int n, int i, Spin a, int j, Spin b);

  SpinPairState& add(int i, int j, Spin a, Spin b, std::complex<double> amp);

  double norm2() const;
  /// <this|other>
  std::complex<double> overlap(const SpinPairState& other) const;
};

struct ProtocolSchedule {
  int left = 1;
  int right = 2;
  double step1_duration = 0.0;
  double step3_duration = 0.0;
  ExchangePulse pulse;         // center measured from the start of step 2
  double pulse_window = 0.0;   // duration of step 2
  double sample_dt = 0.02;

  /// Entangler in the middle (L = n/2, R = L + 1), transfers of pi/(2 t0),
  /// and a step-2 window of 24 pulse widths with the pulse centred in it.
  static ProtocolSchedule standard(int n, const ExchangePulse& pulse, double t0 = 1.0);

  /// The L-R bond must be closed during transport and R = L + 1.
  void validate(const ChainParams& params) const;
};

/// Overlap targets of the standard run: |1u,Nd>, |Lu,Rd>,
/// (|Lu,Rd> + i|Ld,Ru>)/sqrt2 and (|1u,Nd> + i|1d,Nu>)/sqrt2.
std::array<SpinPairState, 4> reference_states(int n, int left, int right);

struct ProtocolOptions {
  std::size_t trajectories = 1;
  std::uint64_t master_seed = 0;
  int threads = 0;
  DisorderSpec disorder;
  std::optional<SpinPairState> target;  // defaults to the fourth reference state
  bool record_trace = true;
};

struct ProtocolTrajectory {
  std::vector<double> tau;
  std::array<std::vector<double>, 4> overlap;  // of the renormalized state, 0 after a jump
  double fidelity = 0.0;                       // 0 if an electron was detected
  bool jumped = false;
  std::optional<double> jump_time;
  double trapped_population = 0.0;  // weight on (L, R) after step 1
  SpinPairState final_state;
  TrajectoryRecord record;
};

struct ProtocolResult {
  std::vector<double> tau;
  std::array<std::vector<double>, 4> overlap;  // trajectory average
  double mean_fidelity = 0.0;         // detections count as zero fidelity
  double conditional_fidelity = 0.0;  // averaged over detector-silent trajectories
  double fidelity_std_error = 0.0;    // of mean_fidelity
  double conditional_std_error = 0.0;
  std::size_t trajectories = 0;
  std::size_t jumped = 0;
  std::vector<std::string> warnings;
  SpinPairState final_state;  // of trajectory 0
  std::vector<TrajectoryRecord> records;
};

/// One trajectory on an already-sampled chain. `rng` supplies the jump
/// thresholds.
ProtocolTrajectory run_protocol_trajectory(const ChainParams& chain, const ProtocolSchedule& schedule,
                                           const SpinPairState& initial, const SpinPairState& target,
                                           Rng& rng, bool record_trace);

ProtocolResult run_protocol(const ChainParams& params, const ProtocolSchedule& schedule,
                            const SpinPairState& initial, const ProtocolOptions& opts);

}  // namespace qdchain
