#pragma once

// Closed-form amplitudes and spectra for the clean chain. These are used as
// independent oracles for the numerical engine, so nothing here touches the
// Hamiltonian builders or the propagators.

#include <complex>
#include <vector>

namespace qdchain::analytic {

/// Uniform chain, electron starting on dot 1, interaction picture:
///   A_j(tau) = c sum_k exp(-2 i t0 tau cos(k pi/(n+1))) sin(j k pi/(n+1)) sin(k pi/(n+1))
/// with c fixed by A_j(0) = delta_{1j}.
std::complex<double> uniform_1e_amplitude(int n, double t0, double tau, int j);

/// The prefactor c above, computed from the initial-condition constraint.
double chebyshev_prefactor(int n);

/// Optimal couplings, electron starting on dot 1:
///   A_j = C(n-1, j-1)^{1/2} (-i sin t0 tau)^{j-1} (cos t0 tau)^{n-j}
std::complex<double> optimal_1e_amplitude(int n, double t0, double tau, int j);

/// Optimal couplings, V = 0, electrons starting on dots (1, 2):
///   B_ij = [(j-i)^2 (n-1)! (n-2)! / ((i-1)! (j-1)! (n-i)! (n-j)!)]^{1/2}
///          (-i sin t0 tau)^{i+j-3} (cos t0 tau)^{2(n-2)-(i+j-3)}
std::complex<double> optimal_2e_amplitude(int n, double t0, double tau, int i, int j);

enum class SpectrumKind { uniform_1e, optimal_1e, optimal_2e };

struct SpectrumSpec {
  SpectrumKind kind;
  int n;
  double t0 = 1.0;
};

/// Sorted real energies. optimal_2e lists the 2n-3 distinct levels only.
std::vector<double> spectrum(const SpectrumSpec& spec);

/// Second-order hopping amplitude of an adjacent (bonded) pair, t0^2 / V.
double effective_pair_coupling(double t0, double v);

}  // namespace qdchain::analytic
