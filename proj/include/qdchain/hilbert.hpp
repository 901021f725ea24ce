#pragma once

// Basis enumeration for the one-electron sector and the hard-core
// two-electron sector.
//
// Dots are numbered 1..n. A two-electron basis state is an ordered pair
// (i, j) with i < j, the electron on dot i carrying the first spin label and
// the electron on dot j the second. Pairs are flattened row-major:
// (1,2), (1,3), ..., (1,n), (2,3), ..., (n-1,n).
//
// Transport never mixes spin sectors, so a basis carries its spin label as a
// tag only and the orbital amplitudes are shared by all sectors.

#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qdchain {

enum class Spin { up, down };
enum class Sector { one_electron, two_electron };

const char* to_string(Spin s);
const char* to_string(Sector s);

std::size_t dim_2e(int n);
std::size_t index_2e(int i, int j, int n);
std::pair<int, int> pair_2e(std::size_t index, int n);

class SectorBasis {
 public:
  static SectorBasis one_electron(int n, Spin spin = Spin::up);
  static SectorBasis two_electron(int n, Spin first = Spin::up, Spin second = Spin::down);

  Sector kind() const { return kind_; }
  int dots() const { return n_; }
  std::size_t dim() const { return dim_; }
  int electrons() const { return kind_ == Sector::one_electron ? 1 : 2; }
  Spin first_spin() const { return spins_.first; }
  Spin second_spin() const { return spins_.second; }

  /// Same sector kind and dot count; spin tags are ignored.
  bool same_orbitals(const SectorBasis& other) const {
    return kind_ == other.kind_ && n_ == other.n_;
  }

  /// e.g. "1e[up] n=20" or "2e[up,down] n=20".
  std::string label() const;

 private:
  SectorBasis(Sector kind, int n, Spin a, Spin b);

  Sector kind_;
  int n_;
  std::size_t dim_;
  std::pair<Spin, Spin> spins_;
};

struct StateVector {
  SectorBasis basis;
  Eigen::VectorXcd amps;

  StateVector(SectorBasis b, Eigen::VectorXcd a);

  static StateVector localized_1e(int n, int dot, Spin spin = Spin::up);
  static StateVector localized_2e(int n, int i, int j, Spin first = Spin::up,
                                  Spin second = Spin::down);

  double norm2() const { return amps.squaredNorm(); }
};

/// |A_j|^2 per dot; sums to the squared norm.
std::vector<double> occupation_1e(const StateVector& state);

/// Per-dot occupation, summing |B_ij|^2 over pairs containing the dot;
/// sums to twice the squared norm.
std::vector<double> occupation_2e(const StateVector& state);

std::vector<double> occupation(const StateVector& state);

}  // namespace qdchain
