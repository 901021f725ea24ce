#include "qdchain/hilbert.hpp"

#include <sstream>
#include <stdexcept>

namespace qdchain {

const char* to_string(Spin s) { return s == Spin::up ? "up" : "down"; }

const char* to_string(Sector s) { return s == Sector::one_electron ? "1e" : "2e"; }

std::size_t dim_2e(int n) {
  if (n < 1) throw std::invalid_argument("dot count must be positive");
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
}

std::size_t index_2e(int i, int j, int n) {
  if (i < 1 || j > n || i >= j)
    throw std::invalid_argument("pair index requires 1 <= i < j <= n");
  const auto ii = static_cast<std::size_t>(i - 1);
  // Rows 1..i-1 hold (n-1) + (n-2) + ... + (n-i+1) pairs.
  const std::size_t row_start = ii * (2 * static_cast<std::size_t>(n) - ii - 1) / 2;
  return row_start + static_cast<std::size_t>(j - i - 1);
}

std::pair<int, int> pair_2e(std::size_t index, int n) {
  if (index >= dim_2e(n)) throw std::invalid_argument("pair index out of range");
  int i = 1;
  std::size_t row = static_cast<std::size_t>(n - 1);
  while (index >= row) {
    index -= row;
    --row;
    ++i;
  }
  return {i, i + 1 + static_cast<int>(index)};
}

SectorBasis::SectorBasis(Sector kind, int n, Spin a, Spin b)
    : kind_(kind), n_(n), spins_(a, b) {
  dim_ = kind == Sector::one_electron ? static_cast<std::size_t>(n) : dim_2e(n);
}

SectorBasis SectorBasis::one_electron(int n, Spin spin) {
  if (n < 1) throw std::invalid_argument("dot count must be positive");
  return SectorBasis(Sector::one_electron, n, spin, spin);
}

SectorBasis SectorBasis::two_electron(int n, Spin first, Spin second) {
  if (n < 2) throw std::invalid_argument("two electrons need at least two dots");
  return SectorBasis(Sector::two_electron, n, first, second);
}

std::string SectorBasis::label() const {
  std::ostringstream os;
  os << to_string(kind_) << '[' << to_string(spins_.first);
  if (kind_ == Sector::two_electron) os << ',' << to_string(spins_.second);
  os << "] n=" << n_;
  return os.str();
}

StateVector::StateVector(SectorBasis b, Eigen::VectorXcd a) : basis(b), amps(std::move(a)) {
  if (static_cast<std::size_t>(amps.size()) != basis.dim())
    throw std::invalid_argument("amplitude count does not match basis dimension");
}

StateVector StateVector::localized_1e(int n, int dot, Spin spin) {
  auto basis = SectorBasis::one_electron(n, spin);
  if (dot < 1 || dot > n) throw std::invalid_argument("dot out of range");
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n);
  a(dot - 1) = 1.0;
  return {basis, std::move(a)};
}

StateVector StateVector::localized_2e(int n, int i, int j, Spin first, Spin second) {
  auto basis = SectorBasis::two_electron(n, first, second);
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dim()));
  a(static_cast<Eigen::Index>(index_2e(i, j, n))) = 1.0;
  return {basis, std::move(a)};
}

std::vector<double> occupation_1e(const StateVector& state) {
  if (state.basis.kind() != Sector::one_electron)
    throw std::invalid_argument("occupation_1e needs a one-electron state");
  std::vector<double> p(state.basis.dots());
  for (int j = 0; j < state.basis.dots(); ++j) p[j] = std::norm(state.amps(j));
  return p;
}

std::vector<double> occupation_2e(const StateVector& state) {
  if (state.basis.kind() != Sector::two_electron)
    throw std::invalid_argument("occupation_2e needs a two-electron state");
  const int n = state.basis.dots();
  std::vector<double> p(n, 0.0);
  std::size_t k = 0;
  for (int i = 1; i < n; ++i)
    for (int j = i + 1; j <= n; ++j, ++k) {
      const double w = std::norm(state.amps(static_cast<Eigen::Index>(k)));
      p[i - 1] += w;
      p[j - 1] += w;
    }
  return p;
}

std::vector<double> occupation(const StateVector& state) {
  return state.basis.kind() == Sector::one_electron ? occupation_1e(state)
                                                    : occupation_2e(state);
}

}  // namespace qdchain
