#pragma once

#include <complex>
#include <iosfwd>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "qdchain/hilbert.hpp"
#include "qdchain/model.hpp"

namespace qdchain {

using SparseMatrix = Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>;

/// H_eff = H - (i/2) gamma n_N restricted to one sector. Every basis state
/// with an electron on the last dot carries -i gamma/2 on the diagonal.
struct SectorHamiltonian {
  Sector kind;
  int n;
  double gamma;
  SparseMatrix matrix;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
  bool hermitian() const { return gamma == 0.0; }
  bool matches(const SectorBasis& b) const { return b.kind() == kind && b.dots() == n; }

  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix); }
  /// The Hermitian part, which is real for this model.
  Eigen::MatrixXd dense_real() const;
};

/// Tridiagonal: eps_j on the diagonal, t_{j,j+1} off it, open ends.
SectorHamiltonian build_1e(const ChainParams& params);

/// Hard-core pair basis: eps_i + eps_j + V [j - i == 1] on the diagonal and
/// single-electron hops that never create i == j.
SectorHamiltonian build_2e(const ChainParams& params);

SectorHamiltonian build(const ChainParams& params, Sector sector);

/// y = H x. Reference kernel.
void apply_serial(const SectorHamiltonian& h, const std::complex<double>* x,
                  std::complex<double>* y);

/// y = H x, rows split across OpenMP threads above a size threshold.
/// Identical results to apply_serial (each row is summed in the same order).
void apply(const SectorHamiltonian& h, const std::complex<double>* x, std::complex<double>* y);

/// MatrixMarket coordinate dump ("complex general"), 1-based indices.
void write_matrix_market(std::ostream& os, const SectorHamiltonian& h);

}  // namespace qdchain
