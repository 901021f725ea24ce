#include "qdchain/hamiltonian.hpp"

#include <ostream>
#include <stdexcept>
#include <vector>

namespace qdchain {

namespace {

using Triplet = Eigen::Triplet<std::complex<double>>;

constexpr Eigen::Index kParallelRows = 512;

SparseMatrix from_triplets(std::size_t dim, const std::vector<Triplet>& entries) {
  const auto d = static_cast<Eigen::Index>(dim);
  SparseMatrix m(d, d);
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

}  // namespace

Eigen::MatrixXd SectorHamiltonian::dense_real() const {
  return dense().real();
}

SectorHamiltonian build_1e(const ChainParams& params) {
  params.validate_shape();
  const int n = params.n;
  const std::complex<double> decay(0.0, -0.5 * params.gamma);

  std::vector<Triplet> entries;
  entries.reserve(3 * static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    std::complex<double> diag = params.eps[j];
    if (j == n - 1) diag += decay;
    entries.emplace_back(j, j, diag);
    if (j + 1 < n && params.couplings[j] != 0.0) {
      entries.emplace_back(j, j + 1, params.couplings[j]);
      entries.emplace_back(j + 1, j, params.couplings[j]);
    }
  }
  return {Sector::one_electron, n, params.gamma, from_triplets(n, entries)};
}

SectorHamiltonian build_2e(const ChainParams& params) {
  params.validate_shape();
  const int n = params.n;
  if (n < 2) throw std::invalid_argument("two-electron sector needs at least two dots");
  const std::size_t dim = dim_2e(n);
  const std::complex<double> decay(0.0, -0.5 * params.gamma);

  std::vector<Triplet> entries;
  entries.reserve(5 * dim);
  // t(a) is the bond between dots a and a+1 (1-based).
  auto t = [&](int a) { return params.couplings[a - 1]; };
  auto hop = [&](std::size_t row, int i, int j, double amp) {
    if (amp != 0.0) entries.emplace_back(row, index_2e(i, j, n), amp);
  };

  for (int i = 1; i < n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const std::size_t row = index_2e(i, j, n);
      std::complex<double> diag = params.eps[i - 1] + params.eps[j - 1];
      if (j - i == 1) diag += params.v;
      if (j == n) diag += decay;
      entries.emplace_back(row, row, diag);

      if (i > 1) hop(row, i - 1, j, t(i - 1));
      if (i + 1 < j) hop(row, i + 1, j, t(i));
      if (j - 1 > i) hop(row, i, j - 1, t(j - 1));
      if (j < n) hop(row, i, j + 1, t(j));
    }
  }
  return {Sector::two_electron, n, params.gamma, from_triplets(dim, entries)};
}

SectorHamiltonian build(const ChainParams& params, Sector sector) {
  return sector == Sector::one_electron ? build_1e(params) : build_2e(params);
}

void apply_serial(const SectorHamiltonian& h, const std::complex<double>* x,
                  std::complex<double>* y) {
  const auto& m = h.matrix;
  const auto* outer = m.outerIndexPtr();
  const auto* inner = m.innerIndexPtr();
  const auto* val = m.valuePtr();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::complex<double> acc = 0.0;
    for (auto k = outer[r]; k < outer[r + 1]; ++k) acc += val[k] * x[inner[k]];
    y[r] = acc;
  }
}

void apply(const SectorHamiltonian& h, const std::complex<double>* x, std::complex<double>* y) {
  const auto& m = h.matrix;
  const Eigen::Index rows = m.rows();
  if (rows < kParallelRows) {
    apply_serial(h, x, y);
    return;
  }
  const auto* outer = m.outerIndexPtr();
  const auto* inner = m.innerIndexPtr();
  const auto* val = m.valuePtr();
#pragma omp parallel for schedule(static)
  for (Eigen::Index r = 0; r < rows; ++r) {
    std::complex<double> acc = 0.0;
    for (auto k = outer[r]; k < outer[r + 1]; ++k) acc += val[k] * x[inner[k]];
    y[r] = acc;
  }
}

void write_matrix_market(std::ostream& os, const SectorHamiltonian& h) {
  const auto& m = h.matrix;
  os << "%%MatrixMarket matrix coordinate complex general\n";
  os << "% " << to_string(h.kind) << " sector, n=" << h.n << ", gamma=" << h.gamma << '\n';
  os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  os.precision(17);
  for (Eigen::Index r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value().real() << ' '
         << it.value().imag() << '\n';
}

}  // namespace qdchain
