#include "qdchain/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <boost/numeric/odeint.hpp>

namespace qdchain {

namespace odeint = boost::numeric::odeint;

void EvolutionPlan::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]) || times[k] < 0.0)
      throw std::invalid_argument("sample times must be finite and non-negative");
    if (k > 0 && times[k] <= times[k - 1])
      throw std::invalid_argument("sample times must be strictly increasing");
  }
}

namespace {

// Connected components of the sparsity graph, each sorted ascending.
std::vector<std::vector<Eigen::Index>> components(const SparseMatrix& m) {
  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> parent(n);
  for (Eigen::Index i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      if (it.value() == 0.0) continue;
      const auto a = find(it.row()), b = find(it.col());
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::vector<Eigen::Index>> out;
  std::vector<Eigen::Index> slot(n, -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Eigen::Index>(out.size());
      out.emplace_back();
    }
    out[slot[root]].push_back(i);
  }
  return out;
}

}  // namespace

SpectralPropagator::SpectralPropagator(const SectorHamiltonian& h)
    : dim_(static_cast<Eigen::Index>(h.dim())), hermitian_(h.hermitian()) {
  const Eigen::MatrixXcd full = h.dense();
  for (auto& index : components(h.matrix)) {
    const auto d = static_cast<Eigen::Index>(index.size());
    Eigen::MatrixXcd sub(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) sub(a, b) = full(index[a], index[b]);

    Block blk{std::move(index), sub.imag().isZero(0.0), {}, {}, {}};
    if (blk.hermitian) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub.real());
      if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
      blk.values = es.eigenvalues().cast<std::complex<double>>();
      blk.vectors = es.eigenvectors().cast<std::complex<double>>();
      blk.inverse = blk.vectors.adjoint();
    } else {
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(sub);
      if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
      blk.values = es.eigenvalues();
      blk.vectors = es.eigenvectors();
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(blk.vectors);
      blk.inverse = lu.inverse();
      const double rc = lu.rcond();
      condition_ = std::max(condition_, rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
    }
    blocks_.push_back(std::move(blk));
  }
}

Eigen::VectorXcd SpectralPropagator::eigenvalues() const {
  Eigen::VectorXcd out(dim_);
  Eigen::Index k = 0;
  for (const auto& b : blocks_) {
    out.segment(k, b.values.size()) = b.values;
    k += b.values.size();
  }
  return out;
}

Eigen::VectorXcd SpectralPropagator::coefficients(const Eigen::VectorXcd& psi0) const {
  Eigen::VectorXcd out(dim_);
  for (const auto& b : blocks_) {
    const auto d = static_cast<Eigen::Index>(b.index.size());
    Eigen::VectorXcd sub(d);
    for (Eigen::Index a = 0; a < d; ++a) sub(a) = psi0(b.index[a]);
    const Eigen::VectorXcd c = b.inverse * sub;
    for (Eigen::Index a = 0; a < d; ++a) out(b.index[a]) = c(a);
  }
  return out;
}

Eigen::VectorXcd SpectralPropagator::state_at(const Eigen::VectorXcd& coeffs, double tau) const {
  const std::complex<double> minus_i(0.0, -1.0);
  Eigen::VectorXcd out(dim_);
  for (const auto& b : blocks_) {
    const auto d = static_cast<Eigen::Index>(b.index.size());
    Eigen::VectorXcd phased(d);
    for (Eigen::Index a = 0; a < d; ++a)
      phased(a) = coeffs(b.index[a]) * std::exp(minus_i * b.values(a) * tau);
    const Eigen::VectorXcd v = b.vectors * phased;
    for (Eigen::Index a = 0; a < d; ++a) out(b.index[a]) = v(a);
  }
  return out;
}

double SpectralPropagator::norm2_at(const Eigen::VectorXcd& coeffs, double tau) const {
  if (hermitian_) return coeffs.squaredNorm();
  return state_at(coeffs, tau).squaredNorm();
}

std::vector<Eigen::VectorXcd> integrate(const SectorHamiltonian& h, const Eigen::VectorXcd& psi0,
                                        std::span<const double> times, double tol) {
  using State = std::vector<std::complex<double>>;
  const std::size_t dim = h.dim();
  State x(psi0.data(), psi0.data() + psi0.size());

  double last_tau = 0.0;
  auto rhs = [&](const State& psi, State& dpsi, double tau) {
    last_tau = tau;
    apply(h, psi.data(), dpsi.data());
    for (auto& z : dpsi) z = std::complex<double>(z.imag(), -z.real());  // -i z
  };

  std::vector<double> grid;
  grid.reserve(times.size() + 1);
  if (times.empty() || times.front() > 0.0) grid.push_back(0.0);
  grid.insert(grid.end(), times.begin(), times.end());

  std::vector<Eigen::VectorXcd> out;
  out.reserve(times.size());
  const bool drop_first = grid.size() > times.size();
  std::size_t seen = 0;
  auto observer = [&](const State& psi, double) {
    if (!(drop_first && seen++ == 0))
      out.emplace_back(Eigen::Map<const Eigen::VectorXcd>(psi.data(), static_cast<Eigen::Index>(dim)));
  };

  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());
  const double span = grid.back() - grid.front();
  const double dt0 = std::clamp(span / 100.0, 1e-6, 1e-2);
  try {
    odeint::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), dt0, observer,
                            odeint::max_step_checker(1000000));
  } catch (const odeint::odeint_error& e) {
    throw IntegrationFailure(std::string("step size underflow: ") + e.what(), last_tau);
  }
  for (const auto& z : x)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw IntegrationFailure("non-finite amplitude", last_tau);
  return out;
}

std::vector<StateVector> evolve(const SectorHamiltonian& h, const StateVector& psi0,
                                const EvolutionPlan& plan) {
  plan.validate();
  if (!h.matches(psi0.basis))
    throw std::invalid_argument("state basis " + psi0.basis.label() +
                                " does not match the Hamiltonian sector");
  if (plan.require_normalized && std::abs(psi0.norm2() - 1.0) > 1e-12)
    throw std::invalid_argument("initial state must be normalized");

  std::vector<StateVector> out;
  out.reserve(plan.times.size());

  bool use_stepping = plan.method == Method::stepping || h.dim() > SpectralPropagator::kMaxDim;
  if (!use_stepping) {
    SpectralPropagator prop(h);
    if (prop.well_conditioned()) {
      const auto c = prop.coefficients(psi0.amps);
      for (double tau : plan.times) out.emplace_back(psi0.basis, prop.state_at(c, tau));
      return out;
    }
    use_stepping = true;
  }
  for (auto& amps : integrate(h, psi0.amps, plan.times, plan.tol))
    out.emplace_back(psi0.basis, std::move(amps));
  return out;
}

std::vector<double> survival_probability(std::span<const StateVector> samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.norm2());
  return out;
}

}  // namespace qdchain
