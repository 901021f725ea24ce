#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "qdchain/montecarlo.hpp"

namespace qdchain {

namespace odeint = boost::numeric::odeint;

MasterEquationResult master_equation_oracle(const ChainParams& params, const StateVector& initial,
                                            std::span<const double> times, double tol) {
  params.validate_shape();
  const int n = params.n;
  if (n > kMaxOracleDots)
    throw std::length_error("master-equation oracle is limited to " +
                            std::to_string(kMaxOracleDots) + " dots");
  if (initial.basis.kind() != Sector::one_electron || initial.basis.dots() != n)
    throw std::invalid_argument("oracle needs a one-electron state on the same chain");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("times must increase");
  if (!times.empty() && times.front() < 0.0) throw std::invalid_argument("times must be >= 0");

  using cd = std::complex<double>;
  using State = std::vector<cd>;  // rho row-major (n*n), then the vacuum population
  const auto nn = static_cast<std::size_t>(n) * n;
  const double gamma = params.gamma;
  const std::size_t last = n - 1;

  // Tridiagonal H written out directly rather than taken from build_1e.
  auto h_row = [&](std::size_t r, auto&& visit) {
    visit(r, cd(params.eps[r]));
    if (r > 0) visit(r - 1, cd(params.couplings[r - 1]));
    if (r + 1 < static_cast<std::size_t>(n)) visit(r + 1, cd(params.couplings[r]));
  };

  auto rhs = [&](const State& x, State& dx, double) {
    const cd i_unit(0.0, 1.0);
    for (std::size_t a = 0; a < static_cast<std::size_t>(n); ++a) {
      for (std::size_t b = 0; b < static_cast<std::size_t>(n); ++b) {
        cd comm = 0.0;  // (H rho - rho H)_ab
        h_row(a, [&](std::size_t c, cd hv) { comm += hv * x[c * n + b]; });
        h_row(b, [&](std::size_t c, cd hv) { comm -= x[a * n + c] * hv; });
        cd d = -i_unit * comm;
        const double proj = (a == last ? 1.0 : 0.0) + (b == last ? 1.0 : 0.0);
        d -= 0.5 * gamma * proj * x[a * n + b];
        dx[a * n + b] = d;
      }
    }
    dx[nn] = gamma * x[last * n + last].real();
  };

  State x(nn + 1, 0.0);
  const auto& psi = initial.amps;
  const double norm2 = psi.squaredNorm();
  for (std::size_t a = 0; a < static_cast<std::size_t>(n); ++a)
    for (std::size_t b = 0; b < static_cast<std::size_t>(n); ++b)
      x[a * n + b] = psi(a) * std::conj(psi(b)) / norm2;

  MasterEquationResult out;
  if (times.empty()) return out;

  // Integration grid starts at 0; `keep` marks the requested points.
  std::vector<double> grid;
  std::vector<bool> keep;
  if (times.front() > 0.0) {
    grid.push_back(0.0);
    keep.push_back(false);
  }
  for (double t : times) {
    grid.push_back(t);
    keep.push_back(true);
  }
  if (grid.size() == 1) {
    grid.push_back(1e-9);
    keep.push_back(false);
  }

  std::size_t seen = 0;
  auto observe = [&](const State& s, double t) {
    if (!keep[seen++]) return;
    out.times.push_back(t);
    std::vector<double> pop(n);
    for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) pop[j] = s[j * n + j].real();
    out.flux.push_back(gamma * pop[last]);
    out.populations.push_back(std::move(pop));
    out.vacuum.push_back(s[nn].real());
  };

  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), 1e-3, observe);
  return out;
}

}  // namespace qdchain
