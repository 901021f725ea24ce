#include "qdchain/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qdchain {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

void ChainParams::validate_shape() const {
  require(n >= 1, "chain needs at least one dot");
  require(eps.size() == static_cast<std::size_t>(n), "eps must have one entry per dot");
  require(couplings.size() == static_cast<std::size_t>(n - 1),
          "couplings must have n-1 entries");
  for (double t : couplings) require(std::isfinite(t), "couplings must be finite");
  for (double e : eps) require(std::isfinite(e), "eps must be finite");
  require(v >= 0.0, "interdot repulsion must be non-negative");
  require(gamma >= 0.0, "detector coupling must be non-negative");
  if (u) require(*u > 0.0, "on-site repulsion must be positive");
}

void ChainParams::validate() const {
  validate_shape();
  for (double t : couplings) require(t >= 0.0, "couplings must be non-negative");
}

double ChainParams::max_coupling() const {
  double m = 0.0;
  for (double t : couplings) m = std::max(m, std::abs(t));
  return m;
}

ChainParams uniform_chain(int n, double t0, double eps0) {
  require(n >= 1, "chain needs at least one dot");
  ChainParams p;
  p.n = n;
  p.eps.assign(n, eps0);
  p.couplings.assign(n - 1, t0);
  return p;
}

ChainParams optimal_chain(int n, double t0, double eps0) {
  ChainParams p;
  p.n = n;
  p.eps.assign(n, eps0);
  p.couplings = n >= 2 ? optimal_couplings(n, t0) : std::vector<double>{};
  return p;
}

std::vector<double> optimal_couplings(int n, double t0) {
  require(n >= 2, "optimal couplings need at least two dots");
  require(t0 > 0.0, "coupling scale must be positive");
  std::vector<double> t(n - 1);
  for (int j = 1; j < n; ++j) t[j - 1] = t0 * std::sqrt(static_cast<double>((n - j) * j));
  return t;
}

std::vector<double> split_optimal_couplings(int n, int left, double t0) {
  require(left >= 1 && left < n, "split point must leave both halves non-empty");
  std::vector<double> t(n - 1, 0.0);
  if (left >= 2) {
    auto a = optimal_couplings(left, t0);
    std::copy(a.begin(), a.end(), t.begin());
  }
  const int right = n - left;
  if (right >= 2) {
    auto b = optimal_couplings(right, t0);
    std::copy(b.begin(), b.end(), t.begin() + left);
  }
  return t;
}

void DisorderSpec::validate() const {
  require(delta_eps >= 0.0, "delta_eps must be non-negative");
  require(delta_t >= 0.0, "delta_t must be non-negative");
}

ChainParams sample_disorder(const ChainParams& params, const DisorderSpec& spec, Rng& rng) {
  spec.validate();
  ChainParams out = params;
  if (spec.delta_eps > 0.0) {
    std::normal_distribution<double> draw(0.0, spec.delta_eps);
    for (double& e : out.eps) e += draw(rng);
  }
  if (spec.delta_t > 0.0) {
    std::normal_distribution<double> draw(0.0, spec.delta_t);
    for (double& t : out.couplings) t += draw(rng);
  }
  return out;
}

std::vector<RegimeWarning> validate_regime(const ChainParams& params, double tau_max) {
  std::vector<RegimeWarning> out;
  const double tmax = params.max_coupling();
  auto fmt = [](const char* head, double a, double b) {
    std::ostringstream os;
    os << head << ": " << a << " vs " << b;
    return os.str();
  };

  if (params.u) {
    const double u = *params.u;
    if (u <= tmax)
      out.push_back({RegimeWarning::Severity::hard, fmt("U > t violated", u, tmax)});
    // Second-order spin exchange J0 = 4t^2/U must stay negligible over the run.
    const double bound = 4.0 * tmax * tmax * tau_max;
    if (u < bound)
      out.push_back({RegimeWarning::Severity::hard, fmt("U >> 4t^2 tau violated", u, bound)});
    else if (u < 10.0 * bound)
      out.push_back({RegimeWarning::Severity::marginal, fmt("U >> 4t^2 tau marginal", u, bound)});
  }
  if (params.gamma > 0.0 && tmax > 0.0 && params.gamma >= tmax)
    out.push_back({RegimeWarning::Severity::marginal,
                   fmt("detector rate comparable to tunnelling", params.gamma, tmax)});
  return out;
}

EnergyEstimate estimate_parameters(const MaterialParams& mat) {
  require(mat.radius > 0.0, "dot radius must be positive");
  require(mat.eps_r > 0.0, "relative permittivity must be positive");
  require(mat.m_star > 0.0, "effective mass must be positive");

  constexpr double e = 1.602176634e-19;        // C
  constexpr double eps0 = 8.8541878128e-12;    // F/m
  constexpr double hbar = 1.054571817e-34;     // J s
  constexpr double m_e = 9.1093837015e-31;     // kg
  constexpr double pi = 3.14159265358979323846;

  const double cg = 8.0 * mat.eps_r * eps0 * mat.radius;
  const double charging = e * e / cg;
  const double spacing = hbar * hbar * pi / (mat.m_star * m_e * mat.radius * mat.radius);
  const double to_uev = 1e6 / e;
  return {charging, spacing, charging * to_uev, spacing * to_uev};
}

}  // namespace qdchain
