#include "qdchain/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qdchain::analytic {

namespace {

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

// sqrt(weight) * (-i s)^p * c^q evaluated in log space so that large
// binomial weights and tiny trigonometric powers do not overflow.
std::complex<double> binomial_term(double log_weight, double s, int p, double c, int q) {
  if ((p > 0 && s == 0.0) || (q > 0 && c == 0.0)) return 0.0;
  double log_mag = 0.5 * log_weight;
  if (p > 0) log_mag += p * std::log(std::abs(s));
  if (q > 0) log_mag += q * std::log(std::abs(c));
  double sign = 1.0;
  if (p % 2 == 1 && s < 0.0) sign = -sign;
  if (q % 2 == 1 && c < 0.0) sign = -sign;
  // (-i)^p cycles through 1, -i, -1, i.
  static constexpr std::complex<double> kPhase[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  return sign * std::exp(log_mag) * kPhase[p % 4];
}

}  // namespace

double chebyshev_prefactor(int n) {
  if (n < 1) throw std::invalid_argument("dot count must be positive");
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double s = std::sin(k * std::numbers::pi / (n + 1));
    sum += s * s;
  }
  return 1.0 / sum;
}

std::complex<double> uniform_1e_amplitude(int n, double t0, double tau, int j) {
  if (n < 1 || j < 1 || j > n) throw std::invalid_argument("dot index out of range");
  const double c = chebyshev_prefactor(n);
  const double q = std::numbers::pi / (n + 1);
  std::complex<double> sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double phase = -2.0 * t0 * tau * std::cos(k * q);
    sum += std::polar(std::sin(j * k * q) * std::sin(k * q), phase);
  }
  return c * sum;
}

std::complex<double> optimal_1e_amplitude(int n, double t0, double tau, int j) {
  if (n < 1 || j < 1 || j > n) throw std::invalid_argument("dot index out of range");
  const double log_binom = log_factorial(n - 1) - log_factorial(j - 1) - log_factorial(n - j);
  return binomial_term(log_binom, std::sin(t0 * tau), j - 1, std::cos(t0 * tau), n - j);
}

std::complex<double> optimal_2e_amplitude(int n, double t0, double tau, int i, int j) {
  if (n < 2 || i < 1 || j > n || i >= j)
    throw std::invalid_argument("pair index requires 1 <= i < j <= n");
  const double d = j - i;
  const double log_weight = 2.0 * std::log(d) + log_factorial(n - 1) + log_factorial(n - 2) -
                            log_factorial(i - 1) - log_factorial(j - 1) - log_factorial(n - i) -
                            log_factorial(n - j);
  const int p = i + j - 3;
  const int q = 2 * (n - 2) - p;
  return binomial_term(log_weight, std::sin(t0 * tau), p, std::cos(t0 * tau), q);
}

std::vector<double> spectrum(const SpectrumSpec& spec) {
  const int n = spec.n;
  const double t0 = spec.t0;
  std::vector<double> out;
  switch (spec.kind) {
    case SpectrumKind::uniform_1e:
      if (n < 1) throw std::invalid_argument("dot count must be positive");
      for (int k = 1; k <= n; ++k) out.push_back(2.0 * t0 * std::cos(k * std::numbers::pi / (n + 1)));
      break;
    case SpectrumKind::optimal_1e:
      if (n < 1) throw std::invalid_argument("dot count must be positive");
      for (int k = 1; k <= n; ++k) out.push_back(t0 * (2.0 * k - n - 1));
      break;
    case SpectrumKind::optimal_2e:
      if (n < 2) throw std::invalid_argument("two electrons need at least two dots");
      for (int k = 1; k <= 2 * n - 3; ++k) out.push_back(t0 * (2.0 * k - 2.0 * n + 2.0));
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

double effective_pair_coupling(double t0, double v) {
  if (!(v > 0.0)) throw std::invalid_argument("interdot repulsion must be positive");
  return t0 * t0 / v;
}

}  // namespace qdchain::analytic
