#include "qdchain/entangler.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <omp.h>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "qdchain/hamiltonian.hpp"
#include "qdchain/propagate.hpp"

namespace qdchain {

void ExchangePulse::validate() const {
  if (!(te_max >= 0.0)) throw std::invalid_argument("pulse amplitude must be non-negative");
  if (!(width > 0.0)) throw std::invalid_argument("pulse width must be positive");
  if (!(u > 0.0)) throw std::invalid_argument("on-site repulsion must be positive");
  if (!std::isfinite(center)) throw std::invalid_argument("pulse center must be finite");
}

double ExchangePulse::tunneling(double tau) const {
  return te_max / std::cosh((tau - center) / width);
}

double ExchangePulse::exchange(double tau) const {
  const double t = tunneling(tau);
  return 4.0 * t * t / u;
}

std::vector<std::string> ExchangePulse::advisories() const {
  std::vector<std::string> out;
  auto check = [&](const char* what, double value) {
    if (value > 0.1 * u) {
      std::ostringstream os;
      os << what << " not << U: " << value << " vs " << u;
      out.push_back(os.str());
    }
  };
  check("peak tunnelling", te_max);
  check("inverse pulse width", 1.0 / width);
  return out;
}

ExchangePulse ExchangePulse::with_area(double theta, double te_max, double u, double center) {
  if (!(te_max > 0.0) || !(u > 0.0) || !(theta > 0.0))
    throw std::invalid_argument("pulse area, amplitude and U must be positive");
  return {te_max, theta * u / (8.0 * te_max * te_max), center, u};
}

double pulse_area(const ExchangePulse& pulse) {
  pulse.validate();
  // Integral of sech^2 over the real line is 2.
  return 8.0 * pulse.te_max * pulse.te_max * pulse.width / pulse.u;
}

double pulse_area_quadrature(const std::function<double(double)>& exchange, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  return gauss_kronrod<double, 61>::integrate(exchange, a, b, 15, 1e-14, &error);
}

double pulse_area_quadrature(const ExchangePulse& pulse) {
  pulse.validate();
  // Substitute x = (tau - center)/width so the integrand scale is O(1).
  auto f = [&](double x) { return pulse.exchange(pulse.center + pulse.width * x) * pulse.width; };
  const double inf = std::numeric_limits<double>::infinity();
  return pulse_area_quadrature(f, -inf, inf);
}

int spin_pair_index(Spin first, Spin second) {
  return 2 * (first == Spin::down ? 1 : 0) + (second == Spin::down ? 1 : 0);
}

Eigen::Matrix4cd exchange_unitary(double theta) {
  const std::complex<double> c = std::cos(0.5 * theta);
  const std::complex<double> is(0.0, std::sin(0.5 * theta));
  Eigen::Matrix4cd swap = Eigen::Matrix4cd::Zero();
  swap(0, 0) = swap(3, 3) = 1.0;
  swap(1, 2) = swap(2, 1) = 1.0;
  return c * Eigen::Matrix4cd::Identity() + is * swap;
}

SpinPairState SpinPairState::zero(int n) {
  SpinPairState s;
  s.n = n;
  const auto d = static_cast<Eigen::Index>(dim_2e(n));
  for (auto& v : s.orbital) v = Eigen::VectorXcd::Zero(d);
  return s;
}

SpinPairState SpinPairState::product(int n, int i, Spin a, int j, Spin b) {
  return zero(n).add(i, j, a, b, 1.0);
}

SpinPairState& SpinPairState::add(int i, int j, Spin a, Spin b, std::complex<double> amp) {
  orbital[spin_pair_index(a, b)](static_cast<Eigen::Index>(index_2e(i, j, n))) += amp;
  return *this;
}

double SpinPairState::norm2() const {
  double s = 0.0;
  for (const auto& v : orbital) s += v.squaredNorm();
  return s;
}

std::complex<double> SpinPairState::overlap(const SpinPairState& other) const {
  if (other.n != n) throw std::invalid_argument("spin-pair states on different chains");
  std::complex<double> s = 0.0;
  for (int k = 0; k < 4; ++k) s += orbital[k].dot(other.orbital[k]);
  return s;
}

ProtocolSchedule ProtocolSchedule::standard(int n, const ExchangePulse& pulse, double t0) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("standard schedule needs an even chain");
  if (!(t0 > 0.0)) throw std::invalid_argument("coupling scale must be positive");
  ProtocolSchedule s;
  s.left = n / 2;
  s.right = s.left + 1;
  s.step1_duration = std::numbers::pi / (2.0 * t0);
  s.step3_duration = s.step1_duration;
  s.pulse = pulse;
  s.pulse_window = 24.0 * pulse.width;
  s.pulse.center = 0.5 * s.pulse_window;
  return s;
}

void ProtocolSchedule::validate(const ChainParams& params) const {
  if (!(left >= 1 && right == left + 1 && right <= params.n))
    throw std::invalid_argument("entangler must be an adjacent dot pair (L, L+1) inside the chain");
  if (params.couplings[left - 1] != 0.0)
    throw std::invalid_argument("L-R bond must be closed during transport steps");
  if (!(step1_duration >= 0.0 && step3_duration >= 0.0 && pulse_window >= 0.0))
    throw std::invalid_argument("step durations must be non-negative");
  if (!(sample_dt > 0.0)) throw std::invalid_argument("sample interval must be positive");
  pulse.validate();
}

std::array<SpinPairState, 4> reference_states(int n, int left, int right) {
  const double h = std::numbers::sqrt2 / 2.0;
  const std::complex<double> ih(0.0, h);
  std::array<SpinPairState, 4> phi;
  phi[0] = SpinPairState::product(n, 1, Spin::up, n, Spin::down);
  phi[1] = SpinPairState::product(n, left, Spin::up, right, Spin::down);
  phi[2] = SpinPairState::zero(n)
               .add(left, right, Spin::up, Spin::down, h)
               .add(left, right, Spin::down, Spin::up, ih);
  phi[3] = SpinPairState::zero(n).add(1, n, Spin::up, Spin::down, h).add(1, n, Spin::down, Spin::up, ih);
  return phi;
}

namespace {

// Per-step sample offsets: 0, dt, 2dt, ... and the step end.
std::vector<double> step_grid(double duration, double dt, bool include_start) {
  std::vector<double> g;
  const auto steps = static_cast<long>(std::floor(duration / dt + 1e-9));
  for (long k = include_start ? 0 : 1; k <= steps; ++k) g.push_back(k * dt);
  if (g.empty() || duration - g.back() > 1e-9) g.push_back(duration);
  return g;
}

// Orbital evolution of all four spin sectors under one H_eff.
class PairEvolution {
 public:
  PairEvolution(const SpectralPropagator& prop, const SpinPairState& start)
      : prop_(prop), n_(start.n) {
    for (int k = 0; k < 4; ++k) coeffs_[k] = prop_.coefficients(start.orbital[k]);
  }

  SpinPairState at(double t) const {
    SpinPairState s;
    s.n = n_;
    for (int k = 0; k < 4; ++k) s.orbital[k] = prop_.state_at(coeffs_[k], t);
    return s;
  }

  double norm2(double t) const {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += prop_.norm2_at(coeffs_[k], t);
    return s;
  }

 private:
  const SpectralPropagator& prop_;
  int n_;
  std::array<Eigen::VectorXcd, 4> coeffs_;
};

void rotate_pair(SpinPairState& s, Eigen::Index site, const Eigen::Matrix4cd& u) {
  Eigen::Vector4cd a;
  for (int k = 0; k < 4; ++k) a(k) = s.orbital[k](site);
  const Eigen::Vector4cd b = u * a;
  for (int k = 0; k < 4; ++k) s.orbital[k](site) = b(k);
}

}  // namespace

ProtocolTrajectory run_protocol_trajectory(const ChainParams& chain, const ProtocolSchedule& schedule,
                                           const SpinPairState& initial, const SpinPairState& target,
                                           Rng& rng, bool record_trace) {
  schedule.validate(chain);
  if (initial.n != chain.n || target.n != chain.n)
    throw std::invalid_argument("spin-pair state does not match the chain");
  const double norm0 = initial.norm2();
  if (std::abs(norm0 - 1.0) > 1e-9) throw std::invalid_argument("initial state must be normalized");

  const int n = chain.n;
  const auto phi = reference_states(n, schedule.left, schedule.right);
  const auto lr = static_cast<Eigen::Index>(index_2e(schedule.left, schedule.right, n));
  const auto h = build_2e(chain);
  const SpectralPropagator prop(h);

  ProtocolTrajectory out;
  out.record.initial_electrons = 2;
  out.record.disorder_draw = chain;

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double r = uniform(rng);

  auto sample = [&](double tau, const SpinPairState& s) {
    if (!record_trace) return;
    out.tau.push_back(tau);
    const double norm = s.norm2();
    for (int k = 0; k < 4; ++k)
      out.overlap[k].push_back(out.jumped ? 0.0 : std::norm(phi[k].overlap(s)) / norm);
  };

  // Transport step with jump detection. Returns false if an electron was
  // detected before the end of the step.
  auto transport = [&](SpinPairState& state, double start, double duration, bool first_sample) {
    const PairEvolution evo(prop, state);
    double stop = duration;
    if (h.gamma > 0.0 && evo.norm2(duration) <= r) {
      auto f = [&](double t) { return evo.norm2(t) - r; };
      auto done = [](double lo, double hi) { return hi - lo <= 1e-6; };
      stop = boost::math::tools::bisect(f, 0.0, duration, done).second;
      out.jumped = true;
      out.jump_time = start + stop;
      out.record.jump_times.push_back(start + stop);
    }
    for (double t : step_grid(duration, schedule.sample_dt, first_sample)) {
      if (out.jumped && t >= stop) {
        sample(start + t, state);  // zeros after detection
        continue;
      }
      sample(start + t, evo.at(t));
    }
    state = evo.at(stop);
    return !out.jumped;
  };

  SpinPairState state = initial;
  double tau = 0.0;

  // Step 1.
  const bool alive1 = transport(state, tau, schedule.step1_duration, true);
  tau += schedule.step1_duration;
  {
    double w = 0.0;
    for (int k = 0; k < 4; ++k) w += std::norm(state.orbital[k](lr));
    out.trapped_population = w / state.norm2();
  }

  // Step 2: orbital frozen behind the barriers, spins rotated by the
  // accumulated exchange area.
  if (alive1) {
    const SpinPairState trapped = state;
    const auto& pulse = schedule.pulse;
    auto area_until = [&](double s) {
      if (s <= 0.0) return 0.0;
      return pulse_area_quadrature([&](double x) { return pulse.exchange(x); }, 0.0, s);
    };
    for (double s : step_grid(schedule.pulse_window, schedule.sample_dt, false)) {
      if (!record_trace) break;
      SpinPairState rotated = trapped;
      rotate_pair(rotated, lr, exchange_unitary(area_until(s)));
      sample(tau + s, rotated);
    }
    rotate_pair(state, lr, exchange_unitary(area_until(schedule.pulse_window)));
  } else {
    for (double s : step_grid(schedule.pulse_window, schedule.sample_dt, false)) sample(tau + s, state);
  }
  tau += schedule.pulse_window;

  // Step 3.
  if (alive1)
    transport(state, tau, schedule.step3_duration, false);
  else
    for (double s : step_grid(schedule.step3_duration, schedule.sample_dt, false)) sample(tau + s, state);

  out.fidelity = out.jumped ? 0.0 : std::norm(target.overlap(state)) / state.norm2();
  out.final_state = std::move(state);
  return out;
}

ProtocolResult run_protocol(const ChainParams& params, const ProtocolSchedule& schedule,
                            const SpinPairState& initial, const ProtocolOptions& opts) {
  params.validate();
  schedule.validate(params);
  opts.disorder.validate();
  if (opts.trajectories == 0) throw std::invalid_argument("need at least one trajectory");

  const SpinPairState target =
      opts.target ? *opts.target : reference_states(params.n, schedule.left, schedule.right)[3];
  const auto count = static_cast<std::int64_t>(opts.trajectories);
  std::vector<ProtocolTrajectory> runs(opts.trajectories);
  std::exception_ptr failure;
  const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (std::int64_t k = 0; k < count; ++k) {
    try {
      const auto seed = trajectory_seed(opts.master_seed, static_cast<std::uint64_t>(k));
      Rng rng(seed);
      ChainParams draw = sample_disorder(params, opts.disorder, rng);
      draw.couplings[schedule.left - 1] = 0.0;  // barrier stays closed
      runs[k] = run_protocol_trajectory(draw, schedule, initial, target, rng, opts.record_trace);
      runs[k].record.seed = seed;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  ProtocolResult res;
  res.trajectories = runs.size();
  res.tau = runs.front().tau;
  for (int k = 0; k < 4; ++k) res.overlap[k].assign(res.tau.size(), 0.0);

  double sum = 0.0, sum_sq = 0.0, csum = 0.0, csum_sq = 0.0;
  std::size_t poorly_trapped = 0;
  for (auto& run : runs) {
    for (int k = 0; k < 4; ++k)
      for (std::size_t i = 0; i < res.tau.size(); ++i) res.overlap[k][i] += run.overlap[k][i];
    sum += run.fidelity;
    sum_sq += run.fidelity * run.fidelity;
    if (run.jumped) {
      ++res.jumped;
    } else {
      csum += run.fidelity;
      csum_sq += run.fidelity * run.fidelity;
    }
    if (run.trapped_population < 1.0 - 1e-3) ++poorly_trapped;
    res.records.push_back(std::move(run.record));
  }
  const double n = static_cast<double>(runs.size());
  for (auto& trace : res.overlap)
    for (double& v : trace) v /= n;
  res.mean_fidelity = sum / n;
  res.fidelity_std_error = std::sqrt(std::max(0.0, sum_sq / n - res.mean_fidelity * res.mean_fidelity) / n);
  const double silent = n - static_cast<double>(res.jumped);
  if (silent > 0) {
    res.conditional_fidelity = csum / silent;
    res.conditional_std_error =
        std::sqrt(std::max(0.0, csum_sq / silent - res.conditional_fidelity * res.conditional_fidelity) / silent);
  }
  res.final_state = std::move(runs.front().final_state);

  res.warnings = schedule.pulse.advisories();
  if (poorly_trapped > 0) {
    std::ostringstream os;
    os << poorly_trapped << " of " << runs.size()
       << " trajectories left more than 1e-3 of the pair outside the entangler after step 1";
    res.warnings.push_back(os.str());
  }
  return res;
}

}  // namespace qdchain
