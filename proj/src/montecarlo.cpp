#include "qdchain/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>

#include <omp.h>
#include <boost/math/tools/roots.hpp>

#include "qdchain/hamiltonian.hpp"
#include "qdchain/propagate.hpp"

namespace qdchain {

namespace {

// psi(start + offset) for one no-jump segment.
class Segment {
 public:
  Segment(const SectorHamiltonian& h, const Eigen::VectorXcd& psi0) : h_(h), psi0_(psi0) {
    if (h.dim() <= SpectralPropagator::kMaxDim) {
      prop_.emplace(h);
      if (prop_->well_conditioned())
        coeffs_ = prop_->coefficients(psi0);
      else
        prop_.reset();
    }
  }

  Eigen::VectorXcd state(double offset) const {
    if (prop_) return prop_->state_at(coeffs_, offset);
    if (offset == 0.0) return psi0_;
    const double t[] = {offset};
    return integrate(h_, psi0_, t, 1e-12).front();
  }

  double norm2(double offset) const {
    if (prop_) return prop_->norm2_at(coeffs_, offset);
    return state(offset).squaredNorm();
  }

 private:
  const SectorHamiltonian& h_;
  Eigen::VectorXcd psi0_;
  std::optional<SpectralPropagator> prop_;
  Eigen::VectorXcd coeffs_;
};

StateVector remove_last_dot_electron(const StateVector& psi) {
  const int n = psi.basis.dots();
  if (psi.basis.kind() == Sector::one_electron)
    throw std::logic_error("one-electron jumps lead to the vacuum");
  // Pairs (i, n) keep the electron on dot i, which carries the first spin.
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n);
  for (int i = 1; i < n; ++i) a(i - 1) = psi.amps(static_cast<Eigen::Index>(index_2e(i, n, n)));
  const double norm = a.norm();
  if (norm == 0.0) throw std::runtime_error("jump from a state with no weight on the last dot");
  a /= norm;
  return {SectorBasis::one_electron(n, psi.basis.first_spin()), std::move(a)};
}

Snapshot snapshot_of(double tau, const StateVector& s) {
  auto occ = occupation(s);
  const double norm = s.norm2();
  for (double& p : occ) p /= norm;
  return {tau, s.basis.electrons(), std::move(occ)};
}

TrajectoryRecord run_with_rng(const ChainParams& params, const DisorderSpec& spec,
                              const StateVector& initial, std::uint64_t seed,
                              const TrajectoryOptions& opts) {
  if (!(opts.tau_end > 0.0)) throw std::invalid_argument("tau_end must be positive");
  if (!(opts.localization_tol > 0.0)) throw std::invalid_argument("localization tolerance must be positive");
  if (initial.basis.dots() != params.n) throw std::invalid_argument("initial state has the wrong dot count");

  Rng rng(seed);
  TrajectoryRecord rec;
  rec.seed = seed;
  rec.initial_electrons = initial.basis.electrons();
  rec.disorder_draw = sample_disorder(params, spec, rng);

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto snap = opts.snapshot_times.begin();
  const auto snap_end = opts.snapshot_times.end();

  StateVector psi = initial;
  psi.amps /= std::sqrt(psi.norm2());
  double tau = 0.0;

  while (true) {
    const auto h = build(rec.disorder_draw, psi.basis.kind());
    const Segment seg(h, psi.amps);
    const double r = uniform(rng);
    const double remaining = opts.tau_end - tau;

    double stop = remaining;
    bool jumped = false;
    if (h.gamma > 0.0 && seg.norm2(remaining) <= r) {
      auto f = [&](double dt) { return seg.norm2(dt) - r; };
      auto done = [&](double lo, double hi) { return hi - lo <= opts.localization_tol; };
      auto bracket = boost::math::tools::bisect(f, 0.0, remaining, done);
      stop = bracket.second;
      jumped = true;
    }

    const double seg_end = tau + stop;
    for (; snap != snap_end && (*snap < seg_end || (!jumped && *snap <= seg_end)); ++snap)
      if (*snap >= tau) rec.samples.push_back(snapshot_of(*snap, {psi.basis, seg.state(*snap - tau)}));

    if (!jumped) break;
    tau += stop;
    rec.jump_times.push_back(tau);
    if (psi.basis.kind() == Sector::one_electron) {
      for (; snap != snap_end && *snap <= opts.tau_end; ++snap)
        rec.samples.push_back({*snap, 0, std::vector<double>(params.n, 0.0)});
      break;
    }
    psi = remove_last_dot_electron({psi.basis, seg.state(stop)});
  }
  return rec;
}

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TrajectoryRecord run_trajectory(const ChainParams& params, const DisorderSpec& spec,
                                const StateVector& initial, std::uint64_t seed,
                                const TrajectoryOptions& opts) {
  params.validate_shape();
  return run_with_rng(params, spec, initial, seed, opts);
}

namespace {

struct EnsembleSetup {
  ChainParams params;
  DisorderSpec spec;
};

EnsembleSetup prepare(const ChainParams& params, const DisorderSpec& spec,
                      const EnsembleOptions& opts) {
  params.validate();
  spec.validate();
  if (opts.trajectories == 0) throw std::invalid_argument("need at least one trajectory");
  if (opts.disorder_mode == DisorderMode::per_trajectory) return {params, spec};
  Rng rng(spec.seed);
  return {sample_disorder(params, spec, rng), DisorderSpec{0.0, 0.0, spec.seed}};
}

}  // namespace

std::vector<TrajectoryRecord> run_ensemble_serial(const ChainParams& params,
                                                  const DisorderSpec& spec,
                                                  const StateVector& initial,
                                                  const EnsembleOptions& opts) {
  const auto setup = prepare(params, spec, opts);
  std::vector<TrajectoryRecord> out;
  out.reserve(opts.trajectories);
  for (std::size_t k = 0; k < opts.trajectories; ++k)
    out.push_back(run_with_rng(setup.params, setup.spec, initial,
                               trajectory_seed(opts.master_seed, k), opts.trajectory));
  return out;
}

std::vector<TrajectoryRecord> run_ensemble(const ChainParams& params, const DisorderSpec& spec,
                                           const StateVector& initial, const EnsembleOptions& opts) {
  const auto setup = prepare(params, spec, opts);
  const auto count = static_cast<std::int64_t>(opts.trajectories);
  std::vector<TrajectoryRecord> out(opts.trajectories);
  std::exception_ptr failure;
  const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
  for (std::int64_t k = 0; k < count; ++k) {
    try {
      out[k] = run_with_rng(setup.params, setup.spec, initial,
                            trajectory_seed(opts.master_seed, static_cast<std::uint64_t>(k)),
                            opts.trajectory);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<double> DetectorSignal::bin_centers() const {
  std::vector<double> c;
  for (std::size_t b = 0; b + 1 < bin_edges.size(); ++b)
    c.push_back(0.5 * (bin_edges[b] + bin_edges[b + 1]));
  return c;
}

std::vector<double> uniform_edges(double tau_end, int bins) {
  if (bins < 1 || !(tau_end > 0.0)) throw std::invalid_argument("need positive tau_end and bins");
  std::vector<double> e(bins + 1);
  for (int b = 0; b <= bins; ++b) e[b] = tau_end * b / bins;
  return e;
}

DetectorSignal detector_signal(std::span<const TrajectoryRecord> records,
                               std::span<const double> bin_edges) {
  if (records.empty()) throw std::invalid_argument("detector signal needs at least one trajectory");
  if (bin_edges.size() < 2) throw std::invalid_argument("need at least one bin");
  for (std::size_t b = 1; b < bin_edges.size(); ++b)
    if (!(bin_edges[b] > bin_edges[b - 1])) throw std::invalid_argument("bin edges must increase");

  const std::size_t bins = bin_edges.size() - 1;
  std::vector<double> sum(bins, 0.0), sum_sq(bins, 0.0);
  std::vector<int> local(bins);
  for (const auto& rec : records) {
    std::fill(local.begin(), local.end(), 0);
    for (double t : rec.jump_times) {
      if (t < bin_edges.front() || t >= bin_edges.back()) continue;
      const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), t);
      ++local[static_cast<std::size_t>(it - bin_edges.begin()) - 1];
    }
    for (std::size_t b = 0; b < bins; ++b) {
      sum[b] += local[b];
      sum_sq[b] += static_cast<double>(local[b]) * local[b];
    }
  }

  const double n = static_cast<double>(records.size());
  DetectorSignal out;
  out.bin_edges.assign(bin_edges.begin(), bin_edges.end());
  out.n_trajectories = records.size();
  for (std::size_t b = 0; b < bins; ++b) {
    const double width = bin_edges[b + 1] - bin_edges[b];
    const double mean = sum[b] / n;
    const double var = std::max(0.0, sum_sq[b] / n - mean * mean);
    out.signal.push_back(mean / width);
    out.std_error.push_back(std::sqrt(var / n) / width);
  }
  return out;
}

}  // namespace qdchain
