#include <vector>

#include <benchmark/benchmark.h>

#include "qdchain/hamiltonian.hpp"
#include "qdchain/montecarlo.hpp"

using namespace qdchain;

namespace {

ChainParams noisy_chain(int n) {
  ChainParams p = uniform_chain(n);
  p.v = 0.5;
  p.gamma = 0.2;
  return p;
}

Eigen::VectorXcd ramp(std::size_t dim) {
  Eigen::VectorXcd x(static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = {1.0 / (1.0 + k), 0.5 - 0.01 * k};
  return x;
}

template <auto Kernel>
void BM_Apply2e(benchmark::State& state) {
  const auto h = build_2e(noisy_chain(static_cast<int>(state.range(0))));
  const auto x = ramp(h.dim());
  Eigen::VectorXcd y(x.size());
  for (auto _ : state) {
    Kernel(h, x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(h.matrix.nonZeros()));
}

template <bool Parallel>
void BM_Ensemble(benchmark::State& state) {
  ChainParams p = uniform_chain(static_cast<int>(state.range(0)));
  p.gamma = 0.2;
  DisorderSpec disorder{0.1, 0.05, 1};
  const auto psi0 = StateVector::localized_1e(p.n, 1);
  EnsembleOptions opts;
  opts.trajectories = 200;
  opts.master_seed = 7;
  opts.trajectory.tau_end = 100.0;
  for (auto _ : state) {
    auto records = Parallel ? run_ensemble(p, disorder, psi0, opts) : run_ensemble_serial(p, disorder, psi0, opts);
    benchmark::DoNotOptimize(records.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(opts.trajectories));
}

}  // namespace

BENCHMARK(BM_Apply2e<apply_serial>)->Arg(20)->Arg(60)->Arg(120);
BENCHMARK(BM_Apply2e<apply>)->Arg(20)->Arg(60)->Arg(120);
BENCHMARK(BM_Ensemble<false>)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ensemble<true>)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
