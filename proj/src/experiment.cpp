#include "qdchain/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qdchain/entangler.hpp"
#include "qdchain/hamiltonian.hpp"
#include "qdchain/propagate.hpp"

#ifndef QDCHAIN_VERSION
#define QDCHAIN_VERSION "unknown"
#endif

namespace qdchain {

namespace {

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::transport_1e, "transport-1e"}, {ExperimentKind::transport_2e, "transport-2e"},
    {ExperimentKind::mc_1e, "mc-1e"},               {ExperimentKind::mc_2e, "mc-2e"},
    {ExperimentKind::entangle, "entangle"},         {ExperimentKind::oracle_check, "oracle-check"},
    {ExperimentKind::spectra, "spectra"},
};

constexpr std::pair<analytic::SpectrumKind, const char*> kSpectrumNames[] = {
    {analytic::SpectrumKind::uniform_1e, "uniform-1e"},
    {analytic::SpectrumKind::optimal_1e, "optimal-1e"},
    {analytic::SpectrumKind::optimal_2e, "optimal-2e"},
};

bool two_electron(ExperimentKind k) {
  return k == ExperimentKind::transport_2e || k == ExperimentKind::mc_2e || k == ExperimentKind::entangle;
}

std::vector<double> time_grid(double tau_end, double dt) {
  std::vector<double> g;
  const auto steps = static_cast<long>(std::floor(tau_end / dt + 1e-9));
  for (long k = 0; k <= steps; ++k) g.push_back(k * dt);
  if (tau_end - g.back() > 1e-9) g.push_back(tau_end);
  return g;
}

StateVector initial_state(const ExperimentConfig& c, int n) {
  if (c.initial.size() == 1) return StateVector::localized_1e(n, c.initial[0]);
  return StateVector::localized_2e(n, c.initial[0], c.initial[1]);
}

std::ofstream open_out(const ExperimentConfig& c, const std::string& name, ExperimentOutput& out) {
  const auto path = std::filesystem::path(c.out_dir) / name;
  std::ofstream os(path);
  if (!os) throw std::invalid_argument("cannot write " + path.string());
  out.files.push_back(path.string());
  return os;
}

Json warnings_json(const std::vector<RegimeWarning>& warnings) {
  Json arr = Json::array();
  for (const auto& w : warnings)
    arr.push_back({{"severity", w.severity == RegimeWarning::Severity::hard ? "hard" : "marginal"},
                   {"message", w.message}});
  return arr;
}

void run_transport(const ExperimentConfig& c, const ChainParams& params, ExperimentOutput& out) {
  const StateVector psi0 = initial_state(c, params.n);
  const auto h = build(params, psi0.basis.kind());
  EvolutionPlan plan;
  plan.times = time_grid(c.tau_end, c.dt);
  const auto samples = evolve(h, psi0, plan);

  const std::string name = to_string(c.kind);
  auto os = open_out(c, name + ".csv", out);
  write_occupation_header(os, params.n);
  for (std::size_t k = 0; k < samples.size(); ++k)
    write_occupation_row(os, plan.times[k], occupation(samples[k]), samples[k].norm2());
  auto state = open_out(c, name + ".state.csv", out);
  write_state_csv(state, samples.back());

  out.summary["final_norm2"] = samples.back().norm2();
  out.summary["final_occupation"] = occupation(samples.back());
  out.summary["warnings"] = warnings_json(validate_regime(params, c.tau_end));
}

void run_monte_carlo(const ExperimentConfig& c, const ChainParams& params, ExperimentOutput& out) {
  const StateVector psi0 = initial_state(c, params.n);
  EnsembleOptions opts;
  opts.trajectories = c.trajectories;
  opts.master_seed = c.seed;
  opts.threads = c.threads;
  opts.disorder_mode = c.disorder_mode;
  opts.trajectory.tau_end = c.tau_end;
  opts.trajectory.snapshot_times = time_grid(c.tau_end, c.dt);
  const auto records = run_ensemble(params, c.chain.disorder, psi0, opts);

  const std::string name = to_string(c.kind);
  const auto edges = uniform_edges(c.tau_end, c.bins);
  const auto signal = detector_signal(records, edges);
  auto sig = open_out(c, name + ".signal.csv", out);
  write_signal_csv(sig, signal);

  // Ensemble-averaged occupations; the last column is the probability that
  // the detector has not clicked yet.
  const auto& times = opts.trajectory.snapshot_times;
  auto occ = open_out(c, name + ".occupation.csv", out);
  write_occupation_header(occ, params.n);
  const double count = static_cast<double>(records.size());
  for (std::size_t s = 0; s < times.size(); ++s) {
    std::vector<double> mean(params.n, 0.0);
    double silent = 0.0;
    for (const auto& r : records) {
      for (int j = 0; j < params.n; ++j) mean[j] += r.samples[s].occupation[j];
      if (r.jump_times.empty() || r.jump_times.front() > times[s]) silent += 1.0;
    }
    for (double& m : mean) m /= count;
    write_occupation_row(occ, times[s], mean, silent / count);
  }
  auto jumps = open_out(c, name + ".jumps.csv", out);
  write_jumps_csv(jumps, records);

  std::size_t total = 0;
  for (const auto& r : records) total += r.jump_times.size();
  out.summary["trajectories"] = records.size();
  out.summary["total_jumps"] = total;
  out.summary["warnings"] = warnings_json(validate_regime(params, c.tau_end));
}

ChainParams entangler_chain(const ExperimentConfig& c) {
  ChainConfig cc = c.chain;
  if (!cc.u) cc.u = 100.0;
  const int left = cc.n / 2;
  if (cc.profile == "optimal") {
    cc.profile = "custom";
    cc.couplings = split_optimal_couplings(cc.n, left, cc.t0);
  } else if (cc.profile == "uniform") {
    cc.profile = "custom";
    cc.couplings.assign(cc.n - 1, cc.t0);
    cc.couplings[left - 1] = 0.0;
  }
  return cc.params();
}

void run_entangle(const ExperimentConfig& c, ExperimentOutput& out) {
  const ChainParams params = entangler_chain(c);
  const auto pulse = ExchangePulse::with_area(c.theta, c.te_max, *params.u);
  auto schedule = ProtocolSchedule::standard(params.n, pulse, c.chain.t0);
  schedule.sample_dt = c.dt;

  ProtocolOptions opts;
  opts.trajectories = c.trajectories;
  opts.master_seed = c.seed;
  opts.threads = c.threads;
  opts.disorder = c.chain.disorder;
  opts.record_trace = c.record_trace;
  const auto initial = SpinPairState::product(params.n, c.initial[0], Spin::up, c.initial[1], Spin::down);
  const auto res = run_protocol(params, schedule, initial, opts);

  if (c.record_trace) {
    auto os = open_out(c, "entangle.csv", out);
    write_overlap_csv(os, res.tau, res.overlap);
  }
  const double total = schedule.step1_duration + schedule.pulse_window + schedule.step3_duration;
  out.summary["mean_fidelity"] = res.mean_fidelity;
  out.summary["mean_fidelity_stderr"] = res.fidelity_std_error;
  out.summary["conditional_fidelity"] = res.conditional_fidelity;
  out.summary["conditional_fidelity_stderr"] = res.conditional_std_error;
  out.summary["trajectories"] = res.trajectories;
  out.summary["jumped"] = res.jumped;
  out.summary["pulse"] = {{"te_max", pulse.te_max}, {"width", pulse.width}, {"u", pulse.u},
                          {"area", pulse_area(pulse)}};
  out.summary["schedule"] = {{"left", schedule.left},
                             {"right", schedule.right},
                             {"step1", schedule.step1_duration},
                             {"step2", schedule.pulse_window},
                             {"step3", schedule.step3_duration}};
  Json warnings = warnings_json(validate_regime(params, total));
  for (const auto& w : res.warnings) warnings.push_back({{"severity", "marginal"}, {"message", w}});
  out.summary["warnings"] = warnings;
}

double max_deviation_1e(const ChainParams& params, const std::vector<double>& times,
                        std::complex<double> (*oracle)(int, double, double, int), double t0) {
  EvolutionPlan plan;
  plan.times = times;
  const auto samples = evolve(build_1e(params), StateVector::localized_1e(params.n, 1), plan);
  double dev = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k)
    for (int j = 1; j <= params.n; ++j)
      dev = std::max(dev, std::abs(samples[k].amps(j - 1) - oracle(params.n, t0, times[k], j)));
  return dev;
}

void run_oracle_check(const ExperimentConfig& c, ExperimentOutput& out) {
  const int n = c.chain.n;
  const double t0 = c.chain.t0;
  const auto times = time_grid(c.tau_end, c.dt);
  Json checks = Json::array();
  double worst = 0.0;
  auto record = [&](const char* name, double dev) {
    checks.push_back({{"name", name}, {"max_deviation", dev}});
    worst = std::max(worst, dev);
  };

  record("uniform-1e", max_deviation_1e(uniform_chain(n, t0), times, analytic::uniform_1e_amplitude, t0));
  record("optimal-1e", max_deviation_1e(optimal_chain(n, t0), times, analytic::optimal_1e_amplitude, t0));
  if (n >= 2) {
    EvolutionPlan plan;
    plan.times = times;
    const auto samples = evolve(build_2e(optimal_chain(n, t0)), StateVector::localized_2e(n, 1, 2), plan);
    double dev = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
      for (int i = 1; i < n; ++i)
        for (int j = i + 1; j <= n; ++j)
          dev = std::max(dev, std::abs(samples[k].amps(static_cast<Eigen::Index>(index_2e(i, j, n))) -
                                       analytic::optimal_2e_amplitude(n, t0, times[k], i, j)));
    record("optimal-2e", dev);
  }
  out.summary["checks"] = checks;
  out.summary["max_deviation"] = worst;
  out.summary["tolerance"] = 1e-8;
  out.summary["pass"] = worst < 1e-8;
  auto os = open_out(c, "oracle-check.json", out);
  os << out.summary.dump(2) << '\n';
}

// Sorted levels with repeats (within tol) merged.
std::vector<double> distinct(std::vector<double> values, double tol) {
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  for (double v : values)
    if (out.empty() || v - out.back() > tol) out.push_back(v);
  return out;
}

void run_spectra(const ExperimentConfig& c, ExperimentOutput& out) {
  const int n = c.chain.n;
  const double t0 = c.chain.t0;
  const bool uniform = c.spectrum == analytic::SpectrumKind::uniform_1e;
  const ChainParams params = uniform ? uniform_chain(n, t0) : optimal_chain(n, t0);
  const auto h = c.spectrum == analytic::SpectrumKind::optimal_2e ? build_2e(params) : build_1e(params);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense_real(), Eigen::EigenvaluesOnly);
  std::vector<double> numeric(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  if (c.spectrum == analytic::SpectrumKind::optimal_2e) numeric = distinct(numeric, 1e-7 * t0);
  else std::sort(numeric.begin(), numeric.end());
  const auto closed = analytic::spectrum({c.spectrum, n, t0});

  double dev = numeric.size() == closed.size() ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < std::min(numeric.size(), closed.size()); ++k)
    dev = std::max(dev, std::abs(numeric[k] - closed[k]));
  auto os = open_out(c, "spectra.csv", out);
  write_spectrum_csv(os, numeric, closed);
  out.summary["spectrum"] = to_string(c.spectrum);
  out.summary["levels"] = numeric.size();
  out.summary["closed_form_levels"] = closed.size();
  out.summary["max_deviation"] = std::isfinite(dev) ? Json(dev) : Json(nullptr);
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (name == n) return k;
  throw std::invalid_argument("unknown experiment kind '" + name + "'");
}

const char* to_string(analytic::SpectrumKind kind) {
  for (const auto& [k, name] : kSpectrumNames)
    if (k == kind) return name;
  return "?";
}

analytic::SpectrumKind spectrum_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kSpectrumNames)
    if (name == n) return k;
  throw std::invalid_argument("unknown spectrum kind '" + name + "'");
}

std::string version() { return QDCHAIN_VERSION; }

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig c = *this;
  const int n = c.chain.n;
  const bool mc = c.kind == ExperimentKind::mc_1e || c.kind == ExperimentKind::mc_2e;
  if (n < 1) throw std::invalid_argument("n must be at least 1");

  if (c.initial.empty()) {
    if (c.kind == ExperimentKind::entangle)
      c.initial = {1, n};
    else if (two_electron(c.kind))
      c.initial = {1, 2};
    else
      c.initial = {1};
  }
  if (c.tau_end == 0.0) c.tau_end = mc ? 100.0 : 30.0;
  if (c.dt == 0.0) c.dt = mc ? 1.0 : c.kind == ExperimentKind::entangle ? 0.02 : 0.05;

  if (!(c.tau_end > 0.0) || !std::isfinite(c.tau_end)) throw std::invalid_argument("tau_end must be positive");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw std::invalid_argument("dt must be positive");
  if (c.trajectories == 0) throw std::invalid_argument("trajectories must be positive");
  if (c.bins < 1) throw std::invalid_argument("bins must be positive");
  if (c.threads < 0) throw std::invalid_argument("threads must be non-negative");
  if (c.out_dir.empty()) throw std::invalid_argument("output directory must be given");

  const std::size_t want = two_electron(c.kind) ? 2 : 1;
  if (c.kind != ExperimentKind::oracle_check && c.kind != ExperimentKind::spectra) {
    if (c.initial.size() != want)
      throw std::invalid_argument(std::string(to_string(c.kind)) + " needs " + std::to_string(want) +
                                  " initial dot(s)");
    for (int d : c.initial)
      if (d < 1 || d > n) throw std::invalid_argument("initial dot out of range");
    if (want == 2 && c.initial[0] >= c.initial[1])
      throw std::invalid_argument("initial dots must be distinct and increasing");
  }
  if (c.kind == ExperimentKind::entangle) {
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("entangle needs an even chain with n >= 4");
    if (!(c.te_max > 0.0) || !(c.theta > 0.0))
      throw std::invalid_argument("te_max and theta must be positive");
  }
  if ((c.kind == ExperimentKind::oracle_check || c.kind == ExperimentKind::spectra) && n < 2)
    throw std::invalid_argument(std::string(to_string(c.kind)) + " needs n >= 2");
  c.chain.disorder.validate();
  if (c.kind != ExperimentKind::entangle) (void)c.chain.params();  // validates the chain
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json run{{"initial", c.initial},
           {"tau_end", c.tau_end},
           {"dt", c.dt},
           {"out_dir", c.out_dir},
           {"trajectories", c.trajectories},
           {"seed", c.seed},
           {"threads", c.threads},
           {"bins", c.bins},
           {"disorder_mode", c.disorder_mode == DisorderMode::fixed ? "fixed" : "per-trajectory"},
           {"spectrum", to_string(c.spectrum)},
           {"te_max", c.te_max},
           {"theta", c.theta},
           {"record_trace", c.record_trace}};
  return {{"kind", to_string(c.kind)}, {"chain", to_json(c.chain)}, {"run", run}};
}

ExperimentConfig experiment_from_json(const Json& doc, ExperimentConfig base) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig c = std::move(base);
  if (!doc.contains("chain")) {
    c.chain = chain_config_from_json(doc, c.chain);
    return c;
  }
  for (const auto& [key, _] : doc.items())
    if (key != "kind" && key != "chain" && key != "run" && key != "version" && key != "summary" &&
        key != "params" && key != "files")
      throw std::invalid_argument("unknown config key '" + key + "'");
  if (doc.contains("kind")) c.kind = experiment_kind_from_string(doc["kind"].get<std::string>());
  c.chain = chain_config_from_json(doc["chain"], c.chain);
  if (!doc.contains("run")) return c;
  const auto& r = doc["run"];
  try {
    if (r.contains("initial")) c.initial = r["initial"].get<std::vector<int>>();
    if (r.contains("tau_end")) c.tau_end = r["tau_end"].get<double>();
    if (r.contains("dt")) c.dt = r["dt"].get<double>();
    if (r.contains("out_dir")) c.out_dir = r["out_dir"].get<std::string>();
    if (r.contains("trajectories")) c.trajectories = r["trajectories"].get<std::size_t>();
    if (r.contains("seed")) c.seed = r["seed"].get<std::uint64_t>();
    if (r.contains("threads")) c.threads = r["threads"].get<int>();
    if (r.contains("bins")) c.bins = r["bins"].get<int>();
    if (r.contains("disorder_mode")) {
      const auto m = r["disorder_mode"].get<std::string>();
      if (m != "fixed" && m != "per-trajectory") throw std::invalid_argument("unknown disorder_mode " + m);
      c.disorder_mode = m == "fixed" ? DisorderMode::fixed : DisorderMode::per_trajectory;
    }
    if (r.contains("spectrum")) c.spectrum = spectrum_kind_from_string(r["spectrum"].get<std::string>());
    if (r.contains("te_max")) c.te_max = r["te_max"].get<double>();
    if (r.contains("theta")) c.theta = r["theta"].get<double>();
    if (r.contains("record_trace")) c.record_trace = r["record_trace"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("run section: ") + e.what());
  }
  return c;
}

ExperimentOutput run(const ExperimentConfig& config) {
  const ExperimentConfig c = config.resolved();
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec) throw std::invalid_argument("cannot create output directory " + c.out_dir + ": " + ec.message());

  ExperimentOutput out;
  out.summary = Json::object();
  Json params = nullptr;
  switch (c.kind) {
    case ExperimentKind::transport_1e:
    case ExperimentKind::transport_2e: {
      const auto p = c.chain.params();
      params = to_json(p);
      run_transport(c, p, out);
      break;
    }
    case ExperimentKind::mc_1e:
    case ExperimentKind::mc_2e: {
      const auto p = c.chain.params();
      params = to_json(p);
      run_monte_carlo(c, p, out);
      break;
    }
    case ExperimentKind::entangle:
      params = to_json(entangler_chain(c));
      run_entangle(c, out);
      break;
    case ExperimentKind::oracle_check:
      run_oracle_check(c, out);
      break;
    case ExperimentKind::spectra:
      run_spectra(c, out);
      break;
  }

  Json meta = to_json(c);
  meta["version"] = version();
  meta["params"] = params;
  meta["summary"] = out.summary;
  meta["files"] = out.files;
  ExperimentOutput dummy;
  auto os = open_out(c, std::string(to_string(c.kind)) + ".meta.json", dummy);
  os << meta.dump(2) << '\n';
  out.files.push_back(dummy.files.front());
  return out;
}

}  // namespace qdchain
