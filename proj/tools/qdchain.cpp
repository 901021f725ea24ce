#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "qdchain/experiment.hpp"
#include "qdchain/propagate.hpp"

using namespace qdchain;

namespace {

int fail(const std::string& type, const std::string& message) {
  std::cerr << Json{{"error", type}, {"message", message}}.dump() << '\n';
  return 2;
}

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::size_t trajectories = 5000;
  int threads = 0;
  int n = 20;
  std::string profile;
  std::vector<int> initial;
  double tau_end = 0.0;
  double dt = 0.0;
  int bins = 100;
  double v = 0.0, gamma = 0.0, u = 0.0, t0 = 1.0, eps0 = 0.0;
  double delta_eps = 0.0, delta_t = 0.0;
  std::uint64_t disorder_seed = 0;
  std::string disorder_mode;
  std::string spectrum;
  double te_max = 6.0, theta = 0.0;
  bool no_trace = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON chain or sidecar file")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--n", f.n, "number of dots");
  cmd->add_option("--t0", f.t0, "coupling scale");
  cmd->add_option("--eps0", f.eps0, "on-site energy");
  cmd->add_option("--profile", f.profile, "coupling profile: uniform or optimal");
  cmd->add_option("--v", f.v, "nearest-neighbour repulsion");
  cmd->add_option("--u", f.u, "on-site repulsion");
  cmd->add_option("--gamma", f.gamma, "detector coupling on the last dot");
  cmd->add_option("--tau-end", f.tau_end, "end of the run");
  cmd->add_option("--dt", f.dt, "sampling interval");
}

void add_initial(CLI::App* cmd, Flags& f) {
  cmd->add_option("--initial", f.initial, "starting dot(s)");
}

void add_mc(CLI::App* cmd, Flags& f) {
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--trajectories", f.trajectories, "number of trajectories");
  cmd->add_option("--threads", f.threads, "OpenMP threads (0 = default)");
  cmd->add_option("--delta-eps", f.delta_eps, "std. deviation of on-site energies");
  cmd->add_option("--delta-t", f.delta_t, "std. deviation of couplings");
  cmd->add_option("--disorder-seed", f.disorder_seed, "seed of a fixed disorder draw");
}

bool given(const CLI::App* cmd, const char* name) {
  const auto* opt = cmd->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

ExperimentConfig build_config(const CLI::App* cmd, ExperimentKind kind, const Flags& f) {
  ExperimentConfig c;
  if (given(cmd, "--config")) c = experiment_from_json(read_json_file(f.config), c);
  c.kind = kind;
  auto& ch = c.chain;
  if (given(cmd, "--n")) ch.n = f.n;
  if (given(cmd, "--t0")) ch.t0 = f.t0;
  if (given(cmd, "--eps0")) ch.eps0 = f.eps0;
  if (given(cmd, "--profile")) {
    if (f.profile != "uniform" && f.profile != "optimal")
      throw std::invalid_argument("--profile must be uniform or optimal");
    ch.profile = f.profile;
    ch.couplings.clear();
  }
  if (given(cmd, "--v")) ch.v = f.v;
  if (given(cmd, "--u")) ch.u = f.u;
  if (given(cmd, "--gamma")) ch.gamma = f.gamma;
  if (given(cmd, "--delta-eps")) ch.disorder.delta_eps = f.delta_eps;
  if (given(cmd, "--delta-t")) ch.disorder.delta_t = f.delta_t;
  if (given(cmd, "--disorder-seed")) ch.disorder.seed = f.disorder_seed;
  if (given(cmd, "--out")) c.out_dir = f.out;
  if (given(cmd, "--initial")) c.initial = f.initial;
  if (given(cmd, "--tau-end")) c.tau_end = f.tau_end;
  if (given(cmd, "--dt")) c.dt = f.dt;
  if (given(cmd, "--seed")) c.seed = f.seed;
  if (given(cmd, "--trajectories")) c.trajectories = f.trajectories;
  if (given(cmd, "--threads")) c.threads = f.threads;
  if (given(cmd, "--bins")) c.bins = f.bins;
  if (given(cmd, "--disorder-mode")) {
    if (f.disorder_mode != "fixed" && f.disorder_mode != "per-trajectory")
      throw std::invalid_argument("--disorder-mode must be fixed or per-trajectory");
    c.disorder_mode = f.disorder_mode == "fixed" ? DisorderMode::fixed : DisorderMode::per_trajectory;
  }
  if (given(cmd, "--kind")) c.spectrum = spectrum_kind_from_string(f.spectrum);
  if (given(cmd, "--te-max")) c.te_max = f.te_max;
  if (given(cmd, "--theta")) c.theta = f.theta;
  if (given(cmd, "--no-trace")) c.record_trace = false;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent transport and entanglement in quantum-dot chains"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  Flags f;

  std::vector<std::pair<CLI::App*, ExperimentKind>> commands;
  auto add = [&](ExperimentKind kind, const char* help) {
    auto* cmd = app.add_subcommand(to_string(kind), help);
    add_common(cmd, f);
    commands.emplace_back(cmd, kind);
    return cmd;
  };

  auto* t1 = add(ExperimentKind::transport_1e, "coherent one-electron transport");
  add_initial(t1, f);
  auto* t2 = add(ExperimentKind::transport_2e, "coherent two-electron transport");
  add_initial(t2, f);
  for (auto kind : {ExperimentKind::mc_1e, ExperimentKind::mc_2e}) {
    auto* mc = add(kind, kind == ExperimentKind::mc_1e ? "quantum-jump detector simulation, one electron"
                                                       : "quantum-jump detector simulation, two electrons");
    add_initial(mc, f);
    add_mc(mc, f);
    mc->add_option("--bins", f.bins, "detector-signal histogram bins");
    mc->add_option("--disorder-mode", f.disorder_mode, "per-trajectory or fixed");
  }
  auto* ent = add(ExperimentKind::entangle, "three-step spin-pair entangler");
  add_mc(ent, f);
  ent->add_option("--te-max", f.te_max, "peak L-R tunnelling during the exchange pulse");
  ent->add_option("--theta", f.theta, "exchange pulse area (default pi/2)");
  ent->add_flag("--no-trace", f.no_trace, "skip the overlap traces");
  add(ExperimentKind::oracle_check, "closed-form amplitudes against numerical evolution");
  auto* sp = add(ExperimentKind::spectra, "numerical and closed-form spectra");
  sp->add_option("--kind", f.spectrum, "uniform-1e, optimal-1e or optimal-2e");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    for (const auto& [cmd, kind] : commands) {
      if (!cmd->parsed()) continue;
      const auto out = run(build_config(cmd, kind, f));
      Json report = out.summary;
      report["files"] = out.files;
      std::cout << report.dump(2) << '\n';
      if (report.contains("pass") && !report["pass"].get<bool>()) return 1;
    }
  } catch (const std::invalid_argument& e) {
    return fail("invalid_argument", e.what());
  } catch (const IntegrationFailure& e) {
    std::cerr << Json{{"error", "integration_failure"}, {"message", e.what()}, {"tau", e.tau()}}.dump()
              << '\n';
    return 3;
  } catch (const std::exception& e) {
    return fail("runtime_error", e.what());
  }
  return 0;
}
