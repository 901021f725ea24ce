#pragma once

// Figure-reproduction runs behind the command-line tool. Each run writes
// one or more CSV tables and a `<name>.meta.json` sidecar holding the
// resolved configuration, so a run can be repeated from its sidecar alone.

#include <cstdint>
#include <string>
#include <vector>

#include "qdchain/analytic.hpp"
#include "qdchain/io.hpp"
#include "qdchain/montecarlo.hpp"

namespace qdchain {

enum class ExperimentKind { transport_1e, transport_2e, mc_1e, mc_2e, entangle, oracle_check, spectra };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

const char* to_string(analytic::SpectrumKind kind);
analytic::SpectrumKind spectrum_kind_from_string(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::transport_1e;
  ChainConfig chain;
  std::vector<int> initial;  // starting dot(s); empty selects the kind's default
  double tau_end = 0.0;      // 0 selects the kind's default
  double dt = 0.0;           // sampling interval; 0 selects the kind's default
  std::string out_dir = ".";

  // Monte Carlo
  std::size_t trajectories = 5000;
  std::uint64_t seed = 0;
  int threads = 0;
  int bins = 100;
  DisorderMode disorder_mode = DisorderMode::per_trajectory;

  // spectra
  analytic::SpectrumKind spectrum = analytic::SpectrumKind::optimal_1e;

  // entangle
  double te_max = 6.0;
  double theta = 1.5707963267948966;  // pi/2
  bool record_trace = true;

  /// Fills kind-dependent defaults and checks every field. Throws
  /// std::invalid_argument.
  ExperimentConfig resolved() const;
};

Json to_json(const ExperimentConfig& config);

/// Accepts either a sidecar-style document {"kind", "chain", "run", ...} or a
/// bare chain document; fields absent from `doc` keep the values in `base`.
ExperimentConfig experiment_from_json(const Json& doc, ExperimentConfig base = {});

struct ExperimentOutput {
  std::vector<std::string> files;
  Json summary;  // kind-specific numbers, also stored in the sidecar
};

ExperimentOutput run(const ExperimentConfig& config);

std::string version();

}  // namespace qdchain
