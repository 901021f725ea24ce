#pragma once

// Text formats shared by the CLI and the plotting scripts: JSON chain
// configuration and the CSV tables written by each experiment.

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdchain/hilbert.hpp"
#include "qdchain/model.hpp"
#include "qdchain/montecarlo.hpp"

namespace qdchain {

using Json = nlohmann::json;

/// A chain as written in a config file, before the profile is expanded.
struct ChainConfig {
  int n = 20;
  double eps0 = 0.0;
  double t0 = 1.0;
  std::string profile = "optimal";  // "uniform", "optimal" or "custom"
  std::vector<double> couplings;    // used when profile == "custom"
  double v = 0.0;
  std::optional<double> u;
  double gamma = 0.0;
  DisorderSpec disorder;

  ChainParams params() const;
};

/// Keys: n, eps0, t0, coupling_profile ("uniform" | "optimal" | [array]),
/// v, u, gamma, disorder {delta_eps, delta_t, seed}. Missing keys keep the
/// defaults of `base`. Throws std::invalid_argument on unknown keys or
/// ill-typed values.
ChainConfig chain_config_from_json(const Json& doc, ChainConfig base = {});
Json to_json(const ChainConfig& config);
Json to_json(const ChainParams& params);
Json to_json(const DisorderSpec& spec);

Json read_json_file(const std::string& path);

/// Header "# sector=<label>", then index,re,im.
void write_state_csv(std::ostream& os, const StateVector& state);

/// tau,dot_1..dot_N,norm2
void write_occupation_header(std::ostream& os, int n);
void write_occupation_row(std::ostream& os, double tau, std::span<const double> occupation,
                          double norm2);

/// tau_mid,signal,stderr
void write_signal_csv(std::ostream& os, const DetectorSignal& signal);

/// tau,phi0,phi1,phi2,phi3
void write_overlap_csv(std::ostream& os, std::span<const double> tau,
                       const std::array<std::vector<double>, 4>& overlap);

/// trajectory,seed,jump,tau
void write_jumps_csv(std::ostream& os, std::span<const TrajectoryRecord> records);

/// k,numeric,analytic
void write_spectrum_csv(std::ostream& os, std::span<const double> numeric,
                        std::span<const double> analytic);

}  // namespace qdchain
