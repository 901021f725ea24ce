#include "qdchain/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>

namespace qdchain {

namespace {

template <typename T>
T get(const Json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config key '") + key + "': " + e.what());
  }
}

// Enough digits to round-trip a double.
std::ostream& precise(std::ostream& os) {
  return os << std::setprecision(std::numeric_limits<double>::max_digits10);
}

}  // namespace

ChainParams ChainConfig::params() const {
  ChainParams p;
  if (profile == "uniform") {
    p = uniform_chain(n, t0, eps0);
  } else if (profile == "optimal") {
    p = optimal_chain(n, t0, eps0);
  } else if (profile == "custom") {
    p = uniform_chain(n, t0, eps0);
    if (couplings.size() != static_cast<std::size_t>(std::max(n - 1, 0)))
      throw std::invalid_argument("coupling_profile array must have n-1 entries");
    p.couplings = couplings;
  } else {
    throw std::invalid_argument("unknown coupling profile '" + profile + "'");
  }
  p.v = v;
  p.u = u;
  p.gamma = gamma;
  p.validate();
  return p;
}

ChainConfig chain_config_from_json(const Json& doc, ChainConfig base) {
  if (!doc.is_object()) throw std::invalid_argument("chain config must be a JSON object");
  static const std::set<std::string> known{"n", "eps0", "t0", "coupling_profile", "v",
                                           "u", "gamma", "disorder"};
  for (const auto& [key, _] : doc.items())
    if (!known.count(key)) throw std::invalid_argument("unknown config key '" + key + "'");

  ChainConfig c = std::move(base);
  if (doc.contains("n")) c.n = get<int>(doc, "n");
  if (doc.contains("eps0")) c.eps0 = get<double>(doc, "eps0");
  if (doc.contains("t0")) c.t0 = get<double>(doc, "t0");
  if (doc.contains("v")) c.v = get<double>(doc, "v");
  if (doc.contains("gamma")) c.gamma = get<double>(doc, "gamma");
  if (doc.contains("u")) {
    if (doc["u"].is_null())
      c.u.reset();
    else
      c.u = get<double>(doc, "u");
  }
  if (doc.contains("coupling_profile")) {
    const auto& prof = doc["coupling_profile"];
    if (prof.is_string()) {
      c.profile = prof.get<std::string>();
      if (c.profile != "uniform" && c.profile != "optimal")
        throw std::invalid_argument("coupling_profile must be \"uniform\", \"optimal\" or an array");
      c.couplings.clear();
    } else if (prof.is_array()) {
      c.profile = "custom";
      c.couplings = get<std::vector<double>>(doc, "coupling_profile");
    } else {
      throw std::invalid_argument("coupling_profile must be \"uniform\", \"optimal\" or an array");
    }
  }
  if (doc.contains("disorder")) {
    const auto& d = doc["disorder"];
    if (!d.is_object()) throw std::invalid_argument("disorder must be an object");
    for (const auto& [key, _] : d.items())
      if (key != "delta_eps" && key != "delta_t" && key != "seed")
        throw std::invalid_argument("unknown disorder key '" + key + "'");
    if (d.contains("delta_eps")) c.disorder.delta_eps = get<double>(d, "delta_eps");
    if (d.contains("delta_t")) c.disorder.delta_t = get<double>(d, "delta_t");
    if (d.contains("seed")) c.disorder.seed = get<std::uint64_t>(d, "seed");
  }
  c.disorder.validate();
  return c;
}

Json to_json(const DisorderSpec& spec) {
  return {{"delta_eps", spec.delta_eps}, {"delta_t", spec.delta_t}, {"seed", spec.seed}};
}

Json to_json(const ChainConfig& c) {
  Json doc{{"n", c.n}, {"eps0", c.eps0}, {"t0", c.t0}, {"v", c.v}, {"gamma", c.gamma},
           {"disorder", to_json(c.disorder)}};
  doc["coupling_profile"] = c.profile == "custom" ? Json(c.couplings) : Json(c.profile);
  doc["u"] = c.u ? Json(*c.u) : Json(nullptr);
  return doc;
}

Json to_json(const ChainParams& p) {
  Json doc{{"n", p.n}, {"eps", p.eps}, {"couplings", p.couplings}, {"v", p.v}, {"gamma", p.gamma}};
  doc["u"] = p.u ? Json(*p.u) : Json(nullptr);
  return doc;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
  }
}

void write_state_csv(std::ostream& os, const StateVector& state) {
  os << "# sector=" << state.basis.label() << '\n' << "index,re,im\n";
  precise(os);
  for (Eigen::Index k = 0; k < state.amps.size(); ++k)
    os << k << ',' << state.amps(k).real() << ',' << state.amps(k).imag() << '\n';
}

void write_occupation_header(std::ostream& os, int n) {
  os << "tau";
  for (int j = 1; j <= n; ++j) os << ",dot_" << j;
  os << ",norm2\n";
}

void write_occupation_row(std::ostream& os, double tau, std::span<const double> occupation,
                          double norm2) {
  precise(os) << tau;
  for (double p : occupation) os << ',' << p;
  os << ',' << norm2 << '\n';
}

void write_signal_csv(std::ostream& os, const DetectorSignal& signal) {
  os << "tau_mid,signal,stderr\n";
  precise(os);
  const auto mid = signal.bin_centers();
  for (std::size_t b = 0; b < signal.signal.size(); ++b)
    os << mid[b] << ',' << signal.signal[b] << ',' << signal.std_error[b] << '\n';
}

void write_overlap_csv(std::ostream& os, std::span<const double> tau,
                       const std::array<std::vector<double>, 4>& overlap) {
  for (const auto& trace : overlap)
    if (trace.size() != tau.size()) throw std::invalid_argument("overlap trace length mismatch");
  os << "tau,phi0,phi1,phi2,phi3\n";
  precise(os);
  for (std::size_t i = 0; i < tau.size(); ++i)
    os << tau[i] << ',' << overlap[0][i] << ',' << overlap[1][i] << ',' << overlap[2][i] << ','
       << overlap[3][i] << '\n';
}

void write_jumps_csv(std::ostream& os, std::span<const TrajectoryRecord> records) {
  os << "trajectory,seed,jump,tau\n";
  precise(os);
  for (std::size_t k = 0; k < records.size(); ++k)
    for (std::size_t j = 0; j < records[k].jump_times.size(); ++j)
      os << k << ',' << records[k].seed << ',' << j << ',' << records[k].jump_times[j] << '\n';
}

void write_spectrum_csv(std::ostream& os, std::span<const double> numeric,
                        std::span<const double> analytic) {
  os << "k,numeric,analytic\n";
  precise(os);
  const std::size_t rows = std::max(numeric.size(), analytic.size());
  for (std::size_t k = 0; k < rows; ++k) {
    os << k + 1 << ',';
    if (k < numeric.size()) os << numeric[k];
    os << ',';
    if (k < analytic.size()) os << analytic[k];
    os << '\n';
  }
}

}  // namespace qdchain
