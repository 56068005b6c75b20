#pragma once

#include "dftr/analysis.hpp"
#include "dftr/integrator.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dftr {

/// Malformed, incomplete or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sectioned key-value document:
///
///   [reactor]  d_ax | peclet, v, k, n, l, t_final, sat_m
///   [control]  alpha, u_bar
///   [grid]     num_nodes
///   [time]     dt, record_every, snapshot_times
///   [analysis] rho0, gamma, horizon, window_fraction, floor
///
/// `#` and `;` start comments. Unknown sections or keys are rejected.
struct ConfigDocument {
  std::map<std::string, std::map<std::string, std::string>> sections;

  const std::string* find(const std::string& section, const std::string& key) const;
};

ConfigDocument parse_config(const std::string& text);
ConfigDocument load_config(const std::filesystem::path& path);

/// Every parameter of a run with defaults materialized.
struct RunSettings {
  SimulationConfig simulation;
  std::optional<double> sat_m;   ///< default_saturation_bound when unset
  double horizon = 7000.0;
  EstimatorOptions estimator;
  std::vector<double> snapshot_times{0.0, 100.0, 200.0, 300.0};

  /// Simulation config with the saturation default applied for its alpha.
  SimulationConfig resolved_simulation() const;
};

/// Nominal values: v = 0.01, l = 1, Pe = 4, k = 0.001, n = 1,
/// T = 400, alpha = 0, u_bar = 1, 201 nodes, dt = 0.1.
RunSettings default_settings();

/// Throws ConfigError on missing required keys ([reactor] v, k, n, l and
/// exactly one of d_ax / peclet), unparsable values or inconsistent settings.
RunSettings resolve_settings(const ConfigDocument& doc);

/// Canonical one-line-per-key rendering; the basis of the manifest hash.
std::string canonical_text(const RunSettings& settings);

}  // namespace dftr
