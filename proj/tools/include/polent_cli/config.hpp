#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polent/dichroic.hpp"
#include "polent/jointstate.hpp"
#include "polent/spectral.hpp"
#include "polent/tomography.hpp"

namespace polent::cli {

enum class JsaSource { Model, File };
enum class FidelityReference { None, Nominal, Offset };

/// Everything one run needs. Internal units are SI; the file uses nm, mm and fs.
struct RunConfig {
  PdcModel pdc;
  std::size_t grid_points = 512;
  double window_center = 1535.2 * kNano;
  double window_width = 40.0 * kNano;
  double filter_center = 1535.2 * kNano;
  double filter_width = 40.0 * kNano;
  JsaSource jsa_source = JsaSource::Model;
  std::optional<std::string> jsa_file;

  SplitterResponse splitter;
  /// When set, the H/V edges are split about filter_center to reach this alpha.
  std::optional<double> target_alpha;

  double tau_min = -400.0 * kFemto;
  double tau_max = 400.0 * kFemto;
  std::size_t tau_points = 801;
  std::vector<double> delays;  ///< s, optional explicit list

  DegradationModel degradation;

  double state_delay = 25.9 * kFemto;
  double background = 0.0125;
  double coincidence_rate = 4.0;  ///< Hz, (H,V)/(V,H) maximum
  CountModel counts;              ///< acquisition, gate and singles rates
  std::uint64_t seed = 1;
  bool noiseless = false;

  std::optional<std::string> counts_file;
  std::optional<std::string> rho_file;
  std::optional<std::string> reference_rho_file;
  std::optional<std::string> observations_file;
  FidelityReference fidelity_reference = FidelityReference::Nominal;

  std::string out_dir = ".";

  /// Runs every module-level validation.
  void validate() const;
};

using KeyValues = std::map<std::string, std::string>;

/// Every key accepted in a configuration file.
const std::vector<std::string>& known_keys();

/// Builds a config from parsed key/values. Unknown keys, malformed values and
/// referenced files that do not exist are configuration errors.
RunConfig config_from_values(const KeyValues& values);

/// Reads `path` (if any), applies `overrides` on top, then builds the config.
RunConfig load_config(const std::optional<std::string>& path, const KeyValues& overrides);

/// Requires an optional path that a subcommand depends on.
const std::string& require_key(const std::optional<std::string>& value, const char* key);

}  // namespace polent::cli
