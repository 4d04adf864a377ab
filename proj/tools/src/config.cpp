#include "polent_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "polent/error.hpp"
#include "polent/io.hpp"

namespace polent::cli {

namespace {

class Reader {
 public:
  explicit Reader(const KeyValues& values) : values_(values) {}

  const std::string* raw(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

  double number(const std::string& key, double fallback) const {
    const auto* v = raw(key);
    return v ? parse(key, *v) : fallback;
  }

  std::optional<double> optional_number(const std::string& key) const {
    const auto* v = raw(key);
    if (!v) return std::nullopt;
    return parse(key, *v);
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
    const auto* v = raw(key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size()) {
      fail(ErrorKind::Config, "key '" + key + "': expected a non-negative integer, got '" + *v + "'");
    }
    return out;
  }

  bool boolean(const std::string& key, bool fallback) const {
    const auto* v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    fail(ErrorKind::Config, "key '" + key + "': expected true or false, got '" + *v + "'");
  }

  std::optional<std::string> path(const std::string& key) const {
    const auto* v = raw(key);
    if (!v) return std::nullopt;
    if (!std::filesystem::exists(*v)) {
      fail(ErrorKind::Config, "key '" + key + "': file '" + *v + "' does not exist");
    }
    return *v;
  }

  template <typename Enum>
  Enum choice(const std::string& key, Enum fallback,
              std::initializer_list<std::pair<const char*, Enum>> options) const {
    const auto* v = raw(key);
    if (!v) return fallback;
    for (const auto& [name, value] : options) {
      if (*v == name) return value;
    }
    std::string allowed;
    for (const auto& [name, value] : options) allowed += std::string(allowed.empty() ? "" : "|") + name;
    fail(ErrorKind::Config, "key '" + key + "': expected " + allowed + ", got '" + *v + "'");
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    const auto* v = raw(key);
    if (!v) return out;
    std::string item;
    std::istringstream in(*v);
    while (std::getline(in, item, ',')) {
      const auto first = item.find_first_not_of(" \t");
      const auto last = item.find_last_not_of(" \t");
      if (first == std::string::npos) fail(ErrorKind::Config, "key '" + key + "': empty list entry");
      out.push_back(parse(key, item.substr(first, last - first + 1)));
    }
    return out;
  }

 private:
  static double parse(const std::string& key, const std::string& text) {
    try {
      return io::parse_double(text, "key '" + key + "'");
    } catch (const Error& e) {
      fail(ErrorKind::Config, e.what());
    }
  }

  const KeyValues& values_;
};

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "pump_center_nm",      "pump_bandwidth_nm",  "degeneracy_nm",
      "crystal_length_mm",   "group_index_signal", "group_index_idler",
      "group_index_pump",    "intrinsic_delay_fs", "grid_points",
      "window_center_nm",    "window_width_nm",    "filter_center_nm",
      "filter_width_nm",     "jsa_source",         "jsa_file",
      "edge_h_nm",           "edge_v_nm",          "edge_width_nm",
      "edge_sense",          "edge_shape",         "transmission_table_h",
      "transmission_table_v", "target_alpha",      "tau_min_fs",
      "tau_max_fs",          "tau_points",         "delays_fs",
      "degrade_scale",       "degrade_offset_fs",  "state_delay_fs",
      "background",          "coincidence_rate_hz", "acquisition_s",
      "gate_rate_hz",        "singles_rate_hz",    "seed",
      "noiseless",           "counts_file",        "rho_file",
      "reference_rho_file",  "observations_file",  "fidelity_reference",
      "out_dir",
  };
  return keys;
}

RunConfig config_from_values(const KeyValues& values) {
  const auto& keys = known_keys();
  for (const auto& [key, value] : values) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      fail(ErrorKind::Config, "unknown key '" + key + "'");
    }
  }

  const Reader r(values);
  RunConfig c;

  auto& p = c.pdc;
  p.pump_center_wavelength = r.number("pump_center_nm", 767.6) * kNano;
  p.pump_bandwidth_fwhm = r.number("pump_bandwidth_nm", 0.8) * kNano;
  p.degeneracy_wavelength = r.number("degeneracy_nm", 1535.2) * kNano;
  const double length = r.number("crystal_length_mm", 1.87) * 1e-3;
  const double ngs = r.number("group_index_signal", 3.3);
  const double delay = r.number("intrinsic_delay_fs", 25.9) * kFemto;
  const PdcModel calibrated = PdcModel::calibrated(ngs, length, delay);
  p.crystal_length = length;
  p.group_index_signal = ngs;
  p.intrinsic_delay_comp = delay;
  p.group_index_idler = r.number("group_index_idler", calibrated.group_index_idler);
  p.group_index_pump = r.number("group_index_pump", calibrated.group_index_pump);

  c.grid_points = r.integer("grid_points", 512);
  c.window_center = r.number("window_center_nm", 1535.2) * kNano;
  c.window_width = r.number("window_width_nm", 40.0) * kNano;
  c.filter_center = r.number("filter_center_nm", 1535.2) * kNano;
  c.filter_width = r.number("filter_width_nm", 40.0) * kNano;
  c.jsa_source = r.choice("jsa_source", JsaSource::Model,
                          {{"model", JsaSource::Model}, {"file", JsaSource::File}});
  c.jsa_file = r.path("jsa_file");

  auto& s = c.splitter;
  s.edge_wavelength_h = r.number("edge_h_nm", 1535.2) * kNano;
  s.edge_wavelength_v = r.number("edge_v_nm", 1535.2) * kNano;
  s.step_width = r.number("edge_width_nm", 7.0) * kNano;
  s.sense = r.choice("edge_sense", EdgeSense::LongPass,
                     {{"long", EdgeSense::LongPass}, {"short", EdgeSense::ShortPass}});
  s.shape = r.choice("edge_shape", EdgeShape::Logistic,
                     {{"logistic", EdgeShape::Logistic}, {"erf", EdgeShape::Erf}});
  if (const auto t = r.path("transmission_table_h")) s.table_h = read_transmission_table(*t);
  if (const auto t = r.path("transmission_table_v")) s.table_v = read_transmission_table(*t);
  c.target_alpha = r.optional_number("target_alpha");

  c.tau_min = r.number("tau_min_fs", -400.0) * kFemto;
  c.tau_max = r.number("tau_max_fs", 400.0) * kFemto;
  c.tau_points = r.integer("tau_points", 801);
  for (double t : r.list("delays_fs")) c.delays.push_back(t * kFemto);

  c.degradation.amplitude_scale = r.number("degrade_scale", 1.0);
  c.degradation.time_offset = r.number("degrade_offset_fs", 0.0) * kFemto;

  c.state_delay = r.number("state_delay_fs", 25.9) * kFemto;
  c.background = r.number("background", 0.0125);
  c.coincidence_rate = r.number("coincidence_rate_hz", 4.0);
  c.counts.acquisition_time = r.number("acquisition_s", 120.0);
  c.counts.gate_rate = r.number("gate_rate_hz", 1.9e6);
  const double singles = r.number("singles_rate_hz", 870.0);
  c.counts.singles_rate_a = singles;
  c.counts.singles_rate_b = singles;
  c.seed = r.integer("seed", 1);
  c.noiseless = r.boolean("noiseless", false);

  c.counts_file = r.path("counts_file");
  c.rho_file = r.path("rho_file");
  c.reference_rho_file = r.path("reference_rho_file");
  c.observations_file = r.path("observations_file");
  c.fidelity_reference = r.choice("fidelity_reference", FidelityReference::Nominal,
                                  {{"none", FidelityReference::None},
                                   {"nominal", FidelityReference::Nominal},
                                   {"offset", FidelityReference::Offset}});
  if (const auto* out = r.raw("out_dir")) c.out_dir = *out;

  if (c.jsa_source == JsaSource::File) require_key(c.jsa_file, "jsa_file");
  c.validate();
  return c;
}

void RunConfig::validate() const {
  const auto as_config = [](const auto& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Format) throw;
      fail(ErrorKind::Config, e.what());
    }
  };
  as_config([&] { pdc.validate(); });
  as_config([&] { splitter.validate(); });
  as_config([&] { degradation.validate(); });
  if (grid_points < 2) fail(ErrorKind::Config, "grid_points must be at least 2");
  if (!(window_width > 0.0) || !(filter_width > 0.0)) {
    fail(ErrorKind::Config, "window and filter widths must be positive");
  }
  if (target_alpha && !(*target_alpha > 0.0 && *target_alpha < 1.0)) {
    fail(ErrorKind::Config, "target_alpha must lie in (0, 1)");
  }
  if (!(tau_max > tau_min) || tau_points < 2) {
    fail(ErrorKind::Config, "sweep needs tau_max_fs > tau_min_fs and tau_points >= 2");
  }
  for (std::size_t k = 1; k < delays.size(); ++k) {
    if (!(delays[k] > delays[k - 1])) fail(ErrorKind::Config, "delays_fs must be strictly increasing");
  }
  if (!(background >= 0.0 && background <= 0.25)) {
    fail(ErrorKind::Config, "background must lie in [0, 0.25]");
  }
  if (!(coincidence_rate > 0.0) || !(counts.acquisition_time > 0.0) || !(counts.gate_rate > 0.0) ||
      !(counts.singles_rate_a >= 0.0)) {
    fail(ErrorKind::Config, "count rates, acquisition time and gate rate must be positive");
  }
}

RunConfig load_config(const std::optional<std::string>& path, const KeyValues& overrides) {
  KeyValues values;
  if (path) {
    std::ifstream in(*path);
    if (!in) fail(ErrorKind::Config, "cannot open config file '" + *path + "'");
    values = io::read_key_values(in, *path);
  }
  for (const auto& [key, value] : overrides) values[key] = value;
  return config_from_values(values);
}

const std::string& require_key(const std::optional<std::string>& value, const char* key) {
  if (!value) fail(ErrorKind::Config, std::string("missing key '") + key + "'");
  return *value;
}

}  // namespace polent::cli
