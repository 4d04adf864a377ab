#include "polent_cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "polent/error.hpp"
#include "polent/io.hpp"
#include "polent/metrics.hpp"
#include "polent/tomography.hpp"

namespace polent::cli {

namespace {

std::ofstream open_output(const RunConfig& config, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  const auto path = std::filesystem::path(config.out_dir) / name;
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Config, "cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open '" + path + "'");
  return in;
}

std::string fs(double seconds) { return io::format_double(seconds / kFemto); }

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f %%", 100.0 * fraction);
  return buf;
}

/// D evaluated at tau - offset and scaled, for an explicit delay list.
DelaySweep degraded_at(const PostSelectedAmplitudes& amps, const std::vector<double>& taus,
                       const DegradationModel& model) {
  std::vector<double> shifted(taus.size());
  for (std::size_t k = 0; k < taus.size(); ++k) shifted[k] = taus[k] - model.time_offset;
  DelaySweep sweep = delay_sweep_at(amps, shifted);
  for (std::size_t k = 0; k < taus.size(); ++k) {
    auto& s = sweep.samples[k];
    s.tau = taus[k];
    s.d *= model.amplitude_scale;
    s.purity = s.alpha * s.alpha + s.beta * s.beta + 2.0 * std::norm(s.d);
  }
  unwrap_phases(sweep);
  return sweep;
}

bool is_identity(const DegradationModel& m) {
  return m.amplitude_scale == 1.0 && m.time_offset == 0.0;
}

}  // namespace

JsaGrid make_jsa(const RunConfig& config) {
  if (config.jsa_source == JsaSource::File) {
    const auto& path = require_key(config.jsa_file, "jsa_file");
    auto in = open_input(path);
    return io::read_jsa(in, path);
  }
  const auto grid =
      FrequencyGrid::wavelength_window(config.window_center, config.window_width, config.grid_points);
  return apply_bandpass(build_jsa(config.pdc, grid), config.filter_center, config.filter_width);
}

SplitterResponse make_splitter(const RunConfig& config, const JsaGrid& jsa) {
  if (!config.target_alpha) return config.splitter;
  return calibrate_edge_split(jsa, config.splitter, *config.target_alpha, config.filter_center);
}

PostSelectedAmplitudes make_amplitudes(const RunConfig& config) {
  const JsaGrid jsa = make_jsa(config);
  return post_select(jsa, make_splitter(config, jsa));
}

PolarizationDensityMatrix model_state(const RunConfig& config, const PostSelectedAmplitudes& amps,
                                      double tau, const DegradationModel& degradation) {
  const auto [alpha, beta] = diagonal_weights(amps);
  const auto d = degradation.amplitude_scale * d_parameter(amps, tau - degradation.time_offset);
  return add_background(density_matrix(alpha, beta, d), config.background);
}

void run_jsa(const RunConfig& config, std::ostream& report) {
  const JsaGrid jsa = make_jsa(config);
  const auto splitter = make_splitter(config, jsa);
  const auto amps = post_select(jsa, splitter);
  {
    auto out = open_output(config, "jsa.txt");
    io::write_jsa(out, jsa);
  }
  {
    auto out = open_output(config, "jsa_abs.txt");
    io::write_jsa_magnitude(out, jsa);
  }
  report << "discarded_norm " << io::format_double(jsa.discarded_norm) << '\n'
         << "neglected_norm " << io::format_double(amps.neglected_norm) << '\n'
         << "edge_h_nm " << io::format_double(splitter.edge_wavelength_h / kNano) << '\n'
         << "edge_v_nm " << io::format_double(splitter.edge_wavelength_v / kNano) << '\n';
}

void run_sweep(const RunConfig& config, std::ostream& report) {
  const auto amps = make_amplitudes(config);
  DelaySweep sweep = delay_sweep(amps, config.tau_min, config.tau_max, config.tau_points);
  if (!is_identity(config.degradation)) {
    auto degraded = apply_degradation(sweep, config.degradation);
    if (degraded.coverage_warning) report << "warning: " << *degraded.coverage_warning << '\n';
    sweep = std::move(degraded.sweep);
  }
  {
    auto out = open_output(config, "sweep.txt");
    io::write_sweep(out, sweep);
  }
  if (!config.delays.empty()) {
    const auto at = degraded_at(amps, config.delays, config.degradation);
    auto out = open_output(config, "delays.txt");
    io::write_sweep(out, at);
    for (const auto& s : at.samples) {
      report << "tau_fs " << fs(s.tau) << " D " << io::format_double(s.d.real()) << ' '
             << io::format_double(s.d.imag()) << '\n';
    }
  }
  const auto w = diagonal_weights(amps);
  report << "alpha " << io::format_double(w.alpha) << '\n'
         << "beta " << io::format_double(w.beta) << '\n'
         << "samples " << sweep.samples.size() << '\n';
}

void run_tomo_simulate(const RunConfig& config, std::ostream& report) {
  const auto amps = make_amplitudes(config);
  const auto rho = model_state(config, amps, config.state_delay, config.degradation);

  CountModel model = config.counts;
  model.pair_rate = calibrate_pair_rate(rho, config.coincidence_rate);
  model.accidental_rate = model.gated_accidental_rate();
  const auto means = expected_rates(rho, model);
  const CountTable table =
      config.noiseless ? exact_counts(means, model) : sample_counts(means, config.seed, model);
  {
    auto out = open_output(config, "counts.txt");
    io::write_count_table(out, table);
  }
  {
    auto out = open_output(config, "model_rho.txt");
    io::write_density_matrix(out, rho.elements());
  }
  report << "pair_rate_hz " << io::format_double(model.pair_rate) << '\n'
         << "accidental_rate_hz " << io::format_double(model.accidental_rate) << '\n'
         << "car " << io::format_double(car(table)) << '\n';
}

void run_tomo_reconstruct(const RunConfig& config, std::ostream& report) {
  const auto& path = require_key(config.counts_file, "counts_file");
  auto in = open_input(path);
  const CountTable table = io::read_count_table(in, path);
  const auto corrected = subtract_accidentals(table);
  const MleResult mle = mle_reconstruct(corrected);

  std::optional<PolarizationDensityMatrix> reference;
  if (config.reference_rho_file) {
    auto ref_in = open_input(*config.reference_rho_file);
    reference.emplace(io::read_density_matrix(ref_in, *config.reference_rho_file));
  } else if (config.fidelity_reference != FidelityReference::None) {
    const auto amps = make_amplitudes(config);
    const DegradationModel degradation =
        config.fidelity_reference == FidelityReference::Offset ? config.degradation
                                                               : DegradationModel{};
    reference.emplace(model_state(config, amps, config.state_delay, degradation));
  }

  const auto metrics = compute_metrics(mle.rho, reference ? &*reference : nullptr, &table);
  {
    auto out = open_output(config, "rho.txt");
    io::write_density_matrix(out, mle.rho.elements());
  }
  {
    auto out = open_output(config, "metrics.txt");
    io::write_metrics(out, metrics);
  }
  report << "mle_iterations " << mle.iterations << '\n'
         << "visibility_HV " << io::format_double(visibility(corrected, VisibilityFamily::HV)) << '\n'
         << "visibility_DD " << io::format_double(visibility(corrected, VisibilityFamily::DD)) << '\n'
         << "visibility_RL " << io::format_double(visibility(corrected, VisibilityFamily::RL)) << '\n'
         << "purity " << percent(metrics.purity) << '\n'
         << "concurrence " << percent(metrics.concurrence) << '\n';
  if (metrics.fidelity_vs_reference) {
    report << "fidelity " << percent(*metrics.fidelity_vs_reference) << '\n';
  }
}

void run_metrics(const RunConfig& config, std::ostream& report) {
  const auto& path = require_key(config.rho_file, "rho_file");
  auto in = open_input(path);
  const PolarizationDensityMatrix rho(io::read_density_matrix(in, path));

  std::optional<PolarizationDensityMatrix> reference;
  if (config.reference_rho_file) {
    auto ref_in = open_input(*config.reference_rho_file);
    reference.emplace(io::read_density_matrix(ref_in, *config.reference_rho_file));
  }
  std::optional<CountTable> table;
  if (config.counts_file) {
    auto counts_in = open_input(*config.counts_file);
    table = io::read_count_table(counts_in, *config.counts_file);
  }
  const auto metrics =
      compute_metrics(rho, reference ? &*reference : nullptr, table ? &*table : nullptr);
  {
    auto out = open_output(config, "metrics.txt");
    io::write_metrics(out, metrics);
  }
  io::write_metrics(report, metrics);
}

void run_fit(const RunConfig& config, std::ostream& report) {
  const auto& path = require_key(config.observations_file, "observations_file");
  auto in = open_input(path);
  const auto observations = io::read_observations(in, path);
  if (observations.size() < 2) {
    fail(ErrorKind::Usage, path + ": fit needs at least two observation rows");
  }
  const auto amps = make_amplitudes(config);
  const auto sweep = delay_sweep(amps, config.tau_min, config.tau_max, config.tau_points);
  const auto fit = fit_degradation(sweep, observations);

  auto out = open_output(config, "fit.txt");
  for (std::ostream* s : {static_cast<std::ostream*>(&out), &report}) {
    *s << "scale " << io::format_double(fit.model.amplitude_scale) << '\n'
       << "offset_fs " << fs(fit.model.time_offset) << '\n'
       << "residual " << io::format_double(fit.residual) << '\n';
  }
  out << "# tau_fs re_residual im_residual\n";
  for (std::size_t k = 0; k < observations.size(); ++k) {
    out << fs(observations[k].tau) << ' ' << io::format_double(fit.residuals[k].real()) << ' '
        << io::format_double(fit.residuals[k].imag()) << '\n';
  }
}

}  // namespace polent::cli
