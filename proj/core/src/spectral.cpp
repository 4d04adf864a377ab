#include "polent/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polent/error.hpp"

namespace polent {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

void require_positive_frequency(double omega, const char* what) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    fail(ErrorKind::Domain, std::string(what) + ": angular frequency must be positive, got " +
                                std::to_string(omega));
  }
}

}  // namespace

std::vector<double> FrequencyAxis::values() const {
  std::vector<double> out(size);
  for (std::size_t k = 0; k < size; ++k) out[k] = at(k);
  return out;
}

FrequencyAxis FrequencyAxis::cell_centered(double omega_lo, double omega_hi, std::size_t n) {
  if (n == 0 || !(omega_hi > omega_lo)) {
    fail(ErrorKind::Domain, "cell_centered: empty frequency interval");
  }
  const double step = (omega_hi - omega_lo) / static_cast<double>(n);
  return {omega_lo + 0.5 * step, step, n};
}

bool FrequencyGrid::is_symmetric() const {
  return signal.origin == idler.origin && signal.step == idler.step &&
         signal.size == idler.size;
}

void FrequencyGrid::validate() const {
  for (const auto* axis : {&signal, &idler}) {
    if (axis->size < 2) fail(ErrorKind::Domain, "frequency grid needs at least 2 points per axis");
    if (!(axis->step > 0.0) || !std::isfinite(axis->step)) {
      fail(ErrorKind::Domain, "frequency grid step must be positive");
    }
    if (!(axis->origin > 0.0) || !std::isfinite(axis->origin)) {
      fail(ErrorKind::Domain, "frequency grid must lie at positive frequencies");
    }
  }
}

FrequencyGrid FrequencyGrid::wavelength_window(double center_m, double width_m, std::size_t n) {
  if (!(width_m > 0.0) || !(center_m - 0.5 * width_m > 0.0)) {
    fail(ErrorKind::Domain, "wavelength window must be positive and non-empty");
  }
  const double lo = wavelength_to_omega(center_m + 0.5 * width_m);
  const double hi = wavelength_to_omega(center_m - 0.5 * width_m);
  const auto axis = FrequencyAxis::cell_centered(lo, hi, n);
  return {axis, axis};
}

PdcModel PdcModel::calibrated(double group_index_signal, double crystal_length,
                              double intrinsic_delay) {
  PdcModel m;
  m.crystal_length = crystal_length;
  m.intrinsic_delay_comp = intrinsic_delay;
  m.group_index_signal = group_index_signal;
  const double split = 2.0 * kSpeedOfLight * intrinsic_delay / crystal_length;
  m.group_index_idler = group_index_signal + split;
  m.group_index_pump = group_index_signal + 0.5 * split;
  return m;
}

double PdcModel::pump_bandwidth_omega() const {
  return kTwoPi * kSpeedOfLight * pump_bandwidth_fwhm /
         (pump_center_wavelength * pump_center_wavelength);
}

double PdcModel::crystal_group_delay() const {
  return 0.5 * crystal_length * (group_index_idler - group_index_signal) / kSpeedOfLight;
}

void PdcModel::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      fail(ErrorKind::Domain, std::string("PdcModel: ") + name + " must be positive");
    }
  };
  positive(pump_center_wavelength, "pump_center_wavelength");
  positive(pump_bandwidth_fwhm, "pump_bandwidth_fwhm");
  positive(degeneracy_wavelength, "degeneracy_wavelength");
  positive(crystal_length, "crystal_length");
  for (double n : {group_index_signal, group_index_idler, group_index_pump}) {
    if (!(n >= 1.0) || !std::isfinite(n)) fail(ErrorKind::Domain, "PdcModel: group index < 1");
  }
  if (!std::isfinite(intrinsic_delay_comp)) {
    fail(ErrorKind::Domain, "PdcModel: intrinsic_delay_comp must be finite");
  }
}

double JsaGrid::norm() const { return amplitude.squaredNorm() * grid.cell_area(); }

std::complex<double> pump_envelope(const PdcModel& model, double omega_sum) {
  require_positive_frequency(omega_sum, "pump_envelope");
  // |E|^2 = exp(-4 ln2 x^2 / FWHM^2), so E carries half the exponent.
  const double x = (omega_sum - model.pump_center_omega()) / model.pump_bandwidth_omega();
  return {std::exp(-2.0 * std::numbers::ln2 * x * x), 0.0};
}

double phase_mismatch(const PdcModel& model, double omega_s, double omega_i) {
  const double w_deg = model.degeneracy_omega();
  const double w_p0 = model.pump_center_omega();
  return (model.group_index_pump * (omega_s + omega_i - w_p0) -
          model.group_index_signal * (omega_s - w_deg) -
          model.group_index_idler * (omega_i - w_deg)) /
         kSpeedOfLight;
}

std::complex<double> phase_matching(const PdcModel& model, double omega_s, double omega_i) {
  require_positive_frequency(omega_s, "phase_matching");
  require_positive_frequency(omega_i, "phase_matching");
  const double x = 0.5 * phase_mismatch(model, omega_s, omega_i) * model.crystal_length;
  return sinc(x) * std::polar(1.0, x);
}

JsaGrid build_jsa(const PdcModel& model, const FrequencyGrid& grid) {
  model.validate();
  grid.validate();

  const double coarsest = std::max(grid.signal.step, grid.idler.step);
  const double points_across = model.pump_bandwidth_omega() / coarsest;
  if (points_across < 8.0) {
    fail(ErrorKind::Resolution, "grid too coarse: " + std::to_string(points_across) +
                                    " points across the pump bandwidth (need >= 8)");
  }

  JsaGrid jsa{grid, ComplexGrid(grid.n_s(), grid.n_i()), 0.0};
  for (std::size_t j = 0; j < grid.n_s(); ++j) {
    const double ws = grid.signal.at(j);
    for (std::size_t k = 0; k < grid.n_i(); ++k) {
      const double wi = grid.idler.at(k);
      jsa.amplitude(j, k) = pump_envelope(model, ws + wi) * phase_matching(model, ws, wi);
    }
  }
  normalize(jsa);
  return jsa;
}

JsaGrid apply_bandpass(const JsaGrid& jsa, double center_wavelength, double width) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    fail(ErrorKind::Domain, "apply_bandpass: width must be positive");
  }
  const double lambda_lo = center_wavelength - 0.5 * width;
  const double lambda_hi = center_wavelength + 0.5 * width;
  const auto inside = [&](double omega) {
    const double lambda = omega_to_wavelength(omega);
    return lambda >= lambda_lo && lambda <= lambda_hi;
  };

  std::vector<char> keep_s(jsa.grid.n_s()), keep_i(jsa.grid.n_i());
  for (std::size_t j = 0; j < keep_s.size(); ++j) keep_s[j] = inside(jsa.grid.signal.at(j));
  for (std::size_t k = 0; k < keep_i.size(); ++k) keep_i[k] = inside(jsa.grid.idler.at(k));

  JsaGrid out = jsa;
  double removed = 0.0;
  for (std::size_t j = 0; j < keep_s.size(); ++j) {
    for (std::size_t k = 0; k < keep_i.size(); ++k) {
      if (keep_s[j] && keep_i[k]) continue;
      removed += std::norm(out.amplitude(j, k));
      out.amplitude(j, k) = 0.0;
    }
  }
  const double total = jsa.amplitude.squaredNorm();
  out.discarded_norm = total > 0.0 ? removed / total : 0.0;
  if (out.amplitude.squaredNorm() == 0.0) {
    fail(ErrorKind::EmptySupport, "band-pass window leaves no JSA support on the grid");
  }
  if (removed > 0.0) normalize(out);
  return out;
}

void normalize(JsaGrid& jsa) {
  const double n = jsa.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    fail(ErrorKind::EmptySupport, "cannot normalize a JSA with zero norm");
  }
  jsa.amplitude /= std::sqrt(n);
}

}  // namespace polent
