#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "polent/constants.hpp"
#include "polent/linalg.hpp"

namespace polent {

/// Uniform angular-frequency axis, omega_k = origin + k * step.
struct FrequencyAxis {
  double origin{};  ///< rad/s, first sample
  double step{};    ///< rad/s, > 0
  std::size_t size{};

  double at(std::size_t k) const { return origin + static_cast<double>(k) * step; }
  double back() const { return at(size - 1); }
  std::vector<double> values() const;

  /// Midpoint sampling of [omega_lo, omega_hi] with n cells.
  static FrequencyAxis cell_centered(double omega_lo, double omega_hi, std::size_t n);
};

/// Signal x idler sampling grid. Axes are uniform and strictly increasing by
/// construction; validate() checks the size and step requirements.
struct FrequencyGrid {
  FrequencyAxis signal;
  FrequencyAxis idler;

  std::size_t n_s() const { return signal.size; }
  std::size_t n_i() const { return idler.size; }
  double cell_area() const { return signal.step * idler.step; }

  /// True when both axes carry bit-identical samples, so that the swapped
  /// evaluation h(omega'', omega') is a transpose.
  bool is_symmetric() const;

  void validate() const;

  /// n x n cell-centred grid covering the wavelength window
  /// [center - width/2, center + width/2] on both axes.
  static FrequencyGrid wavelength_window(double center_m, double width_m, std::size_t n);
};

/// Type-II PDC source parameters. Lengths in metres, times in seconds.
struct PdcModel {
  double pump_center_wavelength = 767.6 * kNano;
  double pump_bandwidth_fwhm = 0.8 * kNano;  ///< intensity FWHM in wavelength
  double degeneracy_wavelength = 1535.2 * kNano;
  double crystal_length = 1.87e-3;
  double group_index_signal = 3.3;
  double group_index_idler = 3.3 + 2.0 * kSpeedOfLight * 25.9 * kFemto / 1.87e-3;
  double group_index_pump = 3.3 + kSpeedOfLight * 25.9 * kFemto / 1.87e-3;
  double intrinsic_delay_comp = 25.9 * kFemto;

  /// Defaults with the idler/pump group indices recomputed so that the
  /// crystal-average group delay equals intrinsic_delay_comp.
  static PdcModel calibrated(double group_index_signal, double crystal_length,
                             double intrinsic_delay);

  double pump_center_omega() const { return wavelength_to_omega(pump_center_wavelength); }
  double degeneracy_omega() const { return wavelength_to_omega(degeneracy_wavelength); }
  /// Pump intensity FWHM converted to rad/s at the pump centre.
  double pump_bandwidth_omega() const;
  /// (L/2)(n_g,i - n_g,s)/c: delay at which the exchange phase is cancelled.
  double crystal_group_delay() const;

  void validate() const;
};

/// Normalized joint spectral amplitude on a grid.
struct JsaGrid {
  FrequencyGrid grid;
  ComplexGrid amplitude;  ///< (rad/s)^-1, rows = signal, cols = idler
  /// Fraction of the input norm removed by the last filtering step.
  double discarded_norm = 0.0;

  /// Riemann sum of |f|^2 over the grid.
  double norm() const;
};

std::complex<double> pump_envelope(const PdcModel& model, double omega_sum);

std::complex<double> phase_matching(const PdcModel& model, double omega_s, double omega_i);

/// Unnormalized Delta k of the first-order expansion (1/m).
double phase_mismatch(const PdcModel& model, double omega_s, double omega_i);

JsaGrid build_jsa(const PdcModel& model, const FrequencyGrid& grid);

/// Ideal top-hat band-pass in wavelength applied to both photons.
JsaGrid apply_bandpass(const JsaGrid& jsa, double center_wavelength = 1535.2 * kNano,
                       double width = 40.0 * kNano);

/// Rescales the amplitude so that norm() == 1. Throws EmptySupport on a zero field.
void normalize(JsaGrid& jsa);

}  // namespace polent
