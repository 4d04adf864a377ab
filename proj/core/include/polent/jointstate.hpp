#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "polent/dichroic.hpp"
#include "polent/linalg.hpp"
#include "polent/spectral.hpp"

namespace polent {

/// Cross-path amplitudes left after post-selection on one photon per path.
///   g: signal (H) in path A, idler (V) in path B
///   h: signal (H) in path B, idler (V) in path A
struct PostSelectedAmplitudes {
  FrequencyGrid grid;
  ComplexGrid g;
  ComplexGrid h;
  double norm_constant = 0.0;  ///< (sum |g|^2 + |h|^2) dw dw
  /// Same-path (both transmitted / both reflected) fraction of the input JSA.
  double neglected_norm = 0.0;

  /// Builds the record from raw amplitudes and computes norm_constant.
  static PostSelectedAmplitudes from_amplitudes(FrequencyGrid grid, ComplexGrid g,
                                                ComplexGrid h);
};

/// 4x4 polarization state over (HH, HV, VH, VV), first letter = path A.
class PolarizationDensityMatrix {
 public:
  static constexpr int HH = 0;
  static constexpr int HV = 1;
  static constexpr int VH = 2;
  static constexpr int VV = 3;

  /// Validates Hermiticity (1e-12), unit trace (1e-12) and PSD (-1e-10).
  explicit PolarizationDensityMatrix(const Matrix4cd& elements);

  /// Skips validation; for intermediate estimates that may be nonphysical.
  static PolarizationDensityMatrix unchecked(const Matrix4cd& elements);

  const Matrix4cd& elements() const { return rho_; }
  cd operator()(int row, int col) const { return rho_(row, col); }

  struct Check {
    double hermiticity;
    double trace_error;
    double min_eigenvalue;
    bool ok() const;
  };
  Check check() const;

 private:
  struct NoCheck {};
  PolarizationDensityMatrix(const Matrix4cd& elements, NoCheck) : rho_(elements) {}
  Matrix4cd rho_;
};

struct DelaySample {
  double tau;  ///< s
  std::complex<double> d;
  double alpha;
  double beta;
  double purity;
  double phase;  ///< unwrapped arg(D)
};

struct DelaySweep {
  std::vector<DelaySample> samples;
};

/// Empirical correction D_deg(tau) = amplitude_scale * D(tau - time_offset).
struct DegradationModel {
  double amplitude_scale = 1.0;
  double time_offset = 0.0;  ///< s

  void validate() const;
};

struct DegradedSweep {
  DelaySweep sweep;
  std::optional<std::string> coverage_warning;
};

struct Weights {
  double alpha;
  double beta;
};

struct DelayObservation {
  double tau;  ///< s
  std::complex<double> d;
};

struct DegradationFit {
  DegradationModel model;
  double residual = 0.0;  ///< sum of |model - observed|^2
  std::vector<std::complex<double>> residuals;  ///< model - observed, per point
};

PostSelectedAmplitudes post_select(const JsaGrid& jsa, const SplitterResponse& splitter);

Weights diagonal_weights(const PostSelectedAmplitudes& amps);

/// Exchange-overlap integrand h(omega'', omega') conj(g(omega', omega'')) with
/// its delay phase factored by frequency lag, so that D(tau) is an O(n) sum.
class CoherenceKernel {
 public:
  explicit CoherenceKernel(const PostSelectedAmplitudes& amps);

  std::complex<double> operator()(double tau) const;

 private:
  // Equal-step axes: weights per lag, omega' - omega'' = base + m * step.
  std::vector<std::complex<double>> lag_weights_;
  double lag_base_ = 0.0;
  double lag_step_ = 0.0;
  // General axes: separable evaluation over the full product.
  ComplexGrid product_;
  std::vector<double> signal_offsets_;
  std::vector<double> idler_offsets_;
  double offset_base_ = 0.0;
  bool lagged_ = false;
  double scale_ = 0.0;  ///< dw dw / N
};

std::complex<double> d_parameter(const PostSelectedAmplitudes& amps, double tau);

PolarizationDensityMatrix density_matrix(double alpha, double beta, std::complex<double> d);

DelaySweep delay_sweep(const PostSelectedAmplitudes& amps, double tau_min, double tau_max,
                       std::size_t n);

/// Sweep at an explicit, strictly increasing list of delays.
DelaySweep delay_sweep_at(const PostSelectedAmplitudes& amps, const std::vector<double>& taus);

DegradedSweep apply_degradation(const DelaySweep& sweep, const DegradationModel& model);

DegradationFit fit_degradation(const DelaySweep& sweep,
                               const std::vector<DelayObservation>& observations);

/// Linear interpolation of D in the complex plane; zero outside the sweep.
std::complex<double> interpolate_d(const DelaySweep& sweep, double tau);

/// Nearest-branch unwrapping anchored at the sample of largest |D|.
void unwrap_phases(DelaySweep& sweep);

/// Splits the H and V edges symmetrically about `center` (edge_H = center -
/// delta/2, edge_V = center + delta/2) so that diagonal_weights().alpha hits
/// `target_alpha`. Returns the adjusted splitter.
SplitterResponse calibrate_edge_split(const JsaGrid& jsa, const SplitterResponse& base,
                                      double target_alpha, double center = 1535.2 * kNano);

}  // namespace polent
