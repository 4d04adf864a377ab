#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polent/constants.hpp"
#include "polent/spectral.hpp"

namespace polent {

enum class Polarization { H, V };

/// Which side of the edge is transmitted.
enum class EdgeSense { LongPass, ShortPass };

enum class EdgeShape { Logistic, Erf };

/// Measured transmission T(lambda) for one polarization, linearly
/// interpolated and held constant beyond the table ends.
struct TabulatedTransmission {
  std::vector<double> wavelength;  ///< m, strictly increasing
  std::vector<double> transmission;

  double operator()(double wavelength_m) const;
  void validate() const;
};

/// Dichroic mirror as a polarization-dependent, real, lossless splitter.
struct SplitterResponse {
  double edge_wavelength_h = 1535.2 * kNano;  ///< 50 % point for H
  double edge_wavelength_v = 1535.2 * kNano;  ///< 50 % point for V
  double step_width = 7.0 * kNano;            ///< 10 %-90 % transition width
  EdgeSense sense = EdgeSense::LongPass;
  EdgeShape shape = EdgeShape::Logistic;
  /// When present these replace the analytic edge for that polarization.
  std::optional<TabulatedTransmission> table_h;
  std::optional<TabulatedTransmission> table_v;

  void validate() const;
};

struct EdgeValue {
  double T;
  double R;
};

EdgeValue edge_response(const SplitterResponse& resp, double omega, Polarization pol);

/// T/R sampled along the axes used by post-selection: H on the signal axis,
/// V on the idler axis.
struct SampledSplitter {
  std::vector<double> t_h;  ///< signal axis
  std::vector<double> r_h;
  std::vector<double> t_v;  ///< idler axis
  std::vector<double> r_v;
};

SampledSplitter sample_on_grid(const SplitterResponse& resp, const FrequencyGrid& grid);

/// Two-column `lambda_nm T` table reader.
TabulatedTransmission read_transmission_table(const std::string& path);

}  // namespace polent
