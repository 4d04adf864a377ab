#pragma once

#include <complex>
#include <optional>

#include "polent/jointstate.hpp"
#include "polent/tomography.hpp"

namespace polent {

struct StateMetrics {
  double purity = 0.0;
  double concurrence = 0.0;
  std::optional<double> fidelity_vs_reference;
  std::complex<double> d_extracted;
  double phase = 0.0;
  std::optional<double> car;
};

double purity(const PolarizationDensityMatrix& rho);

/// Wootters concurrence.
double concurrence(const PolarizationDensityMatrix& rho);

/// Uhlmann fidelity Tr sqrt(sqrt(a) b sqrt(a)) (not squared).
double fidelity(const PolarizationDensityMatrix& a, const PolarizationDensityMatrix& b);

struct ExtractedD {
  std::complex<double> d;  ///< <VH|rho|HV>
  double phase;            ///< principal value in (-pi, pi]
};

ExtractedD extract_d(const PolarizationDensityMatrix& rho);

/// Largest coincidences/accidentals over the (H,V) and (V,H) records.
double car(const CountTable& table);

StateMetrics compute_metrics(const PolarizationDensityMatrix& rho,
                             const PolarizationDensityMatrix* reference = nullptr,
                             const CountTable* counts = nullptr);

}  // namespace polent
