#include "polent/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polent/error.hpp"

namespace polent {

namespace {

Matrix4cd spin_flip(const Matrix4cd& rho) {
  Matrix4cd yy = Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  return yy * rho.conjugate() * yy;
}

// F with rho = F F^dagger; eigenvalues at rounding level are dropped.
Matrix4cd psd_factor(const Matrix4cd& rho) {
  const auto [values, vectors] = hermitian_eigen(rho);
  if (values(0) < -1e-10) fail(ErrorKind::InvalidState, "fidelity: matrix is not positive semidefinite");
  const double cutoff = 8.0 * std::numeric_limits<double>::epsilon() * std::max(values(3), 0.0);
  Vector4d root;
  for (int i = 0; i < 4; ++i) root(i) = values(i) > cutoff ? std::sqrt(values(i)) : 0.0;
  return vectors * root.asDiagonal();
}

}  // namespace

double purity(const PolarizationDensityMatrix& rho) {
  return (rho.elements() * rho.elements()).trace().real();
}

double concurrence(const PolarizationDensityMatrix& rho) {
  const Matrix4cd s = psd_sqrt(rho.elements());
  const Matrix4cd r = hermitian_part(s * spin_flip(rho.elements()) * s);
  Vector4d mu = hermitian_eigen(r).values;  // ascending
  for (int i = 0; i < 4; ++i) mu(i) = std::sqrt(std::max(mu(i), 0.0));
  return std::clamp(mu(3) - mu(2) - mu(1) - mu(0), 0.0, 1.0);
}

double fidelity(const PolarizationDensityMatrix& a, const PolarizationDensityMatrix& b) {
  // Tr sqrt(sqrt(a) b sqrt(a)) is the trace norm of A^dagger B
  const Matrix4cd overlap = psd_factor(a.elements()).adjoint() * psd_factor(b.elements());
  const double f = Eigen::JacobiSVD<Matrix4cd>(overlap).singularValues().sum();
  return std::clamp(f, 0.0, 1.0);
}

ExtractedD extract_d(const PolarizationDensityMatrix& rho) {
  const std::complex<double> d = rho(PolarizationDensityMatrix::VH, PolarizationDensityMatrix::HV);
  return {d, std::arg(d)};
}

double car(const CountTable& table) {
  double best = -1.0;
  for (const auto& r : {table.at(Basis::H, Basis::V), table.at(Basis::V, Basis::H)}) {
    if (r.accidentals > 0.0) best = std::max(best, static_cast<double>(r.coincidences) / r.accidentals);
  }
  if (best < 0.0) fail(ErrorKind::Domain, "car: cross-polarized records have zero accidentals");
  return best;
}

StateMetrics compute_metrics(const PolarizationDensityMatrix& rho,
                             const PolarizationDensityMatrix* reference,
                             const CountTable* counts) {
  StateMetrics m;
  m.purity = purity(rho);
  m.concurrence = concurrence(rho);
  if (reference) m.fidelity_vs_reference = fidelity(*reference, rho);
  const auto [d, phase] = extract_d(rho);
  m.d_extracted = d;
  m.phase = phase;
  if (counts) m.car = car(*counts);
  return m;
}

}  // namespace polent
