#include "polent/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polent/error.hpp"

namespace polent {

HermitianEigen hermitian_eigen(const Matrix4cd& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4cd> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::InvalidState, "Hermitian eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix4cd psd_sqrt(const Matrix4cd& m, double clamp) {
  auto [values, vectors] = hermitian_eigen(m);
  if (values.minCoeff() < -clamp) {
    fail(ErrorKind::InvalidState,
         "matrix square root of a non-PSD matrix (min eigenvalue " +
             std::to_string(values.minCoeff()) + ")");
  }
  Vector4d roots = values.cwiseMax(0.0).cwiseSqrt();
  return vectors * roots.cast<cd>().asDiagonal() * vectors.adjoint();
}

double hermiticity_error(const Matrix4cd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Matrix4cd hermitian_part(const Matrix4cd& m) { return 0.5 * (m + m.adjoint()); }

Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

}  // namespace polent
