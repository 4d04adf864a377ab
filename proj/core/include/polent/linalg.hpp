#pragma once

#include <complex>

#include <Eigen/Dense>

namespace polent {

using cd = std::complex<double>;
using Matrix4cd = Eigen::Matrix4cd;
using Vector4d = Eigen::Vector4d;

/// Row-major so that the flat storage order is signal-major.
using ComplexGrid = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Spectral decomposition of a Hermitian matrix; eigenvalues ascending.
struct HermitianEigen {
  Vector4d values;
  Matrix4cd vectors;
};

HermitianEigen hermitian_eigen(const Matrix4cd& m);

/// Principal square root of a PSD Hermitian matrix. Eigenvalues in
/// [-clamp, 0) are treated as zero; anything more negative is rejected
/// with ErrorKind::InvalidState.
Matrix4cd psd_sqrt(const Matrix4cd& m, double clamp = 1e-10);

double hermiticity_error(const Matrix4cd& m);

/// (A + A^dagger) / 2.
Matrix4cd hermitian_part(const Matrix4cd& m);

Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b);

}  // namespace polent
