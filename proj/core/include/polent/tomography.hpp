#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polent/error.hpp"
#include "polent/jointstate.hpp"
#include "polent/linalg.hpp"

namespace polent {

enum class Basis { H, V, Dp, Dm, R, L };

inline constexpr std::array<Basis, 6> kAllBases{Basis::H,  Basis::V, Basis::Dp,
                                                Basis::Dm, Basis::R, Basis::L};
inline constexpr std::size_t kProjectionCount = 36;

/// Projection index in the canonical A-major ordering of kAllBases pairs.
constexpr std::size_t projection_index(Basis a, Basis b) {
  return static_cast<std::size_t>(a) * 6 + static_cast<std::size_t>(b);
}

/// Display label: H, V, D+, D-, R, L.
std::string_view label(Basis b);
/// File token: H, V, Dp, Dm, R, L.
std::string_view token(Basis b);
std::optional<Basis> parse_basis(std::string_view text);

Eigen::Vector2cd ket(Basis b);

Matrix4cd projector(Basis a, Basis b);

using ProjectionValues = std::array<double, kProjectionCount>;

struct CountRecord {
  Basis basis_a = Basis::H;
  Basis basis_b = Basis::H;
  std::uint64_t coincidences = 0;
  std::uint64_t singles_a = 0;
  std::uint64_t singles_b = 0;
  double accidentals = 0.0;
};

/// The 36 records, stored in projection_index order.
struct CountTable {
  std::array<CountRecord, kProjectionCount> records;
  double acquisition_time = 120.0;  ///< s
  double gate_rate = 1.9e6;         ///< Hz

  const CountRecord& at(Basis a, Basis b) const { return records[projection_index(a, b)]; }
  CountRecord& at(Basis a, Basis b) { return records[projection_index(a, b)]; }
};

/// Rates behind a simulated acquisition.
struct CountModel {
  double pair_rate = 0.0;        ///< Hz, multiplies Tr(P rho)
  double accidental_rate = 0.0;  ///< Hz per projection
  double acquisition_time = 120.0;
  double singles_rate_a = 870.0;  ///< Hz
  double singles_rate_b = 870.0;
  double gate_rate = 1.9e6;

  /// Accidental rate implied by the singles and gate rate.
  double gated_accidental_rate() const;
};

/// Pair rate that puts the larger of the (H,V)/(V,H) signal rates at `target`.
double calibrate_pair_rate(const PolarizationDensityMatrix& rho, double target_rate = 4.0);

/// rho' = (1 - 4b) rho + b I.
PolarizationDensityMatrix add_background(const PolarizationDensityMatrix& rho, double b);

ProjectionValues expected_rates(const PolarizationDensityMatrix& rho, const CountModel& model);

/// Poisson draws with a generator seeded from `seed` and owned by the call.
CountTable sample_counts(const ProjectionValues& means, std::uint64_t seed,
                         const CountModel& model);

/// Counts set to the means (no shot noise), singles at their expected values.
CountTable exact_counts(const ProjectionValues& means, const CountModel& model);

double estimate_accidentals(const CountRecord& record, double gate_rate, double acquisition_time);

/// Fills every record's accidentals from its singles.
void estimate_accidentals(CountTable& table);

ProjectionValues subtract_accidentals(const CountTable& table);

struct LinearEstimate {
  Matrix4cd rho;  ///< Hermitian, unit trace, possibly not PSD
  double min_eigenvalue = 0.0;
  bool nonphysical = false;
};

/// 36 x 16 design matrix of Tr(P_nu B_k) over a Hermitian basis B_k.
Eigen::MatrixXd design_matrix();

LinearEstimate linear_inversion(const ProjectionValues& corrected);

/// Clamps eigenvalues below `floor` and renormalizes.
Matrix4cd project_to_physical(const Matrix4cd& m, double floor = 1e-6);

struct MleOptions {
  int max_iterations = 10'000;
  double relative_tolerance = 1e-10;
};

struct MleResult {
  PolarizationDensityMatrix rho;
  double intensity = 0.0;
  double objective = 0.0;
  int iterations = 0;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, MleResult best)
      : Error(ErrorKind::Convergence, message), best_(std::move(best)) {}
  const MleResult& best_iterate() const { return best_; }

 private:
  MleResult best_;
};

/// Lower-triangular T with real diagonal <-> 16 reals; rho = T^dagger T / Tr.
Matrix4cd rho_from_parameters(const Eigen::Matrix<double, 16, 1>& t);
Eigen::Matrix<double, 16, 1> parameters_from_rho(const Matrix4cd& rho);

/// Weighted least-squares likelihood sum (I p - n)^2 / (2 max(I p, 1)).
double mle_objective(const Matrix4cd& rho, double intensity, const ProjectionValues& counts);

MleResult mle_reconstruct(const ProjectionValues& corrected,
                          const std::optional<Matrix4cd>& init = std::nullopt,
                          const MleOptions& options = {});

enum class VisibilityFamily { HV, DD, RL };

double visibility(const ProjectionValues& values, VisibilityFamily family);

}  // namespace polent
