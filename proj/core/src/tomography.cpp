#include "polent/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "polent/error.hpp"

namespace polent {

namespace {

using Params = Eigen::Matrix<double, 16, 1>;
using FullParams = Eigen::Matrix<double, 17, 1>;

const std::array<Matrix4cd, kProjectionCount>& projector_table() {
  static const auto table = [] {
    std::array<Matrix4cd, kProjectionCount> t;
    for (Basis a : kAllBases)
      for (Basis b : kAllBases) t[projection_index(a, b)] = projector(a, b);
    return t;
  }();
  return table;
}

// Real basis of 4x4 Hermitian matrices: E_ii, E_ij + E_ji, -i E_ij + i E_ji.
const std::array<Matrix4cd, 16>& hermitian_basis() {
  static const auto basis = [] {
    std::array<Matrix4cd, 16> b;
    int n = 0;
    for (int i = 0; i < 4; ++i) {
      b[n] = Matrix4cd::Zero();
      b[n++](i, i) = 1.0;
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        b[n] = Matrix4cd::Zero();
        b[n](i, j) = 1.0;
        b[n++](j, i) = 1.0;
        b[n] = Matrix4cd::Zero();
        b[n](i, j) = cd(0.0, -1.0);
        b[n++](j, i) = cd(0.0, 1.0);
      }
    }
    return b;
  }();
  return basis;
}

// Strictly lower entries of T in parameter order (after the 4 diagonal reals).
constexpr std::array<std::pair<int, int>, 6> kLowerEntries{
    {{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}}};

Matrix4cd t_from_parameters(const Params& t) {
  Matrix4cd m = Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) m(i, i) = t(i);
  for (std::size_t e = 0; e < kLowerEntries.size(); ++e) {
    const auto [i, j] = kLowerEntries[e];
    m(i, j) = cd(t(4 + 2 * e), t(5 + 2 * e));
  }
  return m;
}

double residual_weight(double model) { return std::sqrt(2.0 * std::max(model, 1.0)); }

struct Evaluation {
  Eigen::Matrix<double, 36, 1> residuals;
  Eigen::Matrix<double, 36, 17> jacobian;
  double objective = 0.0;
};

Evaluation evaluate(const FullParams& theta, const ProjectionValues& counts, bool with_jacobian) {
  const Params t = theta.head<16>();
  const double intensity = std::exp(theta(16));
  const Matrix4cd T = t_from_parameters(t);
  const Matrix4cd A = T.adjoint() * T;
  const double s = A.trace().real();
  const Matrix4cd Tdag = T.adjoint();
  const auto& projectors = projector_table();

  Evaluation ev;
  for (std::size_t nu = 0; nu < kProjectionCount; ++nu) {
    const double p = (projectors[nu] * A).trace().real() / s;
    const double m = intensity * p;
    const double n = counts[nu];
    ev.residuals(nu) = (m - n) / residual_weight(m);
    if (!with_jacobian) continue;

    const double dr_dm = m > 1.0 ? (m + n) / std::pow(2.0 * m, 1.5) : 1.0 / std::sqrt(2.0);
    // dp = Re Tr(G dA), G = (P - p I)/s, dA = dT^dag T + T^dag dT
    const Matrix4cd GT = ((projectors[nu] - p * Matrix4cd::Identity()) / s) * Tdag;
    for (int i = 0; i < 4; ++i) ev.jacobian(nu, i) = dr_dm * intensity * 2.0 * GT(i, i).real();
    for (std::size_t e = 0; e < kLowerEntries.size(); ++e) {
      const auto [i, j] = kLowerEntries[e];
      const cd z = GT(j, i);
      ev.jacobian(nu, 4 + 2 * e) = dr_dm * intensity * 2.0 * z.real();
      ev.jacobian(nu, 5 + 2 * e) = dr_dm * intensity * -2.0 * z.imag();
    }
    ev.jacobian(nu, 16) = dr_dm * m;
  }
  ev.objective = ev.residuals.squaredNorm();
  return ev;
}

PolarizationDensityMatrix finalize(const Matrix4cd& rho) {
  Matrix4cd h = hermitian_part(rho);
  h /= h.trace().real();
  return PolarizationDensityMatrix(h);
}

}  // namespace

std::string_view label(Basis b) {
  switch (b) {
    case Basis::H: return "H";
    case Basis::V: return "V";
    case Basis::Dp: return "D+";
    case Basis::Dm: return "D-";
    case Basis::R: return "R";
    case Basis::L: return "L";
  }
  return "?";
}

std::string_view token(Basis b) {
  switch (b) {
    case Basis::Dp: return "Dp";
    case Basis::Dm: return "Dm";
    default: return label(b);
  }
}

std::optional<Basis> parse_basis(std::string_view text) {
  for (Basis b : kAllBases) {
    if (text == token(b) || text == label(b)) return b;
  }
  return std::nullopt;
}

Eigen::Vector2cd ket(Basis b) {
  const double r = std::numbers::sqrt2 / 2.0;
  switch (b) {
    case Basis::H: return {1.0, 0.0};
    case Basis::V: return {0.0, 1.0};
    case Basis::Dp: return {r, r};
    case Basis::Dm: return {r, -r};
    case Basis::R: return {cd(r, 0.0), cd(0.0, r)};
    case Basis::L: return {cd(r, 0.0), cd(0.0, -r)};
  }
  fail(ErrorKind::Domain, "unknown basis label");
}

Matrix4cd projector(Basis a, Basis b) {
  const Eigen::Vector2cd ka = ket(a), kb = ket(b);
  return kron(ka * ka.adjoint(), kb * kb.adjoint());
}

double CountModel::gated_accidental_rate() const {
  return singles_rate_a * singles_rate_b / gate_rate;
}

double calibrate_pair_rate(const PolarizationDensityMatrix& rho, double target_rate) {
  const auto& P = projector_table();
  const double hv = (P[projection_index(Basis::H, Basis::V)] * rho.elements()).trace().real();
  const double vh = (P[projection_index(Basis::V, Basis::H)] * rho.elements()).trace().real();
  const double peak = std::max(hv, vh);
  if (!(peak > 0.0)) fail(ErrorKind::Domain, "state has no (H,V)/(V,H) population");
  return target_rate / peak;
}

PolarizationDensityMatrix add_background(const PolarizationDensityMatrix& rho, double b) {
  if (!(b >= 0.0 && b <= 0.25)) fail(ErrorKind::Domain, "background must lie in [0, 1/4]");
  return PolarizationDensityMatrix((1.0 - 4.0 * b) * rho.elements() + b * Matrix4cd::Identity());
}

ProjectionValues expected_rates(const PolarizationDensityMatrix& rho, const CountModel& model) {
  if (model.pair_rate < 0.0 || model.accidental_rate < 0.0 || model.acquisition_time < 0.0) {
    fail(ErrorKind::Domain, "expected_rates: rates must be non-negative");
  }
  const auto& P = projector_table();
  ProjectionValues means{};
  for (std::size_t nu = 0; nu < kProjectionCount; ++nu) {
    const double p = std::max(0.0, (P[nu] * rho.elements()).trace().real());
    means[nu] = model.acquisition_time * (model.pair_rate * p + model.accidental_rate);
  }
  return means;
}

namespace {

CountTable table_skeleton(const CountModel& model) {
  CountTable table;
  table.acquisition_time = model.acquisition_time;
  table.gate_rate = model.gate_rate;
  for (Basis a : kAllBases) {
    for (Basis b : kAllBases) {
      auto& r = table.at(a, b);
      r.basis_a = a;
      r.basis_b = b;
    }
  }
  return table;
}

}  // namespace

CountTable sample_counts(const ProjectionValues& means, std::uint64_t seed,
                         const CountModel& model) {
  std::mt19937_64 rng(seed);
  const auto draw = [&rng](double mean) -> std::uint64_t {
    if (!(mean >= 0.0)) fail(ErrorKind::Domain, "sample_counts: negative mean");
    if (mean == 0.0) return 0;
    return std::poisson_distribution<std::uint64_t>(mean)(rng);
  };
  CountTable table = table_skeleton(model);
  for (std::size_t nu = 0; nu < kProjectionCount; ++nu) {
    auto& r = table.records[nu];
    r.coincidences = draw(means[nu]);
    r.singles_a = draw(model.singles_rate_a * model.acquisition_time);
    r.singles_b = draw(model.singles_rate_b * model.acquisition_time);
  }
  estimate_accidentals(table);
  return table;
}

CountTable exact_counts(const ProjectionValues& means, const CountModel& model) {
  const auto round = [](double x) { return static_cast<std::uint64_t>(std::llround(std::max(0.0, x))); };
  CountTable table = table_skeleton(model);
  for (std::size_t nu = 0; nu < kProjectionCount; ++nu) {
    auto& r = table.records[nu];
    r.coincidences = round(means[nu]);
    r.singles_a = round(model.singles_rate_a * model.acquisition_time);
    r.singles_b = round(model.singles_rate_b * model.acquisition_time);
  }
  estimate_accidentals(table);
  return table;
}

double estimate_accidentals(const CountRecord& record, double gate_rate, double acquisition_time) {
  if (!(gate_rate > 0.0) || !(acquisition_time > 0.0)) {
    fail(ErrorKind::Domain, "estimate_accidentals: gate rate and acquisition time must be positive");
  }
  return static_cast<double>(record.singles_a) * static_cast<double>(record.singles_b) /
         (gate_rate * acquisition_time);
}

void estimate_accidentals(CountTable& table) {
  for (auto& r : table.records) {
    r.accidentals = estimate_accidentals(r, table.gate_rate, table.acquisition_time);
  }
}

ProjectionValues subtract_accidentals(const CountTable& table) {
  ProjectionValues out{};
  for (std::size_t nu = 0; nu < kProjectionCount; ++nu) {
    const auto& r = table.records[nu];
    out[nu] = std::max(0.0, static_cast<double>(r.coincidences) - r.accidentals);
  }
  return out;
}

Eigen::MatrixXd design_matrix() {
  const auto& P = projector_table();
  const auto& B = hermitian_basis();
  Eigen::MatrixXd a(36, 16);
  for (std::size_t nu = 0; nu < kProjectionCount; ++nu)
    for (std::size_t k = 0; k < B.size(); ++k)
      a(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(k)) = (P[nu] * B[k]).trace().real();
  return a;
}

LinearEstimate linear_inversion(const ProjectionValues& corrected) {
  static const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design_matrix());
  // The fixed 36-projection set is tomographically complete.
  if (qr.rank() != 16) fail(ErrorKind::InvalidState, "singular tomography design matrix");

  Eigen::VectorXd n(36);
  for (std::size_t nu = 0; nu < kProjectionCount; ++nu) n(static_cast<Eigen::Index>(nu)) = corrected[nu];
  const Eigen::VectorXd x = qr.solve(n);

  const auto& B = hermitian_basis();
  Matrix4cd X = Matrix4cd::Zero();
  for (std::size_t k = 0; k < B.size(); ++k) X += x(static_cast<Eigen::Index>(k)) * B[k];
  const double trace = X.trace().real();
  if (!(trace > 0.0)) fail(ErrorKind::Domain, "linear_inversion: counts carry no intensity");

  LinearEstimate est;
  est.rho = hermitian_part(X / trace);
  est.min_eigenvalue = hermitian_eigen(est.rho).values.minCoeff();
  est.nonphysical = est.min_eigenvalue < 0.0;
  return est;
}

Matrix4cd project_to_physical(const Matrix4cd& m, double floor) {
  auto [values, vectors] = hermitian_eigen(m);
  values = values.cwiseMax(floor);
  Matrix4cd out = vectors * values.cast<cd>().asDiagonal() * vectors.adjoint();
  return hermitian_part(out / out.trace().real());
}

Matrix4cd rho_from_parameters(const Params& t) {
  const Matrix4cd T = t_from_parameters(t);
  const Matrix4cd A = T.adjoint() * T;
  return A / A.trace().real();
}

Params parameters_from_rho(const Matrix4cd& rho) {
  // Reversing the basis turns rho = T^dag T (T lower) into a standard Cholesky
  // factorisation J rho J = L L^dag with T = (J L J)^dag.
  Matrix4cd J = Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) J(i, 3 - i) = 1.0;
  Eigen::LLT<Matrix4cd> llt(hermitian_part(J * rho * J));
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::InvalidState, "parameters_from_rho: matrix is not positive definite");
  }
  const Matrix4cd L = llt.matrixL();
  const Matrix4cd T = (J * L * J).adjoint();
  Params t;
  for (int i = 0; i < 4; ++i) t(i) = T(i, i).real();
  for (std::size_t e = 0; e < kLowerEntries.size(); ++e) {
    const auto [i, j] = kLowerEntries[e];
    t(4 + 2 * e) = T(i, j).real();
    t(5 + 2 * e) = T(i, j).imag();
  }
  return t;
}

double mle_objective(const Matrix4cd& rho, double intensity, const ProjectionValues& counts) {
  const auto& P = projector_table();
  double sum = 0.0;
  for (std::size_t nu = 0; nu < kProjectionCount; ++nu) {
    const double m = intensity * (P[nu] * rho).trace().real();
    const double n = std::max(0.0, counts[nu]);
    sum += (m - n) * (m - n) / (2.0 * std::max(m, 1.0));
  }
  return sum;
}

MleResult mle_reconstruct(const ProjectionValues& corrected, const std::optional<Matrix4cd>& init,
                          const MleOptions& options) {
  ProjectionValues counts{};
  double total = 0.0;
  for (std::size_t nu = 0; nu < kProjectionCount; ++nu) {
    counts[nu] = std::max(0.0, corrected[nu]);
    total += counts[nu];
  }
  if (!(total > 0.0)) fail(ErrorKind::Domain, "mle_reconstruct: no positive counts");

  const Matrix4cd start = project_to_physical(init ? *init : linear_inversion(counts).rho);
  FullParams theta;
  theta.head<16>() = parameters_from_rho(start);
  {
    const auto& P = projector_table();
    double predicted = 0.0;
    for (std::size_t nu = 0; nu < kProjectionCount; ++nu) predicted += (P[nu] * start).trace().real();
    theta(16) = std::log(total / predicted);
  }

  const auto to_result = [](const FullParams& th, double objective, int iterations) {
    return MleResult{finalize(rho_from_parameters(th.head<16>())), std::exp(th(16)), objective,
                     iterations};
  };

  Evaluation current = evaluate(theta, counts, true);
  double lambda = 1e-3;
  constexpr double kLambdaMax = 1e16;
  constexpr double kObjectiveFloor = 1e-20;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    if (current.objective < kObjectiveFloor) return to_result(theta, current.objective, iter - 1);

    const Eigen::Matrix<double, 17, 17> H = current.jacobian.transpose() * current.jacobian;
    const Eigen::Matrix<double, 17, 1> grad = current.jacobian.transpose() * current.residuals;

    bool accepted = false;
    while (!accepted) {
      Eigen::Matrix<double, 17, 17> damped = H;
      for (int i = 0; i < 17; ++i) damped(i, i) += lambda * (H(i, i) + 1e-12);
      const FullParams step = damped.ldlt().solve(-grad);
      FullParams trial = theta + step;
      // Fix the gauge Tr(T^dag T) = 1; rho is unchanged.
      trial.head<16>() /= trial.head<16>().norm();
      const Evaluation next = evaluate(trial, counts, false);
      if (std::isfinite(next.objective) && next.objective < current.objective) {
        const double improvement = (current.objective - next.objective) / current.objective;
        theta = trial;
        current = evaluate(theta, counts, true);
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (improvement < options.relative_tolerance) {
          return to_result(theta, current.objective, iter);
        }
      } else {
        lambda *= 4.0;
        if (lambda > kLambdaMax) return to_result(theta, current.objective, iter);
      }
    }
  }
  std::ostringstream msg;
  msg << "MLE did not converge in " << options.max_iterations << " iterations (objective "
      << current.objective << ")";
  throw ConvergenceError(msg.str(), to_result(theta, current.objective, options.max_iterations));
}

double visibility(const ProjectionValues& values, VisibilityFamily family) {
  Basis x = Basis::H, y = Basis::V;
  if (family == VisibilityFamily::DD) {
    x = Basis::Dp;
    y = Basis::Dm;
  } else if (family == VisibilityFamily::RL) {
    x = Basis::R;
    y = Basis::L;
  }
  const auto n = [&](Basis a, Basis b) { return std::max(0.0, values[projection_index(a, b)]); };
  const std::array<std::pair<double, double>, 4> pairs{{
      {n(x, x), n(x, y)},
      {n(y, y), n(y, x)},
      {n(x, x), n(y, x)},
      {n(y, y), n(x, y)},
  }};
  double best = -1.0;
  for (const auto& [a, b] : pairs) {
    if (a + b > 0.0) best = std::max(best, std::abs(a - b) / (a + b));
  }
  if (best < 0.0) fail(ErrorKind::Domain, "visibility undefined: all counts in the family are zero");
  return best;
}

}  // namespace polent
