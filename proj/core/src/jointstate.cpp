#include "polent/jointstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "parallel.hpp"
#include "polent/error.hpp"

namespace polent {

namespace {

constexpr double kDegenerateNorm = 1e-12;
constexpr double kTwoPiRad = 2.0 * std::numbers::pi;

double norm_constant_of(const ComplexGrid& g, const ComplexGrid& h, double cell_area) {
  return (g.squaredNorm() + h.squaredNorm()) * cell_area;
}

// h(signal = x, idler = y), bilinear, zero outside the grid.
cd sample_bilinear(const ComplexGrid& h, const FrequencyGrid& grid, double x, double y) {
  constexpr double kEdgeSlack = 1e-9;
  double u = (x - grid.signal.origin) / grid.signal.step;
  double v = (y - grid.idler.origin) / grid.idler.step;
  const double umax = static_cast<double>(grid.n_s() - 1);
  const double vmax = static_cast<double>(grid.n_i() - 1);
  if (u < -kEdgeSlack || v < -kEdgeSlack || u > umax + kEdgeSlack || v > vmax + kEdgeSlack) {
    return 0.0;
  }
  u = std::clamp(u, 0.0, umax);
  v = std::clamp(v, 0.0, vmax);
  const auto j0 = std::min(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(umax) - 1);
  const auto k0 = std::min(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(vmax) - 1);
  const double a = u - static_cast<double>(j0);
  const double b = v - static_cast<double>(k0);
  return (1 - a) * (1 - b) * h(j0, k0) + a * (1 - b) * h(j0 + 1, k0) +
         (1 - a) * b * h(j0, k0 + 1) + a * b * h(j0 + 1, k0 + 1);
}

}  // namespace

PostSelectedAmplitudes PostSelectedAmplitudes::from_amplitudes(FrequencyGrid grid, ComplexGrid g,
                                                               ComplexGrid h) {
  grid.validate();
  const auto rows = static_cast<Eigen::Index>(grid.n_s());
  const auto cols = static_cast<Eigen::Index>(grid.n_i());
  if (g.rows() != rows || g.cols() != cols || h.rows() != rows || h.cols() != cols) {
    fail(ErrorKind::Domain, "post-selected amplitudes do not match the grid shape");
  }
  PostSelectedAmplitudes amps{std::move(grid), std::move(g), std::move(h), 0.0, 0.0};
  amps.norm_constant = norm_constant_of(amps.g, amps.h, amps.grid.cell_area());
  if (!(amps.norm_constant > kDegenerateNorm)) {
    fail(ErrorKind::DegeneratePostSelection, "post-selected norm is zero");
  }
  return amps;
}

bool PolarizationDensityMatrix::Check::ok() const {
  return hermiticity <= 1e-12 && trace_error <= 1e-12 && min_eigenvalue >= -1e-10;
}

PolarizationDensityMatrix::PolarizationDensityMatrix(const Matrix4cd& elements) : rho_(elements) {
  const auto c = check();
  if (!c.ok()) {
    std::ostringstream msg;
    msg << "invalid density matrix (hermiticity " << c.hermiticity << ", trace error "
        << c.trace_error << ", min eigenvalue " << c.min_eigenvalue << ")";
    fail(ErrorKind::InvalidState, msg.str());
  }
}

PolarizationDensityMatrix PolarizationDensityMatrix::unchecked(const Matrix4cd& elements) {
  return {elements, NoCheck{}};
}

PolarizationDensityMatrix::Check PolarizationDensityMatrix::check() const {
  Check c{};
  c.hermiticity = hermiticity_error(rho_);
  c.trace_error = std::abs(rho_.trace() - cd(1.0, 0.0));
  c.min_eigenvalue = hermitian_eigen(rho_).values.minCoeff();
  return c;
}

void DegradationModel::validate() const {
  if (!(amplitude_scale > 0.0 && amplitude_scale <= 1.0)) {
    fail(ErrorKind::Domain, "degradation amplitude_scale must lie in (0, 1]");
  }
  if (!std::isfinite(time_offset)) fail(ErrorKind::Domain, "degradation time_offset not finite");
}

PostSelectedAmplitudes post_select(const JsaGrid& jsa, const SplitterResponse& splitter) {
  const double norm = jsa.norm();
  if (std::abs(norm - 1.0) > 1e-9) {
    fail(ErrorKind::Domain, "post_select expects a normalized JSA (norm " +
                                std::to_string(norm) + ")");
  }
  const auto curves = sample_on_grid(splitter, jsa.grid);
  const auto n_s = static_cast<Eigen::Index>(jsa.grid.n_s());
  const auto n_i = static_cast<Eigen::Index>(jsa.grid.n_i());

  ComplexGrid g(n_s, n_i), h(n_s, n_i);
  double same_path = 0.0;
  for (Eigen::Index j = 0; j < n_s; ++j) {
    for (Eigen::Index k = 0; k < n_i; ++k) {
      const cd f = jsa.amplitude(j, k);
      g(j, k) = f * std::sqrt(curves.t_h[j] * curves.r_v[k]);
      h(j, k) = f * std::sqrt(curves.r_h[j] * curves.t_v[k]);
      same_path += std::norm(f) * (curves.t_h[j] * curves.t_v[k] + curves.r_h[j] * curves.r_v[k]);
    }
  }

  PostSelectedAmplitudes amps{jsa.grid, std::move(g), std::move(h), 0.0, 0.0};
  amps.norm_constant = norm_constant_of(amps.g, amps.h, amps.grid.cell_area());
  amps.neglected_norm = same_path * amps.grid.cell_area();
  if (!(amps.norm_constant > kDegenerateNorm)) {
    fail(ErrorKind::DegeneratePostSelection,
         "no cross-path coincidences: splitter sends both photons to the same path everywhere");
  }
  return amps;
}

Weights diagonal_weights(const PostSelectedAmplitudes& amps) {
  if (!(amps.norm_constant > 0.0)) {
    fail(ErrorKind::DegeneratePostSelection, "diagonal_weights: zero normalization");
  }
  const double sg = amps.g.squaredNorm();
  const double sh = amps.h.squaredNorm();
  return {sg / (sg + sh), sh / (sg + sh)};
}

CoherenceKernel::CoherenceKernel(const PostSelectedAmplitudes& amps) {
  if (!(amps.norm_constant > 0.0)) {
    fail(ErrorKind::DegeneratePostSelection, "d_parameter: zero normalization");
  }
  const auto& grid = amps.grid;
  const auto n_s = static_cast<Eigen::Index>(grid.n_s());
  const auto n_i = static_cast<Eigen::Index>(grid.n_i());
  scale_ = grid.cell_area() / amps.norm_constant;

  // Integrand h(omega'', omega') conj(g(omega', omega'')) with omega' on the
  // signal axis (index j) and omega'' on the idler axis (index k).
  ComplexGrid product(n_s, n_i);
  if (grid.is_symmetric()) {
    product = amps.h.transpose().cwiseProduct(amps.g.conjugate());
  } else {
    const double lo = std::max(grid.signal.origin, grid.idler.origin);
    const double hi = std::min(grid.signal.back(), grid.idler.back());
    if (lo > hi) {
      fail(ErrorKind::InterpolationDomain,
           "signal and idler axes do not overlap; h(omega'', omega') is undefined");
    }
    for (Eigen::Index j = 0; j < n_s; ++j) {
      for (Eigen::Index k = 0; k < n_i; ++k) {
        const cd swapped = sample_bilinear(amps.h, grid, grid.idler.at(k), grid.signal.at(j));
        product(j, k) = swapped * std::conj(amps.g(j, k));
      }
    }
  }

  if (grid.signal.step == grid.idler.step) {
    // omega'_j - omega''_k = (s0 - i0) + (j - k) step
    lagged_ = true;
    lag_step_ = grid.signal.step;
    lag_base_ = (grid.signal.origin - grid.idler.origin) - static_cast<double>(n_i - 1) * lag_step_;
    lag_weights_.assign(static_cast<std::size_t>(n_s + n_i - 1), cd{});
    for (Eigen::Index j = 0; j < n_s; ++j) {
      for (Eigen::Index k = 0; k < n_i; ++k) {
        lag_weights_[static_cast<std::size_t>(j - k + n_i - 1)] += product(j, k);
      }
    }
  } else {
    product_ = std::move(product);
    offset_base_ = grid.signal.origin - grid.idler.origin;
    signal_offsets_.resize(grid.n_s());
    idler_offsets_.resize(grid.n_i());
    for (std::size_t j = 0; j < grid.n_s(); ++j) signal_offsets_[j] = static_cast<double>(j) * grid.signal.step;
    for (std::size_t k = 0; k < grid.n_i(); ++k) idler_offsets_[k] = static_cast<double>(k) * grid.idler.step;
  }
}

std::complex<double> CoherenceKernel::operator()(double tau) const {
  cd sum{};
  if (lagged_) {
    for (std::size_t m = 0; m < lag_weights_.size(); ++m) {
      const double delta = lag_base_ + static_cast<double>(m) * lag_step_;
      sum += lag_weights_[m] * std::polar(1.0, delta * tau);
    }
  } else {
    std::vector<cd> idler_phase(idler_offsets_.size());
    for (std::size_t k = 0; k < idler_phase.size(); ++k) {
      idler_phase[k] = std::polar(1.0, -idler_offsets_[k] * tau);
    }
    for (std::size_t j = 0; j < signal_offsets_.size(); ++j) {
      cd row{};
      for (std::size_t k = 0; k < idler_phase.size(); ++k) {
        row += product_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * idler_phase[k];
      }
      sum += row * std::polar(1.0, (offset_base_ + signal_offsets_[j]) * tau);
    }
  }
  return sum * scale_;
}

std::complex<double> d_parameter(const PostSelectedAmplitudes& amps, double tau) {
  return CoherenceKernel(amps)(tau);
}

PolarizationDensityMatrix density_matrix(double alpha, double beta, std::complex<double> d) {
  if (!(alpha >= 0.0 && beta >= 0.0) || std::abs(alpha + beta - 1.0) > 1e-9) {
    fail(ErrorKind::Domain, "density_matrix: alpha, beta must be non-negative and sum to 1");
  }
  const double bound = std::sqrt(alpha * beta);
  const double mag = std::abs(d);
  if (mag > bound + 1e-9) {
    std::ostringstream msg;
    msg << "|D| = " << mag << " exceeds sqrt(alpha beta) = " << bound;
    fail(ErrorKind::NonphysicalCoherence, msg.str());
  }
  if (mag > bound) d *= bound / mag;

  using PDM = PolarizationDensityMatrix;
  Matrix4cd rho = Matrix4cd::Zero();
  rho(PDM::HV, PDM::HV) = alpha;
  rho(PDM::VH, PDM::VH) = beta;
  rho(PDM::VH, PDM::HV) = d;
  rho(PDM::HV, PDM::VH) = std::conj(d);
  return PolarizationDensityMatrix(rho);
}

void unwrap_phases(DelaySweep& sweep) {
  auto& s = sweep.samples;
  if (s.empty()) return;
  std::size_t anchor = 0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (std::abs(s[k].d) > std::abs(s[anchor].d)) anchor = k;
  }
  const auto follow = [](double previous, double principal) {
    return principal + kTwoPiRad * std::round((previous - principal) / kTwoPiRad);
  };
  s[anchor].phase = std::arg(s[anchor].d);
  for (std::size_t k = anchor + 1; k < s.size(); ++k) {
    s[k].phase = follow(s[k - 1].phase, std::arg(s[k].d));
  }
  for (std::size_t k = anchor; k-- > 0;) {
    s[k].phase = follow(s[k + 1].phase, std::arg(s[k].d));
  }
}

DelaySweep delay_sweep_at(const PostSelectedAmplitudes& amps, const std::vector<double>& taus) {
  for (std::size_t k = 1; k < taus.size(); ++k) {
    if (!(taus[k] > taus[k - 1])) fail(ErrorKind::Domain, "delays must be strictly increasing");
  }
  const CoherenceKernel kernel(amps);
  const auto [alpha, beta] = diagonal_weights(amps);

  DelaySweep sweep;
  sweep.samples.resize(taus.size());
  detail::parallel_for(taus.size(), [&](std::size_t k) {
    const cd d = kernel(taus[k]);
    sweep.samples[k] = {taus[k], d, alpha, beta,
                        alpha * alpha + beta * beta + 2.0 * std::norm(d), 0.0};
  });
  unwrap_phases(sweep);
  return sweep;
}

DelaySweep delay_sweep(const PostSelectedAmplitudes& amps, double tau_min, double tau_max,
                       std::size_t n) {
  if (!(tau_min < tau_max) || n < 2) {
    fail(ErrorKind::Domain, "delay_sweep: need tau_min < tau_max and n >= 2");
  }
  std::vector<double> taus(n);
  const double step = (tau_max - tau_min) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) taus[k] = tau_min + static_cast<double>(k) * step;
  taus.back() = tau_max;
  return delay_sweep_at(amps, taus);
}

std::complex<double> interpolate_d(const DelaySweep& sweep, double tau) {
  const auto& s = sweep.samples;
  if (s.empty()) return {};
  if (s.size() == 1) return tau == s.front().tau ? s.front().d : cd{};
  const double slack = 1e-9 * (s.back().tau - s.front().tau);
  if (tau < s.front().tau - slack || tau > s.back().tau + slack) return {};
  tau = std::clamp(tau, s.front().tau, s.back().tau);
  auto it = std::upper_bound(s.begin(), s.end(), tau,
                             [](double t, const DelaySample& x) { return t < x.tau; });
  if (it == s.end()) return s.back().d;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (tau - lo.tau) / (hi.tau - lo.tau);
  return (1.0 - w) * lo.d + w * hi.d;
}

DegradedSweep apply_degradation(const DelaySweep& sweep, const DegradationModel& model) {
  model.validate();
  DegradedSweep out{sweep, std::nullopt};
  if (sweep.samples.empty()) return out;
  const double first = sweep.samples.front().tau;
  const double last = sweep.samples.back().tau;
  std::size_t covered = 0;
  for (auto& sample : out.sweep.samples) {
    const double shifted = sample.tau - model.time_offset;
    if (shifted >= first && shifted <= last) ++covered;
    sample.d = model.amplitude_scale * interpolate_d(sweep, shifted);
    sample.purity = sample.alpha * sample.alpha + sample.beta * sample.beta + 2.0 * std::norm(sample.d);
  }
  if (covered == 0) {
    out.coverage_warning = "time offset moves the whole prediction outside the sweep window";
  }
  unwrap_phases(out.sweep);
  return out;
}

DegradationFit fit_degradation(const DelaySweep& sweep,
                               const std::vector<DelayObservation>& observations) {
  if (observations.size() < 2) {
    fail(ErrorKind::Usage, "fit_degradation needs at least two observations");
  }
  if (sweep.samples.size() < 2) fail(ErrorKind::Domain, "fit_degradation needs a sweep");
  if (std::all_of(observations.begin(), observations.end(),
                  [](const DelayObservation& o) { return std::abs(o.d) == 0.0; })) {
    fail(ErrorKind::UnidentifiableFit, "all observed D values are zero");
  }

  constexpr double kMinScale = 1e-9;
  const double first = sweep.samples.front().tau;
  const double last = sweep.samples.back().tau;
  double max_tau = -std::numeric_limits<double>::infinity();
  double min_tau = std::numeric_limits<double>::infinity();
  for (const auto& o : observations) {
    max_tau = std::max(max_tau, o.tau);
    min_tau = std::min(min_tau, o.tau);
  }
  const double lo = max_tau - last;
  const double hi = min_tau - first;
  if (lo > hi) {
    fail(ErrorKind::UnidentifiableFit, "observations span a wider delay range than the sweep");
  }

  struct Eval {
    double offset;
    double scale;
    double residual;
  };
  const auto evaluate = [&](double offset) {
    double num = 0.0, den = 0.0;
    std::vector<cd> model(observations.size());
    for (std::size_t k = 0; k < observations.size(); ++k) {
      model[k] = interpolate_d(sweep, observations[k].tau - offset);
      num += std::real(std::conj(model[k]) * observations[k].d);
      den += std::norm(model[k]);
    }
    const double scale = den > 0.0 ? std::clamp(num / den, kMinScale, 1.0) : kMinScale;
    double r = 0.0;
    for (std::size_t k = 0; k < observations.size(); ++k) {
      r += std::norm(scale * model[k] - observations[k].d);
    }
    return Eval{offset, scale, r};
  };

  constexpr double kScanStep = 0.1 * kFemto;
  const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / kScanStep));
  Eval best = evaluate(lo);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double offset = std::min(hi, lo + static_cast<double>(k) * kScanStep);
    const Eval e = evaluate(offset);
    if (e.residual < best.residual) best = e;
  }

  // Golden-section refinement inside the winning scan cell.
  double a = std::max(lo, best.offset - kScanStep);
  double b = std::min(hi, best.offset + kScanStep);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  Eval ec = evaluate(c), ed = evaluate(d);
  for (int it = 0; it < 200 && (b - a) > 1e-24; ++it) {
    if (ec.residual < ed.residual) {
      b = d;
      d = c;
      ed = ec;
      c = b - inv_phi * (b - a);
      ec = evaluate(c);
    } else {
      a = c;
      c = d;
      ec = ed;
      d = a + inv_phi * (b - a);
      ed = evaluate(d);
    }
  }
  for (const Eval& e : {ec, ed}) {
    if (e.residual < best.residual) best = e;
  }

  DegradationFit fit;
  fit.model = {best.scale, best.offset};
  fit.residual = best.residual;
  for (const auto& o : observations) {
    fit.residuals.push_back(best.scale * interpolate_d(sweep, o.tau - best.offset) - o.d);
  }
  return fit;
}

SplitterResponse calibrate_edge_split(const JsaGrid& jsa, const SplitterResponse& base,
                                      double target_alpha, double center) {
  if (!(target_alpha > 0.0 && target_alpha < 1.0)) {
    fail(ErrorKind::Domain, "calibrate_edge_split: target alpha must lie in (0, 1)");
  }
  const auto with_split = [&](double delta) {
    SplitterResponse s = base;
    s.edge_wavelength_h = center - 0.5 * delta;
    s.edge_wavelength_v = center + 0.5 * delta;
    return s;
  };
  const auto alpha_at = [&](double delta) {
    return diagonal_weights(post_select(jsa, with_split(delta))).alpha;
  };

  constexpr double kMaxSplit = 20.0 * kNano;
  double lo = -kMaxSplit, hi = kMaxSplit;
  double f_lo = alpha_at(lo) - target_alpha;
  const double f_hi = alpha_at(hi) - target_alpha;
  if (f_lo * f_hi > 0.0) {
    fail(ErrorKind::Domain, "calibrate_edge_split: target alpha not reachable by an edge split");
  }
  for (int it = 0; it < 100 && hi - lo > 1e-18; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = alpha_at(mid) - target_alpha;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return with_split(0.5 * (lo + hi));
}

}  // namespace polent
