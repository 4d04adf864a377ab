#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "polent/error.hpp"
#include "polent/jointstate.hpp"
#include "polent/spectral.hpp"

namespace polent {
namespace {

constexpr double c0 = 299792458.0;

double pump_fwhm_omega(const PdcModel& m) {
  return 2.0 * std::numbers::pi * c0 * m.pump_bandwidth_fwhm /
         (m.pump_center_wavelength * m.pump_center_wavelength);
}

FrequencyGrid default_grid(std::size_t n = 512) {
  return FrequencyGrid::wavelength_window(1535.2 * kNano, 40.0 * kNano, n);
}

TEST(PumpEnvelope, PeakIsOne) {
  const PdcModel m;
  const auto e = pump_envelope(m, m.pump_center_omega());
  EXPECT_DOUBLE_EQ(e.real(), 1.0);
  EXPECT_DOUBLE_EQ(e.imag(), 0.0);
}

TEST(PumpEnvelope, HalfIntensityAtHalfWidth) {
  const PdcModel m;
  const double w0 = 2.0 * std::numbers::pi * c0 / m.pump_center_wavelength;
  const double half = 0.5 * pump_fwhm_omega(m);
  const double plus = std::norm(pump_envelope(m, w0 + half));
  const double minus = std::norm(pump_envelope(m, w0 - half));
  EXPECT_NEAR(plus, 0.5, 1e-9);
  EXPECT_DOUBLE_EQ(plus, minus);
}

TEST(PumpEnvelope, RejectsNonPositiveFrequency) {
  const PdcModel m;
  EXPECT_THROW(pump_envelope(m, 0.0), Error);
  EXPECT_THROW(pump_envelope(m, -1.0), Error);
}

TEST(PhaseMatching, UnityAtDegeneracy) {
  const PdcModel m;
  const double wd = m.degeneracy_omega();
  ASSERT_NEAR(2.0 * wd, m.pump_center_omega(), 1e-6 * wd);
  const auto v = phase_matching(m, wd, wd);
  EXPECT_NEAR(v.real(), 1.0, 1e-12);
  EXPECT_NEAR(v.imag(), 0.0, 1e-6);
}

TEST(PhaseMatching, ZeroAtFirstSincNode) {
  PdcModel m;
  m.pump_center_wavelength = 0.5 * m.degeneracy_wavelength;
  const double wd = m.degeneracy_omega();
  // with omega_i at degeneracy, dk = (n_p - n_s)(omega_s - omega_d)/c
  const double ws = wd + 2.0 * std::numbers::pi * c0 /
                             ((m.group_index_pump - m.group_index_signal) * m.crystal_length);
  EXPECT_LT(std::abs(phase_matching(m, ws, wd)), 1e-12);
}

TEST(PhaseMatching, MatchesScalarReference) {
  const PdcModel m;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3e13, 3e13);
  const double wd = m.degeneracy_omega();
  for (int i = 0; i < 200; ++i) {
    const double ws = wd + u(rng), wi = wd + u(rng);
    const double x = 0.5 * testing::reference_delta_k(m, ws, wi) * m.crystal_length;
    const std::complex<double> expect =
        (x == 0.0 ? 1.0 : std::sin(x) / x) * std::complex<double>(std::cos(x), std::sin(x));
    const auto got = phase_matching(m, ws, wi);
    EXPECT_NEAR(got.real(), expect.real(), 1e-12);
    EXPECT_NEAR(got.imag(), expect.imag(), 1e-12);
  }
}

TEST(PhaseMatching, RejectsNonPositiveFrequency) {
  const PdcModel m;
  EXPECT_THROW(phase_matching(m, 0.0, 1e15), Error);
  EXPECT_THROW(phase_matching(m, 1e15, -2.0), Error);
}

TEST(PdcModel, DefaultsReproduceCompensationDelay) {
  const PdcModel m;
  EXPECT_NEAR(m.crystal_group_delay(), 25.9 * kFemto, 1e-20);
  const PdcModel c = PdcModel::calibrated(3.3, 1.87e-3, 25.9 * kFemto);
  EXPECT_DOUBLE_EQ(c.group_index_idler, m.group_index_idler);
  EXPECT_DOUBLE_EQ(c.group_index_pump, m.group_index_pump);
}

TEST(PdcModel, ValidatesInvariants) {
  PdcModel m;
  m.crystal_length = 0.0;
  EXPECT_THROW(m.validate(), Error);
  m = PdcModel{};
  m.group_index_pump = 0.9;
  EXPECT_THROW(m.validate(), Error);
}

TEST(FrequencyGrid, CellCentredWindow) {
  const auto g = default_grid(512);
  EXPECT_TRUE(g.is_symmetric());
  const double lo = wavelength_to_omega(1555.2 * kNano);
  const double hi = wavelength_to_omega(1515.2 * kNano);
  EXPECT_NEAR(g.signal.at(0) - 0.5 * g.signal.step, lo, 1e-6 * g.signal.step);
  EXPECT_NEAR(g.signal.back() + 0.5 * g.signal.step, hi, 1e-3 * g.signal.step);
  FrequencyGrid bad = g;
  bad.idler.size = 1;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(BuildJsa, Normalized) {
  const auto jsa = build_jsa(PdcModel{}, default_grid(128));
  EXPECT_NEAR(jsa.norm(), 1.0, 1e-9);
  EXPECT_EQ(jsa.discarded_norm, 0.0);
}

TEST(BuildJsa, PeakOnAntiDiagonal) {
  const PdcModel m;
  const auto jsa = build_jsa(m, default_grid());
  Eigen::Index j = 0, k = 0;
  jsa.amplitude.cwiseAbs().maxCoeff(&j, &k);
  const double sum = jsa.grid.signal.at(static_cast<std::size_t>(j)) +
                     jsa.grid.idler.at(static_cast<std::size_t>(k));
  EXPECT_LE(std::abs(sum - m.pump_center_omega()), 2.0 * jsa.grid.signal.step);
}

TEST(BuildJsa, TooCoarseGridIsResolutionError) {
  try {
    build_jsa(PdcModel{}, default_grid(16));
    FAIL() << "expected a resolution error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Resolution);
  }
}

TEST(BuildJsa, SumFrequencyMarginalHasPumpWidth) {
  const PdcModel m;
  const auto jsa = build_jsa(m, default_grid(2048));
  const double step = jsa.grid.signal.step;
  ASSERT_GE(pump_fwhm_omega(m) / step, 64.0);

  const std::size_t n = jsa.grid.n_s();
  std::vector<double> marginal(2 * n - 1, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) marginal[j + k] += std::norm(jsa.amplitude(j, k));
  const auto peak = std::max_element(marginal.begin(), marginal.end());
  const double half = 0.5 * *peak;
  const auto idx = static_cast<std::size_t>(peak - marginal.begin());
  std::size_t lo = idx, hi = idx;
  while (lo > 0 && marginal[lo - 1] > half) --lo;
  while (hi + 1 < marginal.size() && marginal[hi + 1] > half) ++hi;
  const double left = (lo - 1) + (half - marginal[lo - 1]) / (marginal[lo] - marginal[lo - 1]);
  const double right = hi + (marginal[hi] - half) / (marginal[hi] - marginal[hi + 1]);
  const double fwhm = (right - left) * step;
  EXPECT_NEAR(fwhm / pump_fwhm_omega(m), 1.0, 0.02);
}

TEST(ApplyBandpass, WideWindowIsIdentity) {
  const auto jsa = build_jsa(PdcModel{}, default_grid(128));
  const auto out = apply_bandpass(jsa, 1535.2 * kNano, 200.0 * kNano);
  EXPECT_EQ(out.discarded_norm, 0.0);
  EXPECT_LT((out.amplitude - jsa.amplitude).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ApplyBandpass, DisjointWindowIsEmptySupport) {
  const auto jsa = build_jsa(PdcModel{}, default_grid(128));
  try {
    apply_bandpass(jsa, 1700.0 * kNano, 10.0 * kNano);
    FAIL() << "expected an empty-support error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySupport);
  }
}

TEST(ApplyBandpass, DefaultWindowDiscardsLittle) {
  const auto jsa = apply_bandpass(build_jsa(PdcModel{}, default_grid()));
  EXPECT_LT(jsa.discarded_norm, 0.05);
  EXPECT_NEAR(jsa.norm(), 1.0, 1e-9);
}

TEST(ApplyBandpass, DiscardedFractionMatchesOutOfBandNorm) {
  const auto wide = FrequencyGrid::wavelength_window(1535.2 * kNano, 80.0 * kNano, 512);
  const auto jsa = build_jsa(PdcModel{}, wide);
  double outside = 0.0, total = 0.0;
  for (std::size_t j = 0; j < wide.n_s(); ++j) {
    const double ls = omega_to_wavelength(wide.signal.at(j));
    for (std::size_t k = 0; k < wide.n_i(); ++k) {
      const double li = omega_to_wavelength(wide.idler.at(k));
      const double p = std::norm(jsa.amplitude(j, k));
      total += p;
      const bool in = std::abs(ls - 1535.2 * kNano) <= 20.0 * kNano &&
                      std::abs(li - 1535.2 * kNano) <= 20.0 * kNano;
      if (!in) outside += p;
    }
  }
  const auto filtered = apply_bandpass(jsa);
  EXPECT_NEAR(filtered.discarded_norm, outside / total, 1e-12);
  EXPECT_NEAR(filtered.norm(), 1.0, 1e-9);
}

TEST(GridConvergence, WeightsAndCoherenceStableUnderRefinement) {
  const PdcModel m;
  std::vector<double> values[2];
  const std::size_t sizes[2] = {256, 512};
  SplitterResponse split;
  split.edge_wavelength_h = 1533.55 * kNano;
  split.edge_wavelength_v = 1536.85 * kNano;
  for (int i = 0; i < 2; ++i) {
    const auto jsa = apply_bandpass(build_jsa(m, default_grid(sizes[i])));
    const auto amps = post_select(jsa, split);
    const auto w = diagonal_weights(amps);
    values[i] = {w.alpha, w.beta, std::abs(d_parameter(amps, 0.0))};
  }
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_LT(std::abs(values[1][k] - values[0][k]) / std::abs(values[1][k]), 1e-4) << k;
  }
}

}  // namespace
}  // namespace polent
