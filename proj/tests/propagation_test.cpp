#include "tpi/propagation.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "tpi/exchange.hpp"
#include "tpi/hbt.hpp"
#include "tpi/rng.hpp"
#include "tpi/wavepacket.hpp"

namespace {

using tpi::cplx;
using tpi::ExchangeSign;
namespace hbt = tpi::hbt;

std::vector<cplx> random_signal(std::size_t n, std::uint64_t seed) {
  tpi::rng::Xoshiro256pp gen{seed};
  std::vector<cplx> a(n);
  for (auto& z : a) {
    z = {tpi::rng::uniform01(gen) - 0.5, tpi::rng::uniform01(gen) - 0.5};
  }
  return a;
}

TEST(Fft, MatchesNaiveDftAndRoundTrips) {
  const std::size_t n = 16;
  const auto a = random_signal(n, 101u);

  std::vector<cplx> naive(n, {0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(j * k) /
                         static_cast<double>(n);
      naive[k] += a[j] * std::polar(1.0, ang);
    }
  }

  auto fast = a;
  hbt::fft_pow2(fast, false);
  for (std::size_t k = 0; k < n; ++k) {
    EXPECT_NEAR(std::abs(fast[k] - naive[k]), 0.0, 1e-12);
  }

  hbt::fft_pow2(fast, true);
  for (std::size_t j = 0; j < n; ++j) {
    EXPECT_NEAR(std::abs(fast[j] - a[j]), 0.0, 1e-13);
  }
}

TEST(Fft, ParsevalOnRandomSignal) {
  const std::size_t n = 256;
  const auto a = random_signal(n, 102u);
  double time_energy = 0.0;
  for (const auto& z : a) time_energy += std::norm(z);

  auto spec = a;
  hbt::fft_pow2(spec, false);
  double freq_energy = 0.0;
  for (const auto& z : spec) freq_energy += std::norm(z);

  EXPECT_NEAR(freq_energy / static_cast<double>(n), time_energy,
              1e-12 * time_energy);
}

TEST(Fft, ImpulseAndSingleHarmonic) {
  std::vector<cplx> impulse(8, {0.0, 0.0});
  impulse[0] = {1.0, 0.0};
  hbt::fft_pow2(impulse, false);
  for (const auto& z : impulse) EXPECT_NEAR(std::abs(z - cplx{1.0, 0.0}), 0.0, 1e-14);

  const std::size_t n = 32;
  std::vector<cplx> tone(n);
  for (std::size_t j = 0; j < n; ++j) {
    tone[j] = std::polar(1.0, 2.0 * std::numbers::pi * 5.0 *
                                  static_cast<double>(j) / static_cast<double>(n));
  }
  hbt::fft_pow2(tone, false);
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = (k == 5) ? static_cast<double>(n) : 0.0;
    EXPECT_NEAR(std::abs(tone[k]), expected, 1e-12);
  }
  EXPECT_THROW(hbt::fft_pow2(impulse = std::vector<cplx>(12), false),
               std::invalid_argument);
}

TEST(Propagation, SameGridRouteMatchesClosedForm) {
  const auto cfg = hbt::WavepacketConfig::with_delta(10.0, 1.0, 20.0);
  const auto grid = hbt::default_grid(cfg);
  const auto in = hbt::sample_initial_packet(cfg, cfg.x0(), grid);
  const auto out = hbt::propagate_on_grid(in, cfg.delta());

  ASSERT_EQ(out.values.size(), in.values.size());
  EXPECT_NEAR(out.step, in.step, 1e-15);
  double peak = 0.0;
  for (const auto& z : out.values) peak = std::max(peak, std::abs(z));
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    const cplx exact = hbt::evolved_packet(cfg, out.x(j), cfg.x0());
    EXPECT_NEAR(std::abs(out.values[j] - exact), 0.0, 1e-12 * peak);
  }
}

TEST(Propagation, RescaledRouteMatchesClosedForm) {
  const auto cfg = hbt::WavepacketConfig::with_delta(10.0, 1.0, 200.0);
  const auto grid = hbt::default_grid(cfg);
  const auto in = hbt::sample_initial_packet(cfg, -cfg.x0(), grid);
  const auto out = hbt::propagate_rescaled(in, cfg.delta());

  // Output window is magnified by the kernel rescaling.
  const double expected_step =
      std::numbers::pi * cfg.delta() /
      (static_cast<double>(grid.points) * in.step);
  EXPECT_NEAR(out.step, expected_step, 1e-12);

  double peak = 0.0;
  for (const auto& z : out.values) peak = std::max(peak, std::abs(z));
  ASSERT_GT(peak, 0.0);
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    const cplx exact = hbt::evolved_packet(cfg, out.x(j), -cfg.x0());
    EXPECT_NEAR(std::abs(out.values[j] - exact), 0.0, 1e-10 * peak);
    if (std::abs(exact) > 1e-6 * peak) {
      EXPECT_NEAR(std::abs(out.values[j] - exact) / std::abs(exact), 0.0, 1e-8);
    }
  }
  EXPECT_NEAR(out.norm_squared(), 1.0, 1e-9);
}

TEST(Propagation, RescaledRouteValidation) {
  const auto cfg = hbt::WavepacketConfig::with_delta(10.0, 1.0, 200.0);
  const auto grid = hbt::default_grid(cfg);
  auto in = hbt::sample_initial_packet(cfg, cfg.x0(), grid);
  EXPECT_THROW(hbt::propagate_rescaled(in, 0.0), std::invalid_argument);
  EXPECT_THROW(hbt::propagate_rescaled(in, -3.0), std::invalid_argument);

  auto odd = in;
  odd.values.resize(grid.points - 1);
  EXPECT_THROW(hbt::propagate_rescaled(odd, 200.0), std::invalid_argument);

  auto shifted = in;
  shifted.origin += 10.0 * shifted.step;
  EXPECT_THROW(hbt::propagate_rescaled(shifted, 200.0), std::invalid_argument);
}

TEST(Propagation, ZeroTimeIsIdentity) {
  const auto cfg = hbt::WavepacketConfig::with_delta(10.0, 1.0, 0.0);
  const auto [dA, dB] = tpi::test::tags_with_overlap(0.6);
  const auto rho = hbt::propagate_numeric(cfg, ExchangeSign::bosons, dA, dB);

  const double peak = rho.density(rho.size() / 2, rho.size() / 2) + 1e-300;
  double worst = 0.0;
  for (std::size_t i = 0; i < rho.size(); i += 8) {
    for (std::size_t j = 0; j < rho.size(); j += 8) {
      const double exact = hbt::initial_wavefunction(rho.axis(i), rho.axis(j), cfg,
                                                     ExchangeSign::bosons, dA, dB)
                               .density();
      worst = std::max(worst, std::abs(rho.density(i, j) - exact));
    }
  }
  const double scale = std::max(peak, hbt::initial_wavefunction(
                                          10.0, -10.0, cfg, ExchangeSign::bosons,
                                          dA, dB)
                                          .density());
  EXPECT_LE(worst, 1e-12 * scale);
  EXPECT_LE(rho.norm_drift(), 1e-12);
}

TEST(Propagation, NormConservedOnBothRoutes) {
  const auto [dA, dB] = tpi::test::tags_with_overlap(0.8);
  for (const double delta : {20.0, 200.0}) {
    const auto cfg = hbt::WavepacketConfig::with_delta(10.0, 1.0, delta);
    const auto rho = hbt::propagate_numeric(cfg, ExchangeSign::bosons, dA, dB);
    EXPECT_NEAR(rho.norm(), 1.0, 1e-6);
    EXPECT_LE(rho.norm_drift(), 1e-10);
    // Route selection shows in the output step: the near field keeps the
    // sampling step, the far field magnifies it.
    if (delta == 20.0) {
      EXPECT_NEAR(rho.step(), 0.25, 1e-12);
    } else {
      EXPECT_GT(rho.step(), 1.0);
    }
  }
}

TEST(Propagation, DensityGridIsExchangeSymmetric) {
  const auto cfg = hbt::WavepacketConfig::with_delta(10.0, 1.0, 200.0);
  const auto [dA, dB] = tpi::test::tags_with_overlap(0.5);
  for (const auto x : {ExchangeSign::bosons, ExchangeSign::fermions}) {
    const auto rho = hbt::propagate_numeric(cfg, x, dA, dB);
    for (std::size_t i = 100; i < rho.size(); i += 331) {
      for (std::size_t j = 55; j < rho.size(); j += 331) {
        EXPECT_NEAR(rho.density(i, j), rho.density(j, i), 1e-15);
      }
    }
  }
}

TEST(Propagation, RejectsGridsThatCannotRepresentThePacket) {
  const auto [dA, dB] = tpi::test::tags_with_overlap(0.5);

  // Step of one intensity width: the spectral tail check fires.
  const auto cfg = hbt::WavepacketConfig::with_delta(10.0, 1.0, 200.0);
  EXPECT_THROW(hbt::propagate_numeric(cfg, ExchangeSign::bosons, dA, dB,
                                      hbt::GridSpec{256.0, 512}),
               std::invalid_argument);

  // Window that does not contain the source at +x0.
  EXPECT_THROW(hbt::propagate_numeric(cfg, ExchangeSign::bosons, dA, dB,
                                      hbt::GridSpec{8.0, 2048}),
               std::invalid_argument);

  // Far source: the magnified output step cannot resolve the fringes.
  const auto wide = hbt::WavepacketConfig::with_delta(100.0, 1.0, 200.0);
  EXPECT_THROW(hbt::propagate_numeric(wide, ExchangeSign::bosons, dA, dB),
               std::invalid_argument);
}

TEST(Propagation, JointGridRequiresMatchingAxes) {
  const auto cfg = hbt::WavepacketConfig::with_delta(10.0, 1.0, 0.0);
  const auto grid = hbt::default_grid(cfg);
  auto a = hbt::sample_initial_packet(cfg, cfg.x0(), grid);
  auto b = hbt::sample_initial_packet(cfg, -cfg.x0(), grid);
  b.origin += 0.5;
  EXPECT_THROW(hbt::JointDensityGrid(a, b, 1.0, 0.25, 1.0), std::invalid_argument);
}

TEST(Propagation, FarFieldDensityMatchesAnalyticModel) {
  const auto cfg = hbt::WavepacketConfig::with_delta(10.0, 1.0, 200.0);
  for (const double s : {0.6, 1.0}) {
    const auto [dA, dB] = tpi::test::tags_with_overlap(s);
    const auto rho = hbt::propagate_numeric(cfg, ExchangeSign::bosons, dA, dB);
    const hbt::AnalyticJointDensity model(cfg, ExchangeSign::bosons, s);

    const std::size_t n = rho.size();
    double worst = 0.0;
    for (std::size_t i = n / 4; i < (3 * n) / 4; i += 2) {
      for (std::size_t j = n / 4; j < (3 * n) / 4; j += 2) {
        const double exact = model(rho.axis(i), rho.axis(j));
        ASSERT_GT(exact, 0.0);
        worst = std::max(worst, std::abs(rho.density(i, j) - exact) / exact);
      }
    }
    EXPECT_LE(worst, 1e-6);
  }
}

}  // namespace
