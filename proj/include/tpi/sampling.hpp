#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tpi/exchange.hpp"
#include "tpi/hbt.hpp"
#include "tpi/internal_state.hpp"
#include "tpi/rng.hpp"
#include "tpi/wavepacket.hpp"

namespace tpi::sampling {

enum class HomOutcome : int { coincidence = 0, bunched_d1 = 1, bunched_d2 = 2 };

inline const char* to_label(HomOutcome o) {
  switch (o) {
    case HomOutcome::coincidence: return "coincidence";
    case HomOutcome::bunched_d1: return "bunched-D1";
    case HomOutcome::bunched_d2: return "bunched-D2";
  }
  return "?";
}

enum class BatchKind { hom, hbt };

/// Simulated detection events. Same seed and configuration give a
/// bit-identical batch; sampling is chunked into fixed-size substreams
/// so the guarantee does not depend on how the work is scheduled.
struct EventBatch {
  BatchKind kind = BatchKind::hom;
  ExchangeSign exchange = ExchangeSign::bosons;
  std::uint64_t seed = 0;
  std::uint64_t count = 0;
  std::vector<HomOutcome> outcomes;                   // hom batches
  std::vector<std::pair<double, double>> positions;   // hbt batches (x1, x2)
  double acceptance_rate = 1.0;
};

namespace detail {
constexpr std::uint64_t chunk_size = 65536;
}

/// Detector outcomes for a bosonic pair behind the splitter. Coincidence
/// carries probability (1 - s^2)/2, each bunched outcome (1 + s^2)/4.
inline EventBatch sample_hom(const InternalState& dA, const InternalState& dB,
                             std::uint64_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_hom: zero events requested");
  const double s = overlap(dA, dB).modulus;
  const double p_c = 0.5 * (1.0 - s * s);
  const double p_d1 = p_c + 0.25 * (1.0 + s * s);

  EventBatch batch;
  batch.kind = BatchKind::hom;
  batch.seed = seed;
  batch.count = n;
  batch.outcomes.reserve(n);
  for (std::uint64_t chunk = 0; chunk * detail::chunk_size < n; ++chunk) {
    rng::Xoshiro256pp gen(rng::substream_seed(seed, chunk));
    const std::uint64_t quota =
        std::min(detail::chunk_size, n - chunk * detail::chunk_size);
    for (std::uint64_t i = 0; i < quota; ++i) {
      const double u = rng::uniform01(gen);
      batch.outcomes.push_back(u < p_c    ? HomOutcome::coincidence
                               : u < p_d1 ? HomOutcome::bunched_d1
                                          : HomOutcome::bunched_d2);
    }
  }
  return batch;
}

inline std::uint64_t count_outcome(const EventBatch& batch, HomOutcome o) {
  return static_cast<std::uint64_t>(
      std::count(batch.outcomes.begin(), batch.outcomes.end(), o));
}

/// Position pairs drawn from the joint detection density by rejection.
/// The proposal is the exact background (the two shifted Gaussian
/// products), which majorizes the density with constant 1 + s^2, so the
/// acceptance rate is at least 1/(1 + s^2) up to the fringe correction.
inline EventBatch sample_hbt(const hbt::WavepacketConfig& cfg, ExchangeSign x,
                             double overlap_modulus, std::uint64_t n,
                             std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_hbt: zero events requested");
  if (!(overlap_modulus >= 0.0 && overlap_modulus <= 1.0 + 1e-12)) {
    throw std::invalid_argument("sample_hbt: overlap modulus outside [0, 1]");
  }
  const double s2 = overlap_modulus * overlap_modulus;
  const double et = eta(x);
  const double kc = cfg.fringe_wavenumber();
  const double kh = cfg.cosh_wavenumber();
  const double x0 = cfg.x0();
  const double sd = 0.5 * std::sqrt(cfg.sigma_sq());  // per-axis std dev

  EventBatch batch;
  batch.kind = BatchKind::hbt;
  batch.exchange = x;
  batch.seed = seed;
  batch.count = n;
  batch.positions.reserve(n);

  std::uint64_t proposals = 0;
  for (std::uint64_t chunk = 0; chunk * detail::chunk_size < n; ++chunk) {
    rng::Xoshiro256pp gen(rng::substream_seed(seed, chunk));
    std::uint64_t quota =
        std::min(detail::chunk_size, n - chunk * detail::chunk_size);
    while (quota > 0) {
      ++proposals;
      const double pick = rng::uniform01(gen);
      const auto [z1, z2] = rng::normal_pair(gen);
      const double v = rng::uniform01(gen);
      const double c1 = pick < 0.5 ? x0 : -x0;
      const double x1 = c1 + sd * z1;
      const double x2 = -c1 + sd * z2;
      const double u = x1 - x2;
      // accept ratio: [cosh(kh u) + eta s^2 cos(kc u)] / [(1+s^2) cosh(kh u)]
      const double fringe = et * s2 * std::cos(kc * u) / std::cosh(kh * u);
      if (v * (1.0 + s2) <= 1.0 + fringe) {
        batch.positions.emplace_back(x1, x2);
        --quota;
      }
    }
  }
  batch.acceptance_rate =
      static_cast<double>(n) / static_cast<double>(proposals);
  if (batch.acceptance_rate < 0.01) {
    throw std::runtime_error(
        "sample_hbt: acceptance rate below 1%, proposal no longer majorizes");
  }
  return batch;
}

/// Histogram of the separation u with the fitted fringe contrast.
struct HistogramEstimate {
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t binned_events = 0;
  double visibility = 0.0;
  double std_error = 0.0;
};

namespace detail {

struct FringeFit {
  double baseline;
  double ratio;  // fringe amplitude over baseline, sign per exchange
};

/// Least squares of y_i = counts_i / w_i against {1, f_i} with
/// f = eta cos(kc u)/cosh(kh u). The weights are the exchange background
/// (envelope times cosh) at the bin centers, written as the two shifted
/// Gaussians to stay bounded; what the division leaves on top of the
/// unit baseline is s^2 f, so the fitted slope estimates s^2 directly.
inline FringeFit fit_fringe(const std::vector<double>& centers,
                            const std::vector<double>& counts, double sigma_sq,
                            double x0, double kc, double et) {
  const std::size_t m = centers.size();
  const double kh = 4.0 * x0 / sigma_sq;  // kh sigma^2 = 4 x0 identically
  double s_ff = 0.0, s_f = 0.0, s_y = 0.0, s_fy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double u = centers[i];
    const double up = u - 2.0 * x0;
    const double um = u + 2.0 * x0;
    const double w = 0.5 * (std::exp(-up * up / sigma_sq) +
                            std::exp(-um * um / sigma_sq));
    if (!(w > 1e-280)) {
      throw std::runtime_error("estimate_visibility: background weight underflow");
    }
    const double y = counts[i] / w;
    const double f = et * std::cos(kc * u) / std::cosh(kh * u);
    s_ff += f * f;
    s_f += f;
    s_y += y;
    s_fy += f * y;
  }
  const double mm = static_cast<double>(m);
  const double det = mm * s_ff - s_f * s_f;
  if (!(std::abs(det) > 1e-12 * mm * std::max(1.0, s_ff))) {
    throw std::runtime_error("estimate_visibility: degenerate fringe fit");
  }
  const double c0 = (s_ff * s_y - s_f * s_fy) / det;
  const double c1 = (mm * s_fy - s_f * s_y) / det;
  if (!(c0 > 0.0)) {
    throw std::runtime_error("estimate_visibility: nonpositive fitted baseline");
  }
  return {c0, c1 / c0};
}

}  // namespace detail

/// Fits the fringe contrast of an hbt batch: 50 bins per period over the
/// three central periods, background divided out per bin, linear fit of
/// the cosine at the known wavenumber, bootstrap standard error from 200
/// multinomial resamples of the histogram.
inline HistogramEstimate estimate_visibility(const EventBatch& batch,
                                             const hbt::WavepacketConfig& cfg) {
  if (batch.kind != BatchKind::hbt) {
    throw std::invalid_argument("estimate_visibility: needs an hbt batch");
  }
  if (batch.count < 10000) {
    throw std::invalid_argument(
        "estimate_visibility: needs at least 1e4 events");
  }
  constexpr int bins_per_period = 50;
  constexpr int periods = 3;
  constexpr int n_bins = bins_per_period * periods;
  constexpr int bootstrap_rounds = 200;

  const double period = cfg.fringe_period();
  const double width = period / bins_per_period;
  const double lo = -0.5 * periods * period;

  HistogramEstimate est;
  est.bin_edges.resize(n_bins + 1);
  for (int i = 0; i <= n_bins; ++i) est.bin_edges[i] = lo + width * i;
  est.counts.assign(n_bins, 0);

  for (const auto& [x1, x2] : batch.positions) {
    const double u = x1 - x2;
    const double pos = (u - lo) / width;
    if (pos < 0.0 || pos >= static_cast<double>(n_bins)) continue;
    ++est.counts[static_cast<std::size_t>(pos)];
  }
  std::uint64_t binned = 0;
  for (auto c : est.counts) binned += c;
  est.binned_events = binned;
  if (binned < static_cast<std::uint64_t>(10 * n_bins)) {
    throw std::runtime_error(
        "estimate_visibility: too few events fall inside the fringe window");
  }

  std::vector<double> centers(n_bins);
  for (int i = 0; i < n_bins; ++i) centers[i] = lo + width * (i + 0.5);

  const double kc = cfg.fringe_wavenumber();
  const double et = eta(batch.exchange);
  const double sig2 = cfg.sigma_sq();
  const double x0 = cfg.x0();

  // Binning smears the cosine by sinc(kc width / 2); undo it on the ratio.
  const double half_arg = 0.5 * kc * width;
  const double attenuation = std::sin(half_arg) / half_arg;

  std::vector<double> y(est.counts.begin(), est.counts.end());
  const detail::FringeFit fit = detail::fit_fringe(centers, y, sig2, x0, kc, et);
  est.visibility = std::max(0.0, fit.ratio / attenuation);

  // Bootstrap: multinomial resample of the histogram, refit, take the
  // spread of the raw (unclamped) ratio.
  std::vector<double> cdf(n_bins);
  double acc = 0.0;
  for (int i = 0; i < n_bins; ++i) {
    acc += static_cast<double>(est.counts[i]);
    cdf[i] = acc;
  }
  for (double& cval : cdf) cval /= acc;

  rng::Xoshiro256pp gen(
      rng::substream_seed(batch.seed ^ 0xB005757A9D5EC7A4ULL, 0));
  std::vector<double> resampled(n_bins);
  double mean = 0.0, m2 = 0.0;
  for (int round = 0; round < bootstrap_rounds; ++round) {
    std::fill(resampled.begin(), resampled.end(), 0.0);
    for (std::uint64_t ev = 0; ev < binned; ++ev) {
      const double u = rng::uniform01(gen);
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const std::size_t idx = std::min(
          static_cast<std::size_t>(it - cdf.begin()),
          static_cast<std::size_t>(n_bins - 1));
      resampled[idx] += 1.0;
    }
    const double r =
        detail::fit_fringe(centers, resampled, sig2, x0, kc, et).ratio /
        attenuation;
    const double d = r - mean;
    mean += d / (round + 1);
    m2 += d * (r - mean);
  }
  est.std_error = std::sqrt(m2 / (bootstrap_rounds - 1));
  return est;
}

}  // namespace tpi::sampling
