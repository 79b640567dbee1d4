#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tpi/exchange.hpp"
#include "tpi/hbt.hpp"
#include "tpi/internal_state.hpp"
#include "tpi/wavepacket.hpp"

namespace tpi::hbt {

// ---------------------------------------------------------------------------
// Radix-2 FFT
// ---------------------------------------------------------------------------

/// In-place power-of-two FFT, forward kernel e^{-2 pi i jk/n}. Twiddles
/// come from std::polar per butterfly instead of a recurrence, trading a
/// few cycles for full accuracy on the grids used here.
inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("fft_pow2: size must be a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const cplx w = std::polar(1.0, ang * static_cast<double>(j));
        const cplx u = a[i + j];
        const cplx v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (cplx& z : a) z *= scale;
  }
}

// ---------------------------------------------------------------------------
// Sampled waves and detection grids
// ---------------------------------------------------------------------------

/// Uniformly sampled complex amplitude, x_j = origin + j * step.
struct SampledWave {
  double origin = 0.0;
  double step = 0.0;
  std::vector<cplx> values;

  double x(std::size_t j) const { return origin + step * static_cast<double>(j); }

  /// Trapezoid integral of |psi|^2.
  double norm_squared() const {
    const std::size_t n = values.size();
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
      acc += w * std::norm(values[j]);
    }
    return acc * step;
  }
};

struct GridSpec {
  double half_width = 0.0;  // grid spans [-half_width, half_width)
  std::size_t points = 0;   // power of two
};

/// Symmetric grid resolving the initial packet (step <= eps/4) and
/// spanning both sources with room for the 1e-10 tails. Grows the point
/// count beyond `points` only when the sources would not fit otherwise.
inline GridSpec default_grid(const WavepacketConfig& cfg,
                             std::size_t points = 2048) {
  if (points < 16 || (points & (points - 1)) != 0) {
    throw std::invalid_argument("default_grid: points must be a power of two");
  }
  const double step = cfg.epsilon() / 4.0;
  const double needed = cfg.x0() + 12.0 * cfg.epsilon();
  std::size_t n = points;
  while (static_cast<double>(n / 2) * step < needed) n *= 2;
  return GridSpec{static_cast<double>(n / 2) * step, n};
}

inline SampledWave sample_initial_packet(const WavepacketConfig& cfg,
                                         double center, const GridSpec& grid) {
  SampledWave w;
  w.step = 2.0 * grid.half_width / static_cast<double>(grid.points);
  w.origin = -grid.half_width;
  w.values.reserve(grid.points);
  for (std::size_t j = 0; j < grid.points; ++j) {
    w.values.emplace_back(initial_packet(cfg, w.x(j), center), 0.0);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Free propagation, two spectral routes
// ---------------------------------------------------------------------------

/// Kinetic phase in k-space on the same grid: psi_k *= exp(-i k^2 delta/4).
/// Valid while the evolved packet still fits the input window.
inline SampledWave propagate_on_grid(const SampledWave& in, double delta) {
  SampledWave out = in;
  const std::size_t n = out.values.size();
  fft_pow2(out.values, false);
  const double dk =
      2.0 * std::numbers::pi / (static_cast<double>(n) * out.step);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = dk * (j < n / 2 ? static_cast<double>(j)
                                     : static_cast<double>(j) -
                                           static_cast<double>(n));
    out.values[j] *= std::polar(1.0, -0.25 * k * k * delta);
  }
  fft_pow2(out.values, true);
  return out;
}

/// Single-step kernel propagation onto a magnified grid: with the free
/// kernel written as chirp * Fourier * chirp, one FFT maps the input
/// window onto an output window of step pi*delta/(n*dx). Used once the
/// evolved packet outgrows the input window; requires a symmetric grid.
inline SampledWave propagate_rescaled(const SampledWave& in, double delta) {
  const std::size_t n = in.values.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("propagate_rescaled: size must be power of two");
  }
  const double sym = std::abs(in.origin + 0.5 * in.step * static_cast<double>(n));
  if (sym > 1e-9 * in.step * static_cast<double>(n)) {
    throw std::invalid_argument("propagate_rescaled: grid must be symmetric");
  }
  if (!(delta > 0.0)) {
    throw std::invalid_argument("propagate_rescaled: delta must be positive");
  }

  std::vector<cplx> y(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = in.x(j);
    const double parity = (j % 2 == 0) ? 1.0 : -1.0;
    y[j] = in.values[j] * std::polar(1.0, x * x / delta) * parity;
  }
  fft_pow2(y, false);

  SampledWave out;
  out.step = std::numbers::pi * delta / (static_cast<double>(n) * in.step);
  out.origin = -0.5 * out.step * static_cast<double>(n);
  out.values.resize(n);
  // Centered-index DFT phases: (-1)^m per output sample plus a global
  // (-1)^{n/2} when n/2 is odd.
  const double center_sign = ((n / 2) % 2 == 0) ? 1.0 : -1.0;
  const cplx pref = in.step / std::sqrt(cplx{0.0, std::numbers::pi * delta});
  for (std::size_t m = 0; m < n; ++m) {
    const double xi = out.x(m);
    const double parity = (m % 2 == 0) ? 1.0 : -1.0;
    out.values[m] = pref * center_sign * parity *
                    std::polar(1.0, xi * xi / delta) * y[m];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Numeric joint density
// ---------------------------------------------------------------------------

namespace detail {

/// Trapezoid norm of the (anti)symmetrized pair built from packets a and
/// b: Ia*Ib + eta s^2 |J|^2 with J the single-particle cross overlap.
inline double pair_norm(const SampledWave& a, const SampledWave& b, double et,
                        double s2) {
  const std::size_t n = a.values.size();
  double ia = 0.0, ib = 0.0;
  cplx j_ab{0.0, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    ia += w * std::norm(a.values[j]);
    ib += w * std::norm(b.values[j]);
    j_ab += w * a.values[j] * std::conj(b.values[j]);
  }
  return ia * ib * a.step * a.step + et * s2 * std::norm(j_ab * a.step);
}

}  // namespace detail

/// Two evolved packets on a shared detector axis, combined into the
/// (anti)symmetrized pair density on demand.
class JointDensityGrid {
 public:
  JointDensityGrid(SampledWave a, SampledWave b, double exchange_eta,
                   double overlap_sq, double norm_initial)
      : a_(std::move(a)),
        b_(std::move(b)),
        eta_(exchange_eta),
        s2_(overlap_sq),
        norm_initial_(norm_initial) {
    if (a_.values.size() != b_.values.size() ||
        std::abs(a_.origin - b_.origin) > 1e-12 ||
        std::abs(a_.step - b_.step) > 1e-15) {
      throw std::invalid_argument("JointDensityGrid: packets on different grids");
    }
  }

  std::size_t size() const { return a_.values.size(); }
  double axis(std::size_t j) const { return a_.x(j); }
  double step() const { return a_.step; }
  const SampledWave& packet_a() const { return a_; }
  const SampledWave& packet_b() const { return b_; }

  /// rho(x_i, x_j) for particle positions on the shared axis.
  double density(std::size_t i, std::size_t j) const {
    const cplx d = a_.values[i] * b_.values[j];
    const cplx e = a_.values[j] * b_.values[i];
    return 0.5 * (std::norm(d) + std::norm(e) +
                  2.0 * eta_ * s2_ * (d * std::conj(e)).real());
  }

  /// Trapezoid norm of the full two-particle density.
  double norm() const { return detail::pair_norm(a_, b_, eta_, s2_); }

  double norm_initial() const { return norm_initial_; }
  double norm_drift() const { return std::abs(norm() - norm_initial_); }

 private:
  SampledWave a_, b_;
  double eta_;
  double s2_;
  double norm_initial_;
};

namespace detail {

inline void check_spans_packet(const SampledWave& w, const char* what) {
  double peak = 0.0;
  for (const cplx& v : w.values) peak = std::max(peak, std::abs(v));
  const double edge =
      std::max(std::abs(w.values.front()), std::abs(w.values.back()));
  if (!(peak > 0.0) || edge > 1e-10 * peak) {
    throw std::invalid_argument(std::string(what) +
                                ": grid does not span the packet (edge tails "
                                "above 1e-10 of peak)");
  }
}

/// Fraction of spectral energy in the top 12.5% of |k|; anything there
/// means the grid step does not resolve the packet.
inline void check_bandlimited(const SampledWave& w, const char* what) {
  std::vector<cplx> spec = w.values;
  fft_pow2(spec, false);
  const std::size_t n = spec.size();
  double total = 0.0, tail = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double e = std::norm(spec[j]);
    total += e;
    const std::size_t dist = std::min(j, n - j);  // distance from k = 0
    if (dist >= (n * 7) / 16) tail += e;          // top 12.5% of |k|
  }
  if (!(total > 0.0) || tail > 1e-10 * total) {
    throw std::invalid_argument(std::string(what) +
                                ": grid step too coarse for the packet "
                                "(spectral tail above 1e-10)");
  }
}

}  // namespace detail

/// Evolves both packets spectrally and returns the sampled pair density.
/// The route is chosen by whether the spread packets still fit the input
/// window; either way the detector axis is shared by both packets.
/// Fails loudly on grids that do not span the sources, do not resolve
/// the packets or the fringes, or do not conserve the norm to 1e-8.
inline JointDensityGrid propagate_numeric(const WavepacketConfig& cfg,
                                          ExchangeSign x,
                                          const InternalState& dA,
                                          const InternalState& dB,
                                          const GridSpec& grid) {
  const double s = overlap(dA, dB).modulus;
  const double s2 = s * s;
  const double et = eta(x);

  SampledWave a0 = sample_initial_packet(cfg, cfg.x0(), grid);
  SampledWave b0 = sample_initial_packet(cfg, -cfg.x0(), grid);
  detail::check_spans_packet(a0, "propagate_numeric");
  detail::check_spans_packet(b0, "propagate_numeric");
  detail::check_bandlimited(a0, "propagate_numeric");
  detail::check_bandlimited(b0, "propagate_numeric");
  const double norm_in = detail::pair_norm(a0, b0, et, s2);

  const double delta = cfg.delta();
  SampledWave a1, b1;
  if (delta == 0.0) {
    a1 = std::move(a0);
    b1 = std::move(b0);
  } else {
    // Spread 1-particle intensity ~ exp(-2 (x -+ x0)^2 / sigma^2): the
    // 1e-10 tails reach x0 + 3.4 sigma.
    const double reach = cfg.x0() + 3.5 * std::sqrt(cfg.sigma_sq());
    if (reach <= 0.95 * grid.half_width) {
      a1 = propagate_on_grid(a0, delta);
      b1 = propagate_on_grid(b0, delta);
    } else {
      // The rescaled route multiplies by the chirp e^{i x^2/delta}, which
      // adds local frequency 2x/delta over the occupied part of the grid;
      // that must stay within the band the step can represent.
      const double support = cfg.x0() + 7.5 * cfg.epsilon();
      const double packet_band = 10.5 / cfg.epsilon();
      const double band = packet_band + 2.0 * support / delta;
      const double nyquist = std::numbers::pi / a0.step;
      if (band > 0.95 * nyquist) {
        throw std::invalid_argument(
            "propagate_numeric: grid too coarse for the chirped kernel at "
            "this delta");
      }
      a1 = propagate_rescaled(a0, delta);
      b1 = propagate_rescaled(b0, delta);
    }
  }

  if (cfg.fringe_wavenumber() > 0.0) {
    const double period = cfg.fringe_period();
    if (period < 8.0 * a1.step) {
      throw std::invalid_argument(
          "propagate_numeric: output grid resolves less than 8 points per "
          "fringe");
    }
  }

  JointDensityGrid out{std::move(a1), std::move(b1), et, s2, norm_in};
  if (out.norm_drift() > 1e-8) {
    throw std::runtime_error(
        "propagate_numeric: norm drift above 1e-8, grid too coarse");
  }
  return out;
}

inline JointDensityGrid propagate_numeric(const WavepacketConfig& cfg,
                                          ExchangeSign x,
                                          const InternalState& dA,
                                          const InternalState& dB) {
  return propagate_numeric(cfg, x, dA, dB, default_grid(cfg));
}

}  // namespace tpi::hbt
