#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "tpi/exchange.hpp"
#include "tpi/internal_state.hpp"
#include "tpi/wavepacket.hpp"

namespace tpi::hbt {

// ---------------------------------------------------------------------------
// Single-packet amplitudes
// ---------------------------------------------------------------------------

/// Unit-normalized initial packet centered at c:
/// (2/(pi eps^2))^{1/4} exp(-(x-c)^2 / eps^2).
inline double initial_packet(const WavepacketConfig& cfg, double x, double c) {
  const double e2 = cfg.epsilon() * cfg.epsilon();
  const double q = (x - c) * (x - c) / e2;
  return std::pow(2.0 / (std::numbers::pi * e2), 0.25) * std::exp(-q);
}

/// The same packet after free flight: the squared width picks up the
/// imaginary part i*delta and the packet stays unit-normalized.
inline cplx evolved_packet(const WavepacketConfig& cfg, double x, double c) {
  const double e2 = cfg.epsilon() * cfg.epsilon();
  const cplx w = cfg.complex_width_sq();
  const cplx pref = std::pow(2.0 / (std::numbers::pi * e2), 0.25) *
                    std::sqrt(cplx{e2, 0.0} / w);
  const double dx = x - c;
  return pref * std::exp(-dx * dx / w);
}

// ---------------------------------------------------------------------------
// Detection-time Gaussian geometry
// ---------------------------------------------------------------------------

/// Intensity Gaussian of the direct ordering (packet A at x1, B at x2):
/// exp(-2[(x1-x0)^2 + (x2+x0)^2] / sigma^2).
inline double direct_gaussian(const WavepacketConfig& cfg, double x1, double x2) {
  const double s2 = cfg.sigma_sq();
  const double p = x1 - cfg.x0();
  const double q = x2 + cfg.x0();
  return std::exp(-2.0 * (p * p + q * q) / s2);
}

inline double exchanged_gaussian(const WavepacketConfig& cfg, double x1,
                                 double x2) {
  return direct_gaussian(cfg, x2, x1);
}

/// Geometric mean of the two orderings; the fringe term rides on it.
inline double cross_envelope(const WavepacketConfig& cfg, double x1, double x2) {
  const double s2 = cfg.sigma_sq();
  const double x0 = cfg.x0();
  return std::exp(-2.0 * (x1 * x1 + x2 * x2 + 2.0 * x0 * x0) / s2);
}

/// |alpha_t|^2 = eps^2 / (pi (eps^4 + delta^2)), the squared modulus of
/// the evolved pair prefactor. Equals 1 / (pi sigma^2).
inline double pair_prefactor_sq(const WavepacketConfig& cfg) {
  const double e2 = cfg.epsilon() * cfg.epsilon();
  const double d = cfg.delta();
  return e2 / (std::numbers::pi * (e2 * e2 + d * d));
}

// ---------------------------------------------------------------------------
// Tagged pair amplitude
// ---------------------------------------------------------------------------

/// Pair amplitude in the ordering basis:
///   psi(x1,x2) = direct * |dA>_1|dB>_2 + exchanged * |dA>_2|dB>_1,
/// with the exchange sign already folded into `exchanged`. Tracing out
/// the tags couples the orderings through |<dA|dB>|^2 only.
struct TaggedPairAmplitude {
  cplx direct;
  cplx exchanged;
  double tag_overlap_sq;

  double density() const {
    return std::norm(direct) + std::norm(exchanged) +
           2.0 * tag_overlap_sq * (direct * std::conj(exchanged)).real();
  }
};

/// Pair amplitude at t = 0. The packet from source A starts at +x0 and
/// carries tag dA; the one from source B starts at -x0 with tag dB.
inline TaggedPairAmplitude initial_wavefunction(double x1, double x2,
                                                const WavepacketConfig& cfg,
                                                ExchangeSign x,
                                                const InternalState& dA,
                                                const InternalState& dB) {
  const double r = 1.0 / std::sqrt(2.0);
  const double s = overlap(dA, dB).modulus;
  const double a1 = initial_packet(cfg, x1, cfg.x0());
  const double b2 = initial_packet(cfg, x2, -cfg.x0());
  const double a2 = initial_packet(cfg, x2, cfg.x0());
  const double b1 = initial_packet(cfg, x1, -cfg.x0());
  return {cplx{r * a1 * b2, 0.0}, cplx{eta(x) * r * a2 * b1, 0.0}, s * s};
}

/// Pair amplitude after free flight to the detection time.
inline TaggedPairAmplitude evolved_wavefunction(double x1, double x2,
                                                const WavepacketConfig& cfg,
                                                ExchangeSign x,
                                                const InternalState& dA,
                                                const InternalState& dB) {
  const double r = 1.0 / std::sqrt(2.0);
  const double s = overlap(dA, dB).modulus;
  const cplx a1 = evolved_packet(cfg, x1, cfg.x0());
  const cplx b2 = evolved_packet(cfg, x2, -cfg.x0());
  const cplx a2 = evolved_packet(cfg, x2, cfg.x0());
  const cplx b1 = evolved_packet(cfg, x1, -cfg.x0());
  return {r * a1 * b2, eta(x) * r * a2 * b1, s * s};
}

// ---------------------------------------------------------------------------
// Closed-form joint detection density
// ---------------------------------------------------------------------------

namespace detail {

/// Composite trapezoid over [a, b] with n samples (n >= 2).
template <typename F>
double trapezoid(F&& f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n - 1);
  double acc = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i + 1 < n; ++i) acc += f(a + h * static_cast<double>(i));
  return acc * h;
}

}  // namespace detail

/// Joint probability density of detecting one particle at x1 and one at
/// x2 after the flight. In the separation u = x1 - x2 it is a hyperbolic
/// background plus exchange fringes of wavenumber k_c, weighted by the
/// squared tag overlap:
///
///   rho ~ exp(-2(x1^2+x2^2+2 x0^2)/sigma^2) [cosh(k_h u) + eta s^2 cos(k_c u)]
///
/// The cosh term is kept as the pair of shifted Gaussians it comes from
/// (direct and exchanged orderings; k_h sigma^2 = 4 x0 identically), which
/// stays bounded where exp * cosh would overflow. The normalization is
/// obtained by quadrature rather than trusting a closed form.
class AnalyticJointDensity {
 public:
  AnalyticJointDensity(const WavepacketConfig& cfg, ExchangeSign x,
                       double overlap_modulus)
      : cfg_(cfg), eta_(eta(x)), s2_(overlap_modulus * overlap_modulus) {
    if (!(overlap_modulus >= 0.0 && overlap_modulus <= 1.0 + 1e-12)) {
      throw std::invalid_argument(
          "AnalyticJointDensity: overlap modulus outside [0, 1]");
    }
    normalization_ = 1.0 / unnormalized_integral();
  }

  const WavepacketConfig& config() const { return cfg_; }
  double exchange_eta() const { return eta_; }
  double overlap_sq() const { return s2_; }
  double normalization() const { return normalization_; }

  double operator()(double x1, double x2) const {
    const double kc = cfg_.fringe_wavenumber();
    const double background = 0.5 * (direct_gaussian(cfg_, x1, x2) +
                                     exchanged_gaussian(cfg_, x1, x2));
    const double fringe =
        eta_ * s2_ * cross_envelope(cfg_, x1, x2) * std::cos(kc * (x1 - x2));
    return normalization_ * (background + fringe);
  }

 private:
  double unnormalized_integral() const {
    // Separable in u = x1 - x2, v = x1 + x2 with Jacobian 1/2. The
    // background splits into Gaussians centered at u = +-2 x0.
    const double sg = std::sqrt(cfg_.sigma_sq());
    const double x0 = cfg_.x0();
    const double kc = cfg_.fringe_wavenumber();
    const double e = eta_;
    const double s2 = s2_;
    auto over_v = [sg](double v) { return std::exp(-v * v / (sg * sg)); };
    auto over_u = [=](double u) {
      const double up = (u - 2.0 * x0) / sg;
      const double um = (u + 2.0 * x0) / sg;
      const double background = 0.5 * (std::exp(-up * up) + std::exp(-um * um));
      const double fringe = e * s2 *
                            std::exp(-(u * u + 4.0 * x0 * x0) / (sg * sg)) *
                            std::cos(kc * u);
      return background + fringe;
    };
    const double vr = 8.0 * sg;
    const double ur = 2.0 * x0 + 8.0 * sg;
    constexpr std::size_t n = 16385;
    const double iv = detail::trapezoid(over_v, -vr, vr, n);
    const double iu = detail::trapezoid(over_u, -ur, ur, n);
    return 0.5 * iv * iu;
  }

  WavepacketConfig cfg_;
  double eta_;
  double s2_;
  double normalization_;
};

/// One-off evaluation; construct AnalyticJointDensity directly when
/// evaluating many points, the normalization quadrature dominates.
inline double joint_density_analytic(double x1, double x2,
                                     const WavepacketConfig& cfg, ExchangeSign x,
                                     double overlap_modulus) {
  return AnalyticJointDensity(cfg, x, overlap_modulus)(x1, x2);
}

// ---------------------------------------------------------------------------
// Post-selected (eraser) density
// ---------------------------------------------------------------------------

/// Density of coincidences in which the analyzer behind detector 1 fires
/// on e1 and the one behind detector 2 fires on e2. The two orderings
/// enter with amplitudes weighted by A = <e1|dA><e2|dB> and
/// B = <e1|dB><e2|dA>, so fringes survive at contrast
/// 2|A||B| / (|A|^2+|B|^2) even when the tags themselves are orthogonal.
inline double hbt_eraser_density(double x1, double x2,
                                 const WavepacketConfig& cfg, ExchangeSign x,
                                 const InternalState& dA, const InternalState& dB,
                                 const InternalState& e1,
                                 const InternalState& e2) {
  const cplx a = overlap(e1, dA).value * overlap(e2, dB).value;
  const cplx b = overlap(e1, dB).value * overlap(e2, dA).value;
  const double r = 1.0 / std::sqrt(2.0);
  const cplx direct = r * evolved_packet(cfg, x1, cfg.x0()) *
                      evolved_packet(cfg, x2, -cfg.x0());
  const cplx exchanged = eta(x) * r * evolved_packet(cfg, x2, cfg.x0()) *
                         evolved_packet(cfg, x1, -cfg.x0());
  return std::norm(direct * a + exchanged * b);
}

/// Fringe contrast of the post-selected channel (e1, e2).
inline double eraser_visibility(const InternalState& dA, const InternalState& dB,
                                const InternalState& e1,
                                const InternalState& e2) {
  const double a = std::abs(overlap(e1, dA).value * overlap(e2, dB).value);
  const double b = std::abs(overlap(e1, dB).value * overlap(e2, dA).value);
  const double denom = a * a + b * b;
  if (denom < 1e-300) {
    throw std::domain_error("eraser_visibility: channel has no amplitude");
  }
  return 2.0 * a * b / denom;
}

// ---------------------------------------------------------------------------
// Fringe pattern and visibility extraction
// ---------------------------------------------------------------------------

/// Coincidence profile against detector separation u = x1 - x2, sampled
/// along the symmetric cut x1 = -x2 = u/2. `envelope_corrected` is the
/// density with the Gaussian envelope divided out and the hyperbolic
/// background subtracted, leaving 1 + eta s^2 cos(k_c u) on a unit
/// baseline; extraction works on that channel.
struct FringePattern {
  std::vector<double> separations;
  std::vector<double> densities;
  std::vector<double> envelope_corrected;
  double fringe_period = 0.0;
};

namespace detail {

inline void check_pattern_request(int periods, int samples_per_period) {
  if (periods < 1) throw std::invalid_argument("fringe_pattern: periods < 1");
  if (samples_per_period < 4 || samples_per_period % 2 != 0) {
    throw std::invalid_argument(
        "fringe_pattern: need an even number (>= 4) of samples per period");
  }
}

}  // namespace detail

inline FringePattern fringe_pattern(const AnalyticJointDensity& model,
                                    int periods = 3,
                                    int samples_per_period = 50) {
  detail::check_pattern_request(periods, samples_per_period);
  const WavepacketConfig& cfg = model.config();
  const double period = cfg.fringe_period();
  const double du = period / samples_per_period;
  const long half = static_cast<long>(periods) * samples_per_period / 2;

  FringePattern p;
  p.fringe_period = period;
  for (long j = -half; j <= half; ++j) {
    const double u = du * static_cast<double>(j);
    const double x1 = 0.5 * u;
    const double x2 = -0.5 * u;
    const double cross = cross_envelope(cfg, x1, x2);
    if (cross < 1e-280) {
      throw std::domain_error(
          "fringe_pattern: envelope underflows over the requested window");
    }
    const double density = model(x1, x2);
    const double background = 0.5 * (direct_gaussian(cfg, x1, x2) +
                                     exchanged_gaussian(cfg, x1, x2));
    p.separations.push_back(u);
    p.densities.push_back(density);
    p.envelope_corrected.push_back(
        1.0 + (density / model.normalization() - background) / cross);
  }
  return p;
}

/// Pattern for one analyzer outcome pair. The corrected channel divides
/// by the envelope and removes the per-channel background
/// |A|^2 e^{k_h u} + |B|^2 e^{-k_h u}, again on a unit baseline.
inline FringePattern eraser_fringe_pattern(const WavepacketConfig& cfg,
                                           ExchangeSign x,
                                           const InternalState& dA,
                                           const InternalState& dB,
                                           const InternalState& e1,
                                           const InternalState& e2,
                                           int periods = 3,
                                           int samples_per_period = 50) {
  detail::check_pattern_request(periods, samples_per_period);
  const double period = cfg.fringe_period();
  const double du = period / samples_per_period;
  const long half = static_cast<long>(periods) * samples_per_period / 2;

  const double a2 = std::norm(overlap(e1, dA).value * overlap(e2, dB).value);
  const double b2 = std::norm(overlap(e1, dB).value * overlap(e2, dA).value);
  const double channel_weight = a2 + b2;
  const double alpha_sq = pair_prefactor_sq(cfg);

  FringePattern p;
  p.fringe_period = period;
  for (long j = -half; j <= half; ++j) {
    const double u = du * static_cast<double>(j);
    const double x1 = 0.5 * u;
    const double x2 = -0.5 * u;
    const double cross = cross_envelope(cfg, x1, x2);
    if (cross < 1e-280) {
      throw std::domain_error(
          "eraser_fringe_pattern: envelope underflows over the requested "
          "window");
    }
    const double density = hbt_eraser_density(x1, x2, cfg, x, dA, dB, e1, e2);
    const double background = a2 * direct_gaussian(cfg, x1, x2) +
                              b2 * exchanged_gaussian(cfg, x1, x2);
    double corrected = 1.0;
    if (channel_weight > 1e-30) {
      corrected += (density / alpha_sq - background) / (cross * channel_weight);
    }
    p.separations.push_back(u);
    p.densities.push_back(density);
    p.envelope_corrected.push_back(corrected);
  }
  return p;
}

/// Fringe visibility (I_max - I_min)/(I_max + I_min) read off the
/// envelope-corrected channel: global maximum, then the adjacent minima.
/// Requires at least one full period in range.
inline double extract_visibility(const FringePattern& p) {
  const std::size_t n = p.separations.size();
  if (n < 3) throw std::invalid_argument("extract_visibility: pattern too short");
  if (!(p.fringe_period > 0.0) ||
      p.separations.back() - p.separations.front() <
          p.fringe_period * (1.0 - 1e-9)) {
    throw std::invalid_argument(
        "extract_visibility: need at least one fringe period of data");
  }
  const auto& y = p.envelope_corrected;
  std::size_t imax = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (y[i] > y[imax]) imax = i;

  auto descend = [&y, n](std::size_t start, long dir) {
    std::size_t i = start;
    while (true) {
      const long next = static_cast<long>(i) + dir;
      if (next < 0 || next >= static_cast<long>(n)) break;
      if (!(y[static_cast<std::size_t>(next)] < y[i])) break;
      i = static_cast<std::size_t>(next);
    }
    return y[i];
  };

  const double vmax = y[imax];
  const double vmin = std::min(descend(imax, +1), descend(imax, -1));
  const double denom = vmax + vmin;
  if (!(denom > 0.0)) return 0.0;
  return std::max(0.0, (vmax - vmin) / denom);
}

}  // namespace tpi::hbt
