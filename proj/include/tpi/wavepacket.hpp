#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "tpi/exchange.hpp"
#include "tpi/internal_state.hpp"

namespace tpi::hbt {

/// Geometry and kinematics of the two freely spreading Gaussian packets,
/// in natural units (hbar = 1). One packet starts centered at +x0, the
/// other at -x0, both with intensity width epsilon. All spreading enters
/// through the single combination delta = 2 t / m.
class WavepacketConfig {
 public:
  WavepacketConfig(double x0, double epsilon, double mass, double time)
      : x0_(x0), epsilon_(epsilon), mass_(mass), time_(time) {
    if (!(x0 > 0.0)) throw std::invalid_argument("WavepacketConfig: x0 <= 0");
    if (!(epsilon > 0.0))
      throw std::invalid_argument("WavepacketConfig: epsilon <= 0");
    if (!(mass > 0.0)) throw std::invalid_argument("WavepacketConfig: mass <= 0");
    if (!(time >= 0.0)) throw std::invalid_argument("WavepacketConfig: time < 0");
    // The analytic density drops the initial-overlap cross term, which is
    // suppressed by exp(-4 x0^2 / eps^2); insist that it is < 1e-12.
    if (4.0 * x0 * x0 / (epsilon * epsilon) < 27.631021115928547) {
      throw std::invalid_argument(
          "WavepacketConfig: sources not well separated (need "
          "exp(-4 x0^2/eps^2) < 1e-12)");
    }
  }

  /// Same packet geometry specified by the spreading scale directly.
  static WavepacketConfig with_delta(double x0, double epsilon, double delta,
                                     double mass = 1.0) {
    if (!(delta >= 0.0))
      throw std::invalid_argument("WavepacketConfig: delta < 0");
    return WavepacketConfig{x0, epsilon, mass, 0.5 * delta * mass};
  }

  double x0() const { return x0_; }
  double epsilon() const { return epsilon_; }
  double mass() const { return mass_; }
  double time() const { return time_; }

  double delta() const { return 2.0 * time_ / mass_; }

  /// Squared intensity width of each packet after the flight:
  /// sigma^2 = eps^2 + delta^2 / eps^2.
  double sigma_sq() const {
    const double d = delta();
    return epsilon_ * epsilon_ + d * d / (epsilon_ * epsilon_);
  }

  /// Complex squared width eps^2 + i delta appearing in the evolved packet.
  cplx complex_width_sq() const { return {epsilon_ * epsilon_, delta()}; }

  /// Decay rate of the hyperbolic background in the detector separation:
  /// k_h = 4 eps^2 x0 / (eps^4 + delta^2).
  double cosh_wavenumber() const {
    const double d = delta();
    const double e2 = epsilon_ * epsilon_;
    return 4.0 * e2 * x0_ / (e2 * e2 + d * d);
  }

  /// Spatial frequency of the exchange fringes: k_c = 4 delta x0 /
  /// (eps^4 + delta^2). Zero at t = 0, where no fringes exist.
  double fringe_wavenumber() const {
    const double d = delta();
    const double e2 = epsilon_ * epsilon_;
    return 4.0 * d * x0_ / (e2 * e2 + d * d);
  }

  double fringe_period() const {
    const double k = fringe_wavenumber();
    if (k <= 0.0) {
      throw std::domain_error("fringe_period: no fringes at zero flight time");
    }
    return 2.0 * std::numbers::pi / k;
  }

 private:
  double x0_, epsilon_, mass_, time_;
};

}  // namespace tpi::hbt
