#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

namespace tpi {

using cplx = std::complex<double>;

/// Normalized state of the two-dimensional internal degree of freedom
/// carried by each particle (spin for massive particles, polarization for
/// photons). Immutable after construction.
class InternalState {
 public:
  /// Accepts amplitudes within 1e-6 of unit norm and renormalizes them;
  /// rejects anything further off instead of silently fixing it.
  InternalState(cplx a0, cplx a1) {
    const double n = std::sqrt(std::norm(a0) + std::norm(a1));
    if (std::abs(n - 1.0) > norm_tolerance) {
      throw std::invalid_argument("InternalState: amplitudes are not unit-norm");
    }
    amps_ = {a0 / n, a1 / n};
  }

  static constexpr double norm_tolerance = 1e-6;

  const cplx& operator[](std::size_t i) const { return amps_[i]; }

 private:
  std::array<cplx, 2> amps_;
};

/// Bloch-sphere construction: (cos(theta/2), e^{i phi} sin(theta/2)).
inline InternalState make_state(double theta, double phi) {
  const double half = 0.5 * theta;
  const cplx phase{std::cos(phi), std::sin(phi)};
  return InternalState{cplx{std::cos(half), 0.0}, phase * std::sin(half)};
}

/// Inner product <a|b>, kept complex because post-selection amplitudes
/// need the phase; the modulus is what the interference laws consume.
struct Overlap {
  cplx value;
  double modulus;
};

inline Overlap overlap(const InternalState& a, const InternalState& b) {
  const cplx v = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
  return {v, std::abs(v)};
}

/// Optimal success probability of unambiguously discriminating the two
/// tag states: 1 - |<a|b>|.
inline double distinguishability_uqsd(const InternalState& a,
                                      const InternalState& b) {
  return std::max(0.0, 1.0 - overlap(a, b).modulus);
}

/// Particle distinguishability 1 - |<a|b>|^2; equals Dq*(2 - Dq) with
/// Dq the unambiguous-discrimination probability.
inline double distinguishability(const InternalState& a,
                                 const InternalState& b) {
  const double s = overlap(a, b).modulus;
  return std::max(0.0, 1.0 - s * s);
}

/// Normalized ca*|a> + cb*|b>. Throws if the combination cancels.
inline InternalState superpose(const InternalState& a, const InternalState& b,
                               cplx ca, cplx cb) {
  const cplx v0 = ca * a[0] + cb * b[0];
  const cplx v1 = ca * a[1] + cb * b[1];
  const double n = std::sqrt(std::norm(v0) + std::norm(v1));
  if (n < 1e-9) {
    throw std::invalid_argument("superpose: combination cancels to zero");
  }
  return InternalState{v0 / n, v1 / n};
}

/// The state orthogonal to s, unique up to phase in two dimensions.
inline InternalState orthocomplement(const InternalState& s) {
  return InternalState{-std::conj(s[1]), std::conj(s[0])};
}

}  // namespace tpi
