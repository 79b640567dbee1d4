#pragma once

#include <cmath>
#include <numbers>

#include "tpi/internal_state.hpp"
#include "tpi/rng.hpp"

namespace tpi::test {

/// Haar-ish random tag state: polar angle from a uniform cosine, azimuth
/// uniform. Good enough to exercise phases and both hemispheres.
inline InternalState random_state(rng::Xoshiro256pp& gen) {
  const double theta = std::acos(1.0 - 2.0 * rng::uniform01(gen));
  const double phi = 2.0 * std::numbers::pi * rng::uniform01(gen);
  return make_state(theta, phi);
}

/// Pair of tags whose overlap modulus is exactly s (relative phase zero).
inline std::pair<InternalState, InternalState> tags_with_overlap(double s) {
  return {make_state(0.0, 0.0), make_state(2.0 * std::acos(s), 0.0)};
}

}  // namespace tpi::test
