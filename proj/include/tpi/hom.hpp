#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tpi/exchange.hpp"
#include "tpi/internal_state.hpp"

namespace tpi::hom {

/// Spatial modes: the two input ports of the beam splitter and the two
/// output detectors.
enum class Mode { source_a, source_b, detector_1, detector_2 };

inline bool is_detector(Mode m) {
  return m == Mode::detector_1 || m == Mode::detector_2;
}

/// One product term coeff * |mode[0]>_1 |mode[1]>_2 (x) |tag[0]>_1 |tag[1]>_2.
/// Index is the particle label, so exchange swaps both arrays.
struct Term {
  cplx coeff;
  std::array<Mode, 2> mode;
  std::array<InternalState, 2> tag;
};

inline cplx term_inner(const Term& s, const Term& t) {
  if (s.mode != t.mode) return {0.0, 0.0};
  return std::conj(s.coeff) * t.coeff * overlap(s.tag[0], t.tag[0]).value *
         overlap(s.tag[1], t.tag[1]).value;
}

inline double norm_squared(const std::vector<Term>& terms) {
  cplx acc{0.0, 0.0};
  for (const Term& s : terms)
    for (const Term& t : terms) acc += term_inner(s, t);
  return acc.real();
}

/// Two-particle state as a superposition of labeled product terms. The
/// term list is not reduced; all observables go through Gram sums, so
/// duplicate or parallel terms are harmless.
class HomState {
 public:
  explicit HomState(std::vector<Term> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw std::invalid_argument("HomState: empty term list");
  }

  const std::vector<Term>& terms() const { return terms_; }

  double norm_squared() const { return hom::norm_squared(terms_); }

  /// ||P12 psi - sign * psi||^2, zero when the state has the claimed
  /// symmetry under particle exchange.
  double exchange_defect(double sign) const {
    std::vector<Term> diff;
    diff.reserve(2 * terms_.size());
    for (const Term& t : terms_) {
      diff.push_back(Term{t.coeff, {t.mode[1], t.mode[0]}, {t.tag[1], t.tag[0]}});
    }
    for (const Term& t : terms_) {
      diff.push_back(Term{-sign * t.coeff, t.mode, t.tag});
    }
    return hom::norm_squared(diff);
  }

  bool in_detector_basis() const {
    for (const Term& t : terms_)
      if (is_detector(t.mode[0]) || is_detector(t.mode[1])) return true;
    return false;
  }

 private:
  std::vector<Term> terms_;
};

/// Symmetrized (or antisymmetrized) input: one particle from source A
/// tagged dA, one from source B tagged dB, in both particle orderings.
inline HomState build_input_state(const InternalState& dA,
                                  const InternalState& dB,
                                  ExchangeSign x = ExchangeSign::bosons) {
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<Term> terms;
  terms.push_back(Term{cplx{r, 0.0}, {Mode::source_a, Mode::source_b}, {dA, dB}});
  terms.push_back(
      Term{cplx{eta(x) * r, 0.0}, {Mode::source_b, Mode::source_a}, {dB, dA}});
  return HomState{std::move(terms)};
}

/// Balanced lossless splitter mapping sources to detectors:
///   |A>  ->  (|D1> - |D2>)/sqrt(2)
///   |B>  ->  (|D1> + |D2>)/sqrt(2)
struct BeamSplitterConvention {
  // rows: source_a, source_b; columns: detector_1, detector_2
  std::array<std::array<cplx, 2>, 2> matrix;

  static BeamSplitterConvention standard() {
    const double r = 1.0 / std::sqrt(2.0);
    BeamSplitterConvention bs;
    bs.matrix[0] = {cplx{r, 0.0}, cplx{-r, 0.0}};
    bs.matrix[1] = {cplx{r, 0.0}, cplx{r, 0.0}};
    return bs;
  }

  double unitarity_defect() const {
    double defect = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        cplx g{0.0, 0.0};
        for (int k = 0; k < 2; ++k) g += std::conj(matrix[i][k]) * matrix[j][k];
        defect = std::max(defect, std::abs(g - (i == j ? 1.0 : 0.0)));
      }
    }
    return defect;
  }
};

/// Expands every source mode through the splitter. Internal tags ride
/// along untouched. Rejects states already expressed in detector modes.
inline HomState apply_beamsplitter(const HomState& state) {
  if (state.in_detector_basis()) {
    throw std::invalid_argument(
        "apply_beamsplitter: state already in detector basis");
  }
  const BeamSplitterConvention bs = BeamSplitterConvention::standard();
  const std::array<Mode, 2> outs{Mode::detector_1, Mode::detector_2};
  auto row = [&bs](Mode m) {
    return bs.matrix[m == Mode::source_a ? 0 : 1];
  };
  std::vector<Term> expanded;
  expanded.reserve(4 * state.terms().size());
  for (const Term& t : state.terms()) {
    const auto r0 = row(t.mode[0]);
    const auto r1 = row(t.mode[1]);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        expanded.push_back(
            Term{t.coeff * r0[i] * r1[j], {outs[i], outs[j]}, t.tag});
      }
    }
  }
  return HomState{std::move(expanded)};
}

/// Probability that particle 1 lands in m1 and particle 2 in m2, with the
/// internal tags traced out.
inline double spatial_joint_probability(const HomState& state, Mode m1, Mode m2) {
  std::vector<Term> matching;
  for (const Term& t : state.terms()) {
    if (t.mode[0] == m1 && t.mode[1] == m2) matching.push_back(t);
  }
  if (matching.empty()) return 0.0;
  return norm_squared(matching);
}

/// Coincidence evaluated directly on the expanded state. Slower than the
/// closed form but independent of it; the two must agree to 1e-12.
inline double brute_force_coincidence(const InternalState& dA,
                                      const InternalState& dB,
                                      ExchangeSign x = ExchangeSign::bosons) {
  const HomState out = apply_beamsplitter(build_input_state(dA, dB, x));
  return spatial_joint_probability(out, Mode::detector_1, Mode::detector_2) +
         spatial_joint_probability(out, Mode::detector_2, Mode::detector_1);
}

/// Closed form (1 - eta |<dA|dB>|^2) / 2: bosons dip to zero at full
/// overlap, fermions rise to one.
inline double coincidence_probability(const InternalState& dA,
                                      const InternalState& dB,
                                      ExchangeSign x = ExchangeSign::bosons) {
  const double s = overlap(dA, dB).modulus;
  return std::max(0.0, 0.5 * (1.0 - eta(x) * s * s));
}

/// Dip visibility (C_max - C_min)/C_max with C_max = 1/2 reached at zero
/// overlap. Equals |<dA|dB>|^2, which is what pairs with the
/// distinguishability to saturate the duality relation.
inline double hom_visibility(const InternalState& dA, const InternalState& dB) {
  const double c_max = 0.5;
  const double c_min = coincidence_probability(dA, dB);
  return (c_max - c_min) / c_max;
}

/// Coincidence versus relative arrival delay for Gaussian temporal
/// envelopes of rms duration sigma_t. The delayed-mode overlap is
/// exp(-tau^2 / (8 sigma_t^2)), so the dip recovers on the scale of the
/// packet duration: C(tau) = (1 - s^2 exp(-tau^2 / (4 sigma_t^2))) / 2.
inline std::vector<std::pair<double, double>> delay_scan(
    const InternalState& dA, const InternalState& dB, double sigma_t,
    const std::vector<double>& taus) {
  if (!(sigma_t > 0.0)) throw std::invalid_argument("delay_scan: sigma_t <= 0");
  const double s = overlap(dA, dB).modulus;
  std::vector<std::pair<double, double>> scan;
  scan.reserve(taus.size());
  for (double tau : taus) {
    const double m2 = std::exp(-tau * tau / (4.0 * sigma_t * sigma_t));
    scan.emplace_back(tau, 0.5 * (1.0 - s * s * m2));
  }
  return scan;
}

/// Amplitude for finding particle 1 at m1 with analyzer outcome e_m1 and
/// particle 2 at m2 with outcome e_m2.
inline cplx detection_amplitude(const HomState& state, Mode m1,
                                const InternalState& e_m1, Mode m2,
                                const InternalState& e_m2) {
  cplx amp{0.0, 0.0};
  for (const Term& t : state.terms()) {
    if (t.mode[0] != m1 || t.mode[1] != m2) continue;
    amp += t.coeff * overlap(e_m1, t.tag[0]).value * overlap(e_m2, t.tag[1]).value;
  }
  return amp;
}

/// Joint probability of a coincidence with analyzer outcome e1 behind
/// detector 1 and e2 behind detector 2 (bosonic pair). Projecting onto an
/// analyzer basis and summing the outcomes recovers the unconditioned
/// coincidence probability; individual outcomes can show the dip at full
/// depth even for orthogonal tags.
inline double eraser_joint_probability(const InternalState& dA,
                                       const InternalState& dB,
                                       const InternalState& e1,
                                       const InternalState& e2) {
  const HomState out = apply_beamsplitter(build_input_state(dA, dB));
  // Particle 1 at D1 meets analyzer e1; in the swapped ordering it sits at
  // D2 and meets e2.
  const cplx a12 =
      detection_amplitude(out, Mode::detector_1, e1, Mode::detector_2, e2);
  const cplx a21 =
      detection_amplitude(out, Mode::detector_2, e2, Mode::detector_1, e1);
  return std::norm(a12) + std::norm(a21);
}

}  // namespace tpi::hom
