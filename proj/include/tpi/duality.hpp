#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tpi/exchange.hpp"
#include "tpi/hbt.hpp"
#include "tpi/hom.hpp"
#include "tpi/internal_state.hpp"
#include "tpi/rng.hpp"
#include "tpi/sampling.hpp"
#include "tpi/wavepacket.hpp"

namespace tpi::duality {

enum class Experiment { hom, hbt_analytic, hbt_sampled };

inline const char* to_label(Experiment e) {
  switch (e) {
    case Experiment::hom: return "HOM";
    case Experiment::hbt_analytic: return "HBT-analytic";
    case Experiment::hbt_sampled: return "HBT-sampled";
  }
  return "?";
}

/// Packet geometry, event count and seed used when the visibility comes
/// from a sampled experiment (also supplies the geometry for the
/// analytic pattern).
struct SamplingPlan {
  hbt::WavepacketConfig cfg;
  ExchangeSign exchange = ExchangeSign::bosons;
  std::uint64_t events = 100000;
  std::uint64_t seed = 1;

  /// Far-spread bosonic default: x0 = 10, eps = 1, delta = 200.
  static SamplingPlan standard() {
    return SamplingPlan{hbt::WavepacketConfig::with_delta(10.0, 1.0, 200.0)};
  }
};

/// One measured point of the duality relation. `sum` and `residual`
/// record D + V and |D + V - 1|; sampled visibilities carry the
/// bootstrap standard error, exact ones leave it at zero.
struct DualityRecord {
  double overlap_modulus = 0.0;
  double distinguishability = 0.0;
  double visibility = 0.0;
  double sum = 0.0;
  double residual = 0.0;
  double std_error = 0.0;
  Experiment experiment = Experiment::hom;
};

/// Distinguishability from the tags, visibility from the chosen
/// experiment, and their sum.
inline DualityRecord duality_check(const InternalState& dA,
                                   const InternalState& dB, Experiment ex,
                                   const SamplingPlan& plan =
                                       SamplingPlan::standard()) {
  DualityRecord rec;
  rec.experiment = ex;
  rec.overlap_modulus = overlap(dA, dB).modulus;
  rec.distinguishability = distinguishability(dA, dB);
  switch (ex) {
    case Experiment::hom:
      rec.visibility = hom::hom_visibility(dA, dB);
      break;
    case Experiment::hbt_analytic: {
      hbt::AnalyticJointDensity model(plan.cfg, plan.exchange,
                                      rec.overlap_modulus);
      rec.visibility = hbt::extract_visibility(hbt::fringe_pattern(model));
      break;
    }
    case Experiment::hbt_sampled: {
      const sampling::EventBatch batch = sampling::sample_hbt(
          plan.cfg, plan.exchange, rec.overlap_modulus, plan.events, plan.seed);
      const sampling::HistogramEstimate est =
          sampling::estimate_visibility(batch, plan.cfg);
      rec.visibility = est.visibility;
      rec.std_error = est.std_error;
      break;
    }
  }
  rec.sum = rec.distinguishability + rec.visibility;
  rec.residual = std::abs(rec.sum - 1.0);
  return rec;
}

/// Sweeps the overlap modulus uniformly over [0, 1] (n_points >= 2,
/// endpoints included, fixed zero relative phase) and evaluates the
/// duality at each point. Sampled sweeps draw an independent substream
/// per point from the plan seed.
inline std::vector<DualityRecord> duality_sweep(int n_points, Experiment ex,
                                                const SamplingPlan& plan =
                                                    SamplingPlan::standard()) {
  if (n_points < 2) throw std::invalid_argument("duality_sweep: n_points < 2");
  std::vector<DualityRecord> records;
  records.reserve(n_points);
  const InternalState dA = make_state(0.0, 0.0);
  for (int i = 0; i < n_points; ++i) {
    const double s = static_cast<double>(i) / (n_points - 1);
    const InternalState dB = make_state(2.0 * std::acos(s), 0.0);
    SamplingPlan point_plan = plan;
    point_plan.seed = rng::substream_seed(plan.seed, static_cast<std::uint64_t>(i));
    records.push_back(duality_check(dA, dB, ex, point_plan));
  }
  return records;
}

}  // namespace tpi::duality
