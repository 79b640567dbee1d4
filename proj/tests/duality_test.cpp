#include "tpi/duality.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "tpi/exchange.hpp"

namespace {

using tpi::ExchangeSign;
namespace duality = tpi::duality;

TEST(DualityCheck, HomRecordAgainstHandValues) {
  const auto [dA, dB] = tpi::test::tags_with_overlap(0.6);
  const auto rec = duality::duality_check(dA, dB, duality::Experiment::hom);
  EXPECT_NEAR(rec.overlap_modulus, 0.6, 1e-12);
  EXPECT_NEAR(rec.distinguishability, 0.64, 1e-12);
  EXPECT_NEAR(rec.visibility, 0.36, 1e-12);
  EXPECT_NEAR(rec.sum, 1.0, 1e-12);
  EXPECT_LE(rec.residual, 1e-12);
  EXPECT_EQ(rec.std_error, 0.0);
  EXPECT_STREQ(duality::to_label(rec.experiment), "HOM");
}

TEST(DualityCheck, EndpointsAreExact) {
  for (const auto ex :
       {duality::Experiment::hom, duality::Experiment::hbt_analytic}) {
    const auto [a0, b0] = tpi::test::tags_with_overlap(0.0);
    const auto r0 = duality::duality_check(a0, b0, ex);
    EXPECT_NEAR(r0.distinguishability, 1.0, 1e-12);
    EXPECT_NEAR(r0.visibility, 0.0, 1e-12);

    const auto [a1, b1] = tpi::test::tags_with_overlap(1.0);
    const auto r1 = duality::duality_check(a1, b1, ex);
    EXPECT_NEAR(r1.distinguishability, 0.0, 1e-12);
    EXPECT_NEAR(r1.visibility, 1.0, 1e-9);
  }
}

TEST(DualitySweep, HomResidualsVanishOnDenseGrid) {
  const auto records = duality::duality_sweep(101, duality::Experiment::hom);
  ASSERT_EQ(records.size(), 101u);
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_NEAR(records[i].overlap_modulus, static_cast<double>(i) / 100.0, 1e-12);
    EXPECT_LE(records[i].residual, 1e-12);
  }
  // D falls monotonically while V rises; they cross at s = 1/sqrt(2).
  for (std::size_t i = 1; i < records.size(); ++i) {
    EXPECT_LE(records[i].distinguishability,
              records[i - 1].distinguishability + 1e-15);
    EXPECT_GE(records[i].visibility, records[i - 1].visibility - 1e-15);
  }
}

TEST(DualitySweep, HbtAnalyticResidualsVanishOnDenseGrid) {
  const auto records =
      duality::duality_sweep(101, duality::Experiment::hbt_analytic);
  ASSERT_EQ(records.size(), 101u);
  for (const auto& rec : records) {
    EXPECT_LE(rec.residual, 1e-12) << "s = " << rec.overlap_modulus;
    EXPECT_STREQ(duality::to_label(rec.experiment), "HBT-analytic");
  }
}

TEST(DualitySweep, BalancePointSplitsEvenly) {
  const auto [dA, dB] = tpi::test::tags_with_overlap(1.0 / std::numbers::sqrt2);
  const auto hom_rec = duality::duality_check(dA, dB, duality::Experiment::hom);
  EXPECT_NEAR(hom_rec.distinguishability, 0.5, 1e-12);
  EXPECT_NEAR(hom_rec.visibility, 0.5, 1e-12);

  const auto hbt_rec =
      duality::duality_check(dA, dB, duality::Experiment::hbt_analytic);
  EXPECT_NEAR(hbt_rec.visibility, 0.5, 1e-9);
}

TEST(DualitySweep, SampledResidualsStayWithinErrorBars) {
  duality::SamplingPlan plan = duality::SamplingPlan::standard();
  plan.events = 50000;
  plan.seed = 5;
  const auto records =
      duality::duality_sweep(11, duality::Experiment::hbt_sampled, plan);
  ASSERT_EQ(records.size(), 11u);
  for (const auto& rec : records) {
    EXPECT_GT(rec.std_error, 0.0);
    EXPECT_LE(rec.residual, 3.0 * rec.std_error)
        << "s = " << rec.overlap_modulus << " sum = " << rec.sum;
    EXPECT_STREQ(duality::to_label(rec.experiment), "HBT-sampled");
  }
}

TEST(DualitySweep, SampledSweepIsSeedStable) {
  duality::SamplingPlan plan = duality::SamplingPlan::standard();
  plan.events = 20000;
  plan.seed = 8;
  const auto a = duality::duality_sweep(3, duality::Experiment::hbt_sampled, plan);
  const auto b = duality::duality_sweep(3, duality::Experiment::hbt_sampled, plan);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].visibility, b[i].visibility);
    EXPECT_EQ(a[i].std_error, b[i].std_error);
  }
}

TEST(DualitySweep, RejectsDegenerateGrids) {
  EXPECT_THROW(duality::duality_sweep(1, duality::Experiment::hom),
               std::invalid_argument);
  EXPECT_THROW(duality::duality_sweep(0, duality::Experiment::hom),
               std::invalid_argument);
}

}  // namespace
