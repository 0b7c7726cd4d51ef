#include "fairaudit/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fairaudit/error.h"
#include "fairaudit/random.h"
#include "metric_oracle.h"

namespace fairaudit {
namespace {

using namespace testutil;

TEST(MeanScoreDifference, Examples) {
  Outcomes d = {{Group::kProtected, 0, 0.2, 0}, {Group::kProtected, 0, 0.4, 0},
                {Group::kReference, 0, 0.6, 1}, {Group::kReference, 0, 0.8, 1}};
  EXPECT_NEAR(MeanScoreDifference(d), -0.4, 1e-15);

  Outcomes same = {{Group::kProtected, 0, 0.3, 0}, {Group::kReference, 1, 0.3, 0},
                   {Group::kProtected, 1, 0.9, 1}, {Group::kReference, 0, 0.9, 1}};
  EXPECT_EQ(MeanScoreDifference(same), 0.0);

  Outcomes ones = {{Group::kProtected, 0, 1.0, 1}, {Group::kReference, 1, 1.0, 1}};
  EXPECT_EQ(MeanScoreDifference(ones), 0.0);
}

TEST(MeanScoreDifference, MissingGroupIsUndefined) {
  Outcomes d = {{Group::kReference, 0, 0.5, 1}};
  EXPECT_THROW(MeanScoreDifference(d), UndefinedMetricError);
}

TEST(ResidualDifference, Examples) {
  EXPECT_NEAR(ResidualDifference(ConfusionFixture()), -0.4, 1e-15);

  Outcomes perfect = {{Group::kProtected, 1, 1.0, 1}, {Group::kProtected, 0, 0.0, 0},
                      {Group::kReference, 1, 1.0, 1}, {Group::kReference, 0, 0.0, 0}};
  EXPECT_EQ(ResidualDifference(perfect), 0.0);
}

TEST(ResidualDifference, ConstantShiftCancels) {
  Rng rng(7);
  Outcomes d = RandomOutcomes(rng, 150);
  for (Outcome& o : d) o.score_hat *= 0.8;
  const double before = ResidualDifference(d);
  for (Outcome& o : d) o.score_hat += 0.15;
  EXPECT_NEAR(ResidualDifference(d), before, 1e-12);
}

TEST(EqualOpportunity, Examples) {
  EXPECT_NEAR(EqualOpportunityDifference(ConfusionFixture()), -0.5, 1e-15);

  Outcomes perfect = {{Group::kProtected, 1, 1.0, 1}, {Group::kProtected, 0, 0.0, 0},
                      {Group::kReference, 1, 1.0, 1}, {Group::kReference, 0, 0.0, 0}};
  EXPECT_EQ(EqualOpportunityDifference(perfect), 0.0);
}

TEST(EqualOpportunity, EmptyCellIsUndefined) {
  Outcomes d = {{Group::kProtected, 0, 0.2, 0}, {Group::kReference, 1, 0.7, 1}};
  try {
    EqualOpportunityDifference(d);
    FAIL() << "expected UndefinedMetricError";
  } catch (const UndefinedMetricError& e) {
    EXPECT_NE(std::string(e.what()).find("S=1, Y=1"), std::string::npos);
  }
}

TEST(EqualMisopportunity, Examples) {
  EXPECT_NEAR(EqualMisopportunityDifference(ConfusionFixture()), -0.3, 1e-15);

  Outcomes all_zero;
  AddMany(all_zero, Group::kProtected, 0, 0, 3);
  AddMany(all_zero, Group::kProtected, 1, 0, 3);
  AddMany(all_zero, Group::kReference, 0, 0, 3);
  AddMany(all_zero, Group::kReference, 1, 0, 3);
  EXPECT_EQ(EqualMisopportunityDifference(all_zero), 0.0);

  Outcomes no_negatives_in_s0 = {{Group::kProtected, 0, 0.2, 0},
                                 {Group::kReference, 1, 0.7, 1}};
  EXPECT_THROW(EqualMisopportunityDifference(no_negatives_in_s0),
               UndefinedMetricError);
}

TEST(DisparateImpact, Examples) {
  const auto di = DisparateImpact(ConfusionFixture());
  ASSERT_TRUE(di.has_value());
  EXPECT_NEAR(*di, 3.0 / 7.0, 1e-15);

  Outcomes equal;
  AddMany(equal, Group::kProtected, 0, 1, 2);
  AddMany(equal, Group::kProtected, 0, 0, 3);
  AddMany(equal, Group::kReference, 1, 1, 4);
  AddMany(equal, Group::kReference, 1, 0, 6);
  EXPECT_DOUBLE_EQ(*DisparateImpact(equal), 1.0);

  Outcomes zero_denominator;
  AddMany(zero_denominator, Group::kProtected, 1, 1, 2);
  AddMany(zero_denominator, Group::kReference, 1, 0, 2);
  EXPECT_FALSE(DisparateImpact(zero_denominator).has_value());

  Outcomes both_zero;
  AddMany(both_zero, Group::kProtected, 1, 0, 2);
  AddMany(both_zero, Group::kReference, 1, 0, 2);
  EXPECT_FALSE(DisparateImpact(both_zero).has_value());
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(Entropy(std::vector<double>{0.5, 0.5}), std::log(2.0), 1e-15);
  EXPECT_EQ(Entropy(std::vector<double>{1.0, 0.0}), 0.0);
  // -0.9 ln 0.9 - 0.1 ln 0.1
  EXPECT_NEAR(Entropy(std::vector<double>{0.9, 0.1}), 0.325082973391448, 1e-12);
  EXPECT_NEAR(Entropy(std::vector<double>{0.9, 0.1}), 0.3251, 5e-5);
}

TEST(Entropy, RejectsInvalidDistributions) {
  EXPECT_THROW(Entropy(std::vector<double>{0.5, 0.6}), ValidationError);
  EXPECT_THROW(Entropy(std::vector<double>{1.2, -0.2}), ValidationError);
  EXPECT_THROW(Entropy(std::vector<double>{}), ValidationError);
}

TEST(NormalizedMutualInformation, Examples) {
  Outcomes identical;
  AddMany(identical, Group::kProtected, 0, 1, 50);
  AddMany(identical, Group::kReference, 0, 0, 50);
  EXPECT_NEAR(NormalizedMutualInformation(identical).value, 1.0, 1e-12);

  JointCounts product;
  product.n[1][1] = 12;  // Pr{y_hat=1}=0.4, Pr{s=1}=0.3 on 100 records
  product.n[1][0] = 28;
  product.n[0][1] = 18;
  product.n[0][0] = 42;
  EXPECT_NEAR(NormalizedMutualInformation(product).value, 0.0, 1e-12);

  JointCounts j;
  j.n[1][1] = 30;
  j.n[0][1] = 70;
  j.n[1][0] = 70;
  j.n[0][0] = 30;
  // MI = 0.3 ln 0.6 + 0.7 ln 1.4, normalized by ln 2.
  const double expected =
      (0.3 * std::log(0.6) + 0.7 * std::log(1.4)) / std::log(2.0);
  EXPECT_NEAR(NormalizedMutualInformation(j).value, expected, 1e-12);
  EXPECT_NEAR(NormalizedMutualInformation(j).value, 0.1187, 1e-4);
}

TEST(NormalizedMutualInformation, ZeroEntropyMarginIsFlaggedZero) {
  Outcomes constant;
  AddMany(constant, Group::kProtected, 0, 1, 5);
  AddMany(constant, Group::kReference, 1, 1, 5);
  const NmiResult r = NormalizedMutualInformation(constant);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.zero_entropy_margin);
  EXPECT_THROW(NormalizedMutualInformation(JointCounts{}), ValidationError);
}

TEST(Audit, FixtureReport) {
  const MetricReport r = Audit(ConfusionFixture());
  EXPECT_NEAR(*r[Metric::kEqualOpportunity].value, -0.5, 1e-15);
  EXPECT_NEAR(*r[Metric::kEqualMisopportunity].value, -0.3, 1e-15);
  EXPECT_NEAR(*r[Metric::kDisparateImpact].value, 3.0 / 7.0, 1e-15);
  EXPECT_NEAR(*r[Metric::kResidualDifference].value, -0.4, 1e-15);
  EXPECT_NEAR(*r[Metric::kMeanScoreDifference].value, -0.4, 1e-15);
  EXPECT_NEAR(*r[Metric::kNormalizedMutualInformation].value, 0.1187, 1e-3);
  for (const MetricValue& v : r.values) EXPECT_EQ(v.status, MetricStatus::kOk);
  EXPECT_EQ(r.cell_counts.Total(), 200);
  EXPECT_EQ(r.cell_counts.n[1][1][1], 20);
  EXPECT_EQ(r.cell_counts.n[0][0][1], 25);
}

TEST(Audit, SingleGroupGivesPartialReport) {
  Outcomes d;
  AddMany(d, Group::kReference, 1, 1, 4);
  AddMany(d, Group::kReference, 0, 0, 4);
  const MetricReport r = Audit(d);
  for (Metric m : kAllMetrics) {
    EXPECT_FALSE(r[m].value.has_value()) << MetricName(m);
    EXPECT_NE(r[m].status, MetricStatus::kOk) << MetricName(m);
    EXPECT_FALSE(r[m].detail.empty());
  }
}

TEST(Audit, UndefinedDisparateImpactIsReportedNotThrown) {
  Outcomes d;
  AddMany(d, Group::kProtected, 1, 1, 3);
  AddMany(d, Group::kProtected, 0, 0, 3);
  AddMany(d, Group::kReference, 1, 0, 3);
  AddMany(d, Group::kReference, 0, 0, 3);
  const MetricReport r = Audit(d);
  EXPECT_EQ(r[Metric::kDisparateImpact].status, MetricStatus::kUndefined);
  EXPECT_EQ(r[Metric::kEqualOpportunity].status, MetricStatus::kOk);
}

TEST(Audit, EmptyInputIsAnError) {
  const MetricReport r = Audit({});
  for (const MetricValue& v : r.values) EXPECT_EQ(v.status, MetricStatus::kError);
}

TEST(Audit, JsonCarriesStatusPerMetric) {
  Outcomes d;
  AddMany(d, Group::kProtected, 1, 1, 3);
  AddMany(d, Group::kProtected, 0, 0, 3);
  AddMany(d, Group::kReference, 1, 0, 3);
  AddMany(d, Group::kReference, 0, 0, 3);
  const nlohmann::json j = Audit(d);
  const auto& di = j.at("metrics").at("disparate_impact");
  EXPECT_TRUE(di.at("value").is_null());
  EXPECT_EQ(di.at("status"), "undefined");
  EXPECT_TRUE(di.at("detail").is_string());
  EXPECT_EQ(j.at("metrics").at("equal_opportunity_diff").at("status"), "ok");
  EXPECT_EQ(j.at("cell_counts").size(), 8u);
}

TEST(MetricProperties, MatchBruteForceOracle) {
  Rng rng(2024);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const Outcomes d = RandomOutcomes(rng, 1 + rng.Below(200));
    const MetricReport r = Audit(d);
    const oracle::Result expected[6] = {
        oracle::MeanDiff(d, false), oracle::MeanDiff(d, true),
        oracle::RateDiff(d, 1),     oracle::RateDiff(d, 0),
        oracle::Di(d),              oracle::Nmi(d)};
    for (Metric m : kAllMetrics) {
      const oracle::Result& e = expected[static_cast<int>(m)];
      ASSERT_EQ(r[m].value.has_value(), e.defined)
          << MetricName(m) << " rep " << rep;
      if (e.defined) worst = std::max(worst, std::abs(*r[m].value - e.value));
    }
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(MetricProperties, SwappingGroupsNegatesDifferencesAndInvertsDi) {
  Rng rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    Outcomes d = RandomOutcomes(rng, 60 + rng.Below(100));
    const MetricReport before = Audit(d);
    for (Outcome& o : d) {
      o.group = o.group == Group::kProtected ? Group::kReference : Group::kProtected;
    }
    const MetricReport after = Audit(d);
    for (Metric m : {Metric::kMeanScoreDifference, Metric::kResidualDifference,
                     Metric::kEqualOpportunity, Metric::kEqualMisopportunity}) {
      if (!before[m].value) continue;
      EXPECT_NEAR(*after[m].value, -*before[m].value, 1e-12) << MetricName(m);
    }
    const auto& di0 = before[Metric::kDisparateImpact].value;
    const auto& di1 = after[Metric::kDisparateImpact].value;
    if (di0 && di1 && *di0 > 0) EXPECT_NEAR(*di1, 1.0 / *di0, 1e-12);
    EXPECT_NEAR(*after[Metric::kNormalizedMutualInformation].value,
                *before[Metric::kNormalizedMutualInformation].value, 1e-12);
  }
}

TEST(MetricProperties, NmiSymmetricBaseInvariantAndBounded) {
  Rng rng(5);
  for (int rep = 0; rep < 1000; ++rep) {
    JointCounts j;
    for (auto& row : j.n) {
      for (auto& c : row) c = static_cast<std::int64_t>(rng.Below(60));
    }
    if (j.Total() == 0) continue;
    const NmiResult r = NormalizedMutualInformation(j);
    EXPECT_GE(r.value, 0.0);
    EXPECT_LE(r.value, 1.0);
    EXPECT_NEAR(NormalizedMutualInformation(j.Transposed()).value, r.value, 1e-12);
    EXPECT_NEAR(NormalizedMutualInformation(j, 2.0).value, r.value, 1e-12);
    EXPECT_NEAR(NormalizedMutualInformation(j, 10.0).value, r.value, 1e-12);
  }
}

TEST(MetricProperties, ProductJointGivesZeroNmi) {
  Rng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const std::int64_t a = 1 + rng.Below(30), b = 1 + rng.Below(30);
    const std::int64_t c = 1 + rng.Below(30), e = 1 + rng.Below(30);
    JointCounts j;  // rank-one count table
    j.n[0][0] = a * c;
    j.n[0][1] = a * e;
    j.n[1][0] = b * c;
    j.n[1][1] = b * e;
    EXPECT_NEAR(NormalizedMutualInformation(j).value, 0.0, 1e-12);
  }
}

TEST(MetricProperties, PermutationInvariant) {
  Rng rng(3);
  Outcomes d = RandomOutcomes(rng, 180);
  const MetricReport before = Audit(d);
  for (std::size_t i = d.size() - 1; i > 0; --i) std::swap(d[i], d[rng.Below(i + 1)]);
  const MetricReport after = Audit(d);
  for (Metric m : kAllMetrics) {
    ASSERT_EQ(before[m].value.has_value(), after[m].value.has_value());
    if (before[m].value) EXPECT_NEAR(*after[m].value, *before[m].value, 1e-12);
  }
}

TEST(MetricProperties, CountMetricsReproduceFromCellCounts) {
  Rng rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const Outcomes d = RandomOutcomes(rng, 40 + rng.Below(160));
    const MetricReport r = Audit(d);
    const OutcomeCounts& c = r.cell_counts;
    EXPECT_EQ(*r[Metric::kEqualOpportunity].value, EqualOpportunityDifference(c));
    EXPECT_EQ(*r[Metric::kEqualMisopportunity].value,
              EqualMisopportunityDifference(c));
    EXPECT_EQ(r[Metric::kDisparateImpact].value, DisparateImpact(c));
    EXPECT_EQ(*r[Metric::kNormalizedMutualInformation].value,
              NormalizedMutualInformation(JointCounts::From(c)).value);
  }
}

TEST(MetricNames, RoundTrip) {
  for (Metric m : kAllMetrics) EXPECT_EQ(MetricFromName(MetricName(m)), m);
  EXPECT_FALSE(MetricFromName("accuracy").has_value());
  EXPECT_EQ(FairPoint(Metric::kDisparateImpact), 1.0);
  EXPECT_EQ(FairPoint(Metric::kNormalizedMutualInformation), 0.0);
}

}  // namespace
}  // namespace fairaudit
