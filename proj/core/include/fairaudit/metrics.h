#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "fairaudit/datagen.h"

namespace fairaudit {

enum class Metric : int {
  kMeanScoreDifference = 0,
  kResidualDifference = 1,
  kEqualOpportunity = 2,
  kEqualMisopportunity = 3,
  kDisparateImpact = 4,
  kNormalizedMutualInformation = 5,
};

inline constexpr std::array<Metric, 6> kAllMetrics = {
    Metric::kMeanScoreDifference, Metric::kResidualDifference,
    Metric::kEqualOpportunity,    Metric::kEqualMisopportunity,
    Metric::kDisparateImpact,     Metric::kNormalizedMutualInformation,
};

// Stable identifiers used in reports: mean_score_diff, residual_diff,
// equal_opportunity_diff, equal_misopportunity_diff, disparate_impact, nmi.
std::string_view MetricName(Metric m);
std::optional<Metric> MetricFromName(std::string_view name);

// Value meaning non-discrimination: 1 for disparate impact, 0 otherwise.
constexpr double FairPoint(Metric m) {
  return m == Metric::kDisparateImpact ? 1.0 : 0.0;
}

// One audited record: protected group S, training label Y, continuous model
// score and thresholded prediction.
struct Outcome {
  Group group = Group::kReference;
  int label = 0;
  double score_hat = 0.0;
  int label_hat = 0;
};

// Counts n[s][y][y_hat].
struct OutcomeCounts {
  std::int64_t n[2][2][2] = {};

  static OutcomeCounts From(std::span<const Outcome> data);
  std::int64_t Total() const;
  std::int64_t GroupSize(int s) const;
  // Records of group s predicted positive.
  std::int64_t PredictedPositive(int s) const;
};

// Joint counts of (y_hat, s) with derived probabilities.
struct JointCounts {
  // n[y_hat][s]
  std::int64_t n[2][2] = {};

  static JointCounts From(std::span<const Outcome> data);
  static JointCounts From(const OutcomeCounts& counts);

  std::int64_t Total() const;
  double Joint(int y_hat, int s) const;
  double PredictionMarginal(int y_hat) const;
  double GroupMarginal(int s) const;
  // Swaps the roles of y_hat and s.
  JointCounts Transposed() const;
};

// E{score_hat | S=1} - E{score_hat | S=0}.
double MeanScoreDifference(std::span<const Outcome> data);
// E{score_hat - Y | S=1} - E{score_hat - Y | S=0}.
double ResidualDifference(std::span<const Outcome> data);
// Pr{Y_hat=1 | S=1, Y=1} - Pr{Y_hat=1 | S=0, Y=1}.
double EqualOpportunityDifference(std::span<const Outcome> data);
double EqualOpportunityDifference(const OutcomeCounts& counts);
// Pr{Y_hat=1 | S=1, Y=0} - Pr{Y_hat=1 | S=0, Y=0}.
double EqualMisopportunityDifference(std::span<const Outcome> data);
double EqualMisopportunityDifference(const OutcomeCounts& counts);
// Pr{Y_hat=1 | S=1} / Pr{Y_hat=1 | S=0}; nullopt when the denominator is 0.
std::optional<double> DisparateImpact(std::span<const Outcome> data);
std::optional<double> DisparateImpact(const OutcomeCounts& counts);

// Shannon entropy with 0 log 0 = 0. Throws ValidationError unless `dist` is
// nonnegative and sums to 1 within 1e-9.
double Entropy(std::span<const double> dist,
               double log_base = std::numbers::e);

struct NmiResult {
  double value = 0.0;
  // H(Y_hat) or H(S) was zero; value is the independence value 0.
  bool zero_entropy_margin = false;
};

// I(Y_hat; S) / sqrt(H(Y_hat) H(S)). The normalization cancels the log base.
NmiResult NormalizedMutualInformation(std::span<const Outcome> data);
NmiResult NormalizedMutualInformation(const JointCounts& joint,
                                      double log_base = std::numbers::e);

enum class MetricStatus { kOk, kUndefined, kError };
std::string_view StatusName(MetricStatus s);

struct MetricValue {
  std::optional<double> value;
  MetricStatus status = MetricStatus::kOk;
  std::string detail;
};

struct MetricReport {
  std::array<MetricValue, 6> values;
  OutcomeCounts cell_counts;

  const MetricValue& operator[](Metric m) const {
    return values[static_cast<int>(m)];
  }
  MetricValue& operator[](Metric m) { return values[static_cast<int>(m)]; }
};

// All six metrics. Failures are captured per metric; never throws for
// missing groups or empty cells.
MetricReport Audit(std::span<const Outcome> data);

void to_json(nlohmann::json& j, const MetricValue& v);
void to_json(nlohmann::json& j, const MetricReport& r);

}  // namespace fairaudit
