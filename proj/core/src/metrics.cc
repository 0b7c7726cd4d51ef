#include "fairaudit/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "fairaudit/error.h"

namespace fairaudit {
namespace {

constexpr std::array<std::string_view, 6> kNames = {
    "mean_score_diff",           "residual_diff",    "equal_opportunity_diff",
    "equal_misopportunity_diff", "disparate_impact", "nmi",
};

void CheckOutcomes(std::span<const Outcome> data) {
  if (data.empty()) throw ValidationError("data", "no records");
  for (const Outcome& o : data) {
    if ((o.label != 0 && o.label != 1) || (o.label_hat != 0 && o.label_hat != 1)) {
      throw ValidationError("label", "labels must be 0 or 1");
    }
    if (!(o.score_hat >= 0.0 && o.score_hat <= 1.0)) {
      throw ValidationError("score_hat", "must lie in [0, 1]");
    }
  }
}

void RequireGroups(const OutcomeCounts& c) {
  for (int s = 0; s < 2; ++s) {
    if (c.GroupSize(s) == 0) {
      throw UndefinedMetricError("group S=" + std::to_string(s) +
                                 " has no records");
    }
  }
}

// Pr{Y_hat=1 | S=s, Y=y}.
double ConditionalPositiveRate(const OutcomeCounts& c, int s, int y) {
  const std::int64_t denom = c.n[s][y][0] + c.n[s][y][1];
  if (denom == 0) {
    throw UndefinedMetricError("cell (S=" + std::to_string(s) +
                               ", Y=" + std::to_string(y) + ") is empty");
  }
  return static_cast<double>(c.n[s][y][1]) / static_cast<double>(denom);
}

// Group-wise means of f(outcome), S=1 minus S=0.
template <typename F>
double GroupMeanDifference(std::span<const Outcome> data, F f) {
  double sum[2] = {0.0, 0.0};
  std::int64_t count[2] = {0, 0};
  for (const Outcome& o : data) {
    sum[Index(o.group)] += f(o);
    ++count[Index(o.group)];
  }
  for (int s = 0; s < 2; ++s) {
    if (count[s] == 0) {
      throw UndefinedMetricError("group S=" + std::to_string(s) +
                                 " has no records");
    }
  }
  return sum[1] / static_cast<double>(count[1]) -
         sum[0] / static_cast<double>(count[0]);
}

}  // namespace

std::string_view MetricName(Metric m) { return kNames[static_cast<int>(m)]; }

std::optional<Metric> MetricFromName(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (MetricName(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view StatusName(MetricStatus s) {
  switch (s) {
    case MetricStatus::kOk:
      return "ok";
    case MetricStatus::kUndefined:
      return "undefined";
    case MetricStatus::kError:
      return "error";
  }
  return "error";
}

OutcomeCounts OutcomeCounts::From(std::span<const Outcome> data) {
  OutcomeCounts c;
  for (const Outcome& o : data) ++c.n[Index(o.group)][o.label][o.label_hat];
  return c;
}

std::int64_t OutcomeCounts::Total() const { return GroupSize(0) + GroupSize(1); }

std::int64_t OutcomeCounts::GroupSize(int s) const {
  return n[s][0][0] + n[s][0][1] + n[s][1][0] + n[s][1][1];
}

std::int64_t OutcomeCounts::PredictedPositive(int s) const {
  return n[s][0][1] + n[s][1][1];
}

JointCounts JointCounts::From(std::span<const Outcome> data) {
  JointCounts j;
  for (const Outcome& o : data) ++j.n[o.label_hat][Index(o.group)];
  return j;
}

JointCounts JointCounts::From(const OutcomeCounts& c) {
  JointCounts j;
  for (int s = 0; s < 2; ++s) {
    for (int y = 0; y < 2; ++y) {
      for (int yh = 0; yh < 2; ++yh) j.n[yh][s] += c.n[s][y][yh];
    }
  }
  return j;
}

std::int64_t JointCounts::Total() const {
  return n[0][0] + n[0][1] + n[1][0] + n[1][1];
}

double JointCounts::Joint(int y_hat, int s) const {
  return static_cast<double>(n[y_hat][s]) / static_cast<double>(Total());
}

double JointCounts::PredictionMarginal(int y_hat) const {
  return static_cast<double>(n[y_hat][0] + n[y_hat][1]) /
         static_cast<double>(Total());
}

double JointCounts::GroupMarginal(int s) const {
  return static_cast<double>(n[0][s] + n[1][s]) / static_cast<double>(Total());
}

JointCounts JointCounts::Transposed() const {
  JointCounts t;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) t.n[a][b] = n[b][a];
  }
  return t;
}

double MeanScoreDifference(std::span<const Outcome> data) {
  CheckOutcomes(data);
  return GroupMeanDifference(data, [](const Outcome& o) { return o.score_hat; });
}

double ResidualDifference(std::span<const Outcome> data) {
  CheckOutcomes(data);
  return GroupMeanDifference(
      data, [](const Outcome& o) { return o.score_hat - o.label; });
}

double EqualOpportunityDifference(const OutcomeCounts& c) {
  return ConditionalPositiveRate(c, 1, 1) - ConditionalPositiveRate(c, 0, 1);
}

double EqualOpportunityDifference(std::span<const Outcome> data) {
  CheckOutcomes(data);
  return EqualOpportunityDifference(OutcomeCounts::From(data));
}

double EqualMisopportunityDifference(const OutcomeCounts& c) {
  return ConditionalPositiveRate(c, 1, 0) - ConditionalPositiveRate(c, 0, 0);
}

double EqualMisopportunityDifference(std::span<const Outcome> data) {
  CheckOutcomes(data);
  return EqualMisopportunityDifference(OutcomeCounts::From(data));
}

std::optional<double> DisparateImpact(const OutcomeCounts& c) {
  RequireGroups(c);
  const double rate1 = static_cast<double>(c.PredictedPositive(1)) /
                       static_cast<double>(c.GroupSize(1));
  const double rate0 = static_cast<double>(c.PredictedPositive(0)) /
                       static_cast<double>(c.GroupSize(0));
  if (rate0 == 0.0) return std::nullopt;
  return rate1 / rate0;
}

std::optional<double> DisparateImpact(std::span<const Outcome> data) {
  CheckOutcomes(data);
  return DisparateImpact(OutcomeCounts::From(data));
}

double Entropy(std::span<const double> dist, double log_base) {
  double total = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ValidationError("dist", "probabilities must be nonnegative");
    }
    total += p;
  }
  if (dist.empty() || std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("dist", "probabilities must sum to 1");
  }
  const double log_b = std::log(log_base);
  double h = 0.0;
  for (double p : dist) {
    if (p > 0.0) h -= p * std::log(p) / log_b;
  }
  return h;
}

NmiResult NormalizedMutualInformation(const JointCounts& joint,
                                      double log_base) {
  if (joint.Total() == 0) throw ValidationError("data", "no records");
  const double pred[2] = {joint.PredictionMarginal(0),
                          joint.PredictionMarginal(1)};
  const double group[2] = {joint.GroupMarginal(0), joint.GroupMarginal(1)};
  const double h_pred = Entropy(pred, log_base);
  const double h_group = Entropy(group, log_base);
  if (h_pred == 0.0 || h_group == 0.0) return {0.0, true};

  const double log_b = std::log(log_base);
  double mi = 0.0;
  for (int yh = 0; yh < 2; ++yh) {
    for (int s = 0; s < 2; ++s) {
      const double p = joint.Joint(yh, s);
      if (p > 0.0) mi += p * std::log(p / (pred[yh] * group[s])) / log_b;
    }
  }
  return {std::clamp(mi / std::sqrt(h_pred * h_group), 0.0, 1.0), false};
}

NmiResult NormalizedMutualInformation(std::span<const Outcome> data) {
  CheckOutcomes(data);
  const OutcomeCounts c = OutcomeCounts::From(data);
  RequireGroups(c);
  return NormalizedMutualInformation(JointCounts::From(c));
}

MetricReport Audit(std::span<const Outcome> data) {
  MetricReport report;
  report.cell_counts = OutcomeCounts::From(data);

  auto run = [&](Metric m, auto&& compute) {
    MetricValue& v = report[m];
    try {
      compute(v);
    } catch (const UndefinedMetricError& e) {
      v = {std::nullopt, MetricStatus::kUndefined, e.what()};
    } catch (const Error& e) {
      v = {std::nullopt, MetricStatus::kError, e.what()};
    }
  };
  auto plain = [](double x) {
    return MetricValue{x, MetricStatus::kOk, ""};
  };

  try {
    CheckOutcomes(data);
  } catch (const Error& e) {
    for (MetricValue& v : report.values) {
      v = {std::nullopt, MetricStatus::kError, e.what()};
    }
    return report;
  }

  const OutcomeCounts& c = report.cell_counts;
  run(Metric::kMeanScoreDifference,
      [&](MetricValue& v) { v = plain(MeanScoreDifference(data)); });
  run(Metric::kResidualDifference,
      [&](MetricValue& v) { v = plain(ResidualDifference(data)); });
  run(Metric::kEqualOpportunity,
      [&](MetricValue& v) { v = plain(EqualOpportunityDifference(c)); });
  run(Metric::kEqualMisopportunity,
      [&](MetricValue& v) { v = plain(EqualMisopportunityDifference(c)); });
  run(Metric::kDisparateImpact, [&](MetricValue& v) {
    const auto di = DisparateImpact(c);
    if (di) {
      v = plain(*di);
    } else {
      v = {std::nullopt, MetricStatus::kUndefined,
           "no positive predictions in group S=0"};
    }
  });
  run(Metric::kNormalizedMutualInformation, [&](MetricValue& v) {
    RequireGroups(c);
    const NmiResult r = NormalizedMutualInformation(JointCounts::From(c));
    v = plain(r.value);
    if (r.zero_entropy_margin) v.detail = "zero-entropy margin";
  });
  return report;
}

void to_json(nlohmann::json& j, const MetricValue& v) {
  j = nlohmann::json{
      {"value", v.value ? nlohmann::json(*v.value) : nlohmann::json(nullptr)},
      {"status", StatusName(v.status)},
      {"detail", v.detail}};
}

void to_json(nlohmann::json& j, const MetricReport& r) {
  j = nlohmann::json::object();
  nlohmann::json metrics = nlohmann::json::object();
  for (Metric m : kAllMetrics) metrics[std::string(MetricName(m))] = r[m];
  j["metrics"] = std::move(metrics);
  nlohmann::json cells = nlohmann::json::array();
  for (int s = 0; s < 2; ++s) {
    for (int y = 0; y < 2; ++y) {
      for (int yh = 0; yh < 2; ++yh) {
        cells.push_back({{"group", s},
                         {"label", y},
                         {"label_hat", yh},
                         {"count", r.cell_counts.n[s][y][yh]}});
      }
    }
  }
  j["cell_counts"] = std::move(cells);
  j["n"] = r.cell_counts.Total();
}

}  // namespace fairaudit
