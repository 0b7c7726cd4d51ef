#include "fairaudit/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fairaudit/config.h"
#include "fairaudit/csv.h"
#include "fairaudit/error.h"
#include "fairaudit/random.h"

namespace fairaudit {

std::string_view KindName(ExperimentKind k) {
  return k == ExperimentKind::kA ? "A" : "B";
}

std::string_view EvaluationSetName(EvaluationSet e) {
  switch (e) {
    case EvaluationSet::kTest:
      return "test";
    case EvaluationSet::kTrain:
      return "train";
    case EvaluationSet::kAll:
      return "all";
  }
  return "test";
}

void ExperimentConfig::Validate() const {
  population.Validate();
  policies.Validate();
  model.Validate();
  if (trials < 1) throw ValidationError("trials", "must be at least 1");
  if (threads < 0) throw ValidationError("threads", "must be nonnegative");
}

ExperimentConfig DefaultConfig(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  return c;
}

std::uint64_t TrialSeed(std::uint64_t base_seed, int dataset_index,
                        int trial_index) {
  return DeriveSeed(base_seed,
                    {Tag(Stream::kTrial), static_cast<std::uint64_t>(dataset_index),
                     static_cast<std::uint64_t>(trial_index)});
}

std::vector<ScoredRecord> BuildBase(const ExperimentConfig& config) {
  std::vector<ScoredRecord> pop = GeneratePopulation(config.population);
  if (config.kind == ExperimentKind::kB) return MakeBaseDatasetB(pop);
  return MakeBaseDatasetA(pop, config.base_seed,
                          config.population.proxy_strength);
}

TrialOutcome RunTrial(const ExperimentConfig& config,
                      std::span<const ScoredRecord> base, const BiasSpec& spec,
                      std::uint64_t trial_seed) {
  TrialOutcome out;
  out.seed = trial_seed;
  try {
    const std::vector<LabeledRecord> data =
        BuildDataset(base, spec, trial_seed, config.policies);
    const TrainTestSplit parts =
        Split(data, config.model.train_fraction, trial_seed);
    out.train_size = parts.train.size();
    out.test_size = parts.test.size();

    const Model model = Fit(parts.train, config.model);
    out.converged = model.converged;

    std::span<const LabeledRecord> audited = parts.test;
    if (config.evaluate_on == EvaluationSet::kTrain) audited = parts.train;
    if (config.evaluate_on == EvaluationSet::kAll) audited = data;

    const Predictions pred =
        Predict(model, audited, config.model.prediction_threshold);
    std::vector<Outcome> outcomes(audited.size());
    for (std::size_t i = 0; i < audited.size(); ++i) {
      outcomes[i] = {audited[i].record.group, audited[i].label,
                     pred.score_hat[i], pred.label_hat[i]};
    }
    out.report = Audit(outcomes);
  } catch (const DegenerateDatasetError& e) {
    out.failed = true;
    out.failure = std::string("degenerate dataset: ") + e.what();
  } catch (const NumericalError& e) {
    out.failed = true;
    out.failure = std::string("numerical failure: ") + e.what();
  }
  return out;
}

TrialOutcome RunTrial(const ExperimentConfig& config, const BiasSpec& spec,
                      std::uint64_t trial_seed) {
  config.Validate();
  const std::vector<ScoredRecord> base = BuildBase(config);
  return RunTrial(config, base, spec, trial_seed);
}

MetricAggregate Aggregate(std::vector<std::optional<double>> values,
                          std::int64_t undefined_count) {
  MetricAggregate agg;
  agg.values = std::move(values);
  agg.undefined_count = undefined_count;
  double sum = 0.0;
  std::int64_t n = 0;
  for (const auto& v : agg.values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return agg;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& v : agg.values) {
    if (v) ss += (*v - mean) * (*v - mean);
  }
  agg.mean = mean;
  agg.stddev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return agg;
}

ExperimentReport RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  const std::vector<ScoredRecord> base = BuildBase(config);

  ExperimentReport report;
  report.config = config;
  for (int d = 0; d < 4; ++d) {
    report.datasets[d].spec = BiasSpec::FromDatasetIndex(d + 1);
    report.datasets[d].trials.resize(static_cast<std::size_t>(config.trials));
  }

  // Results land in fixed (dataset, trial) slots, so scheduling order never
  // affects the report.
  const int jobs = 4 * config.trials;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int job = next++; job < jobs; job = next++) {
      const int d = job / config.trials;
      const int t = job % config.trials;
      TrialOutcome outcome = RunTrial(config, base, report.datasets[d].spec,
                                      TrialSeed(config.base_seed, d + 1, t));
      outcome.trial = t;
      report.datasets[d].trials[static_cast<std::size_t>(t)] =
          std::move(outcome);
    }
  };
  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, jobs);
  {
    std::vector<std::jthread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }

  for (DatasetResult& ds : report.datasets) {
    for (const TrialOutcome& t : ds.trials) ds.failed_trials += t.failed ? 1 : 0;
    if (ds.failed_trials == config.trials) {
      throw ExperimentError("every trial of dataset " +
                            std::to_string(ds.spec.DatasetIndex()) +
                            " failed; first failure: " +
                            ds.trials.front().failure);
    }
    for (Metric m : kAllMetrics) {
      std::vector<std::optional<double>> values;
      std::int64_t undefined = 0;
      for (const TrialOutcome& t : ds.trials) {
        if (t.failed) {
          values.emplace_back();
          continue;
        }
        const MetricValue& v = t.report[m];
        values.push_back(v.value);
        if (!v.value) ++undefined;
      }
      ds.metrics[static_cast<int>(m)] = Aggregate(std::move(values), undefined);
    }
  }
  return report;
}

Ranking RankByDeviation(const std::array<std::optional<double>, 4>& means,
                        Metric metric) {
  Ranking r;
  for (int d = 1; d <= 4; ++d) {
    (means[d - 1] ? r.order : r.excluded).push_back(d);
  }
  const double fair = FairPoint(metric);
  std::stable_sort(r.order.begin(), r.order.end(), [&](int a, int b) {
    return std::abs(*means[a - 1] - fair) < std::abs(*means[b - 1] - fair);
  });
  return r;
}

Ranking RankDatasets(const ExperimentReport& report, Metric metric) {
  std::array<std::optional<double>, 4> means;
  for (int d = 0; d < 4; ++d) means[d] = report.datasets[d][metric].mean;
  return RankByDeviation(means, metric);
}

namespace {

nlohmann::json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

void to_json(nlohmann::json& j, const ExperimentReport& r) {
  nlohmann::json datasets = nlohmann::json::array();
  for (const DatasetResult& ds : r.datasets) {
    nlohmann::json metrics = nlohmann::json::object();
    for (Metric m : kAllMetrics) {
      const MetricAggregate& agg = ds[m];
      nlohmann::json values = nlohmann::json::array();
      for (const auto& v : agg.values) values.push_back(OptionalJson(v));
      metrics[std::string(MetricName(m))] = {
          {"mean", OptionalJson(agg.mean)},
          {"std", OptionalJson(agg.stddev)},
          {"undefined_count", agg.undefined_count},
          {"values", std::move(values)}};
    }
    nlohmann::json trials = nlohmann::json::array();
    for (const TrialOutcome& t : ds.trials) {
      nlohmann::json tj = {{"trial", t.trial},
                           {"seed", t.seed},
                           {"failed", t.failed},
                           {"train_size", t.train_size},
                           {"test_size", t.test_size},
                           {"converged", t.converged}};
      if (t.failed) {
        tj["failure"] = t.failure;
      } else {
        tj["report"] = t.report;
      }
      trials.push_back(std::move(tj));
    }
    datasets.push_back({{"dataset", ds.spec.DatasetIndex()},
                        {"sample_bias", ds.spec.sample_bias},
                        {"label_bias", ds.spec.label_bias},
                        {"failed_trials", ds.failed_trials},
                        {"metrics", std::move(metrics)},
                        {"trials", std::move(trials)}});
  }
  j = nlohmann::json{{"experiment", KindName(r.config.kind)},
                     {"config", r.config},
                     {"datasets", std::move(datasets)}};
}

void WriteReportCsv(std::ostream& out, const ExperimentReport& r) {
  out << "dataset,metric,trial,value,status\n";
  for (const DatasetResult& ds : r.datasets) {
    for (Metric m : kAllMetrics) {
      for (const TrialOutcome& t : ds.trials) {
        out << ds.spec.DatasetIndex() << ',' << MetricName(m) << ',' << t.trial
            << ',';
        if (t.failed) {
          out << ",error\n";
          continue;
        }
        const MetricValue& v = t.report[m];
        if (v.value) out << csv::FormatReal(*v.value);
        out << ',' << StatusName(v.status) << '\n';
      }
    }
  }
}

}  // namespace fairaudit
