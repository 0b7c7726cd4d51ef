#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fairaudit/bias.h"
#include "fairaudit/datagen.h"
#include "fairaudit/metrics.h"
#include "fairaudit/model.h"

namespace fairaudit {

// A: group-0 records with groups reassigned at random (balanced ground
// truth). B: the population as generated (imbalanced ground truth).
enum class ExperimentKind { kA, kB };

// Which records the fitted model is audited on.
enum class EvaluationSet { kTest, kTrain, kAll };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kA;
  PopulationSpec population;
  BiasPolicies policies;
  ModelParams model;
  int trials = 20;
  std::uint64_t base_seed = 20180101;
  EvaluationSet evaluate_on = EvaluationSet::kTest;
  // Worker threads for trials; 0 picks the hardware concurrency.
  int threads = 0;

  void Validate() const;
};

ExperimentConfig DefaultConfig(ExperimentKind kind);

// Per-trial seed: DeriveSeed(base_seed, {Stream::kTrial, dataset, trial}).
std::uint64_t TrialSeed(std::uint64_t base_seed, int dataset_index,
                        int trial_index);

// The experiment's ground-truth base dataset.
std::vector<ScoredRecord> BuildBase(const ExperimentConfig& config);

struct TrialOutcome {
  int trial = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;
  MetricReport report;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  bool converged = false;
};

// build -> split -> fit -> predict -> audit on `base`. Degenerate data and
// numerical failures are recorded in the outcome rather than thrown.
TrialOutcome RunTrial(const ExperimentConfig& config,
                      std::span<const ScoredRecord> base, const BiasSpec& spec,
                      std::uint64_t trial_seed);
// Builds the base from the config first.
TrialOutcome RunTrial(const ExperimentConfig& config, const BiasSpec& spec,
                      std::uint64_t trial_seed);

struct MetricAggregate {
  // One slot per trial; empty for failed trials and undefined values.
  std::vector<std::optional<double>> values;
  std::optional<double> mean;
  // Sample standard deviation; 0 with fewer than two defined values.
  std::optional<double> stddev;
  std::int64_t undefined_count = 0;
};

MetricAggregate Aggregate(std::vector<std::optional<double>> values,
                          std::int64_t undefined_count);

struct DatasetResult {
  BiasSpec spec;
  std::vector<TrialOutcome> trials;
  std::array<MetricAggregate, 6> metrics;
  int failed_trials = 0;

  const MetricAggregate& operator[](Metric m) const {
    return metrics[static_cast<int>(m)];
  }
};

struct ExperimentReport {
  ExperimentConfig config;
  // Datasets 1..4 at indices 0..3.
  std::array<DatasetResult, 4> datasets;

  const DatasetResult& Dataset(int index) const { return datasets[index - 1]; }
};

// Runs config.trials trials of each of the four grid cells.
// Throws ExperimentError naming the cell when all of its trials fail.
ExperimentReport RunExperiment(const ExperimentConfig& config);

struct Ranking {
  // Dataset indices (1..4), ascending |mean - fair point|, ties by index.
  std::vector<int> order;
  // Datasets without a defined mean.
  std::vector<int> excluded;
};

Ranking RankByDeviation(const std::array<std::optional<double>, 4>& means,
                        Metric metric);
Ranking RankDatasets(const ExperimentReport& report, Metric metric);

void to_json(nlohmann::json& j, const ExperimentReport& r);
// Flat rows: dataset,metric,trial,value,status.
void WriteReportCsv(std::ostream& out, const ExperimentReport& r);

std::string_view KindName(ExperimentKind k);
std::string_view EvaluationSetName(EvaluationSet e);

}  // namespace fairaudit
