#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fairaudit/datagen.h"

namespace fairaudit {

// Per-group score threshold: label = 1 iff score >= threshold of the
// record's group.
struct LabelPolicy {
  double threshold_group0 = 0.5;
  double threshold_group1 = 0.5;

  // Race-dependent thresholds: 0.3 for group 0, 0.7 for group 1.
  static constexpr LabelPolicy Biased() { return {0.3, 0.7}; }
  static constexpr LabelPolicy Unbiased() { return {0.5, 0.5}; }

  void Validate() const;
  double Threshold(Group g) const {
    return g == Group::kReference ? threshold_group0 : threshold_group1;
  }
  int Label(const ScoredRecord& r) const {
    return r.score >= Threshold(r.group) ? 1 : 0;
  }
};

// Inclusion probability per (group, score >= cutoff).
struct SamplePolicy {
  double cutoff = 0.5;
  double p_group0_high = 0.5;
  double p_group0_low = 0.5;
  double p_group1_high = 0.5;
  double p_group1_low = 0.5;

  // Keeps high-scoring group-0 records at 0.8, low-scoring at 0.2, and all
  // of group 1.
  static constexpr SamplePolicy Biased() { return {0.5, 0.8, 0.2, 1.0, 1.0}; }
  static constexpr SamplePolicy Unbiased() { return {0.5, 0.5, 0.5, 0.5, 0.5}; }
  // Deterministic variant used by unit tests.
  static constexpr SamplePolicy KeepAll() { return {0.5, 1.0, 1.0, 1.0, 1.0}; }

  void Validate() const;
  double InclusionProbability(const ScoredRecord& r) const;
};

struct LabeledRecord {
  ScoredRecord record;
  int label = 0;
};

// One cell of the 2x2 sample-bias x label-bias grid.
struct BiasSpec {
  bool sample_bias = false;
  bool label_bias = false;

  // 1 = none, 2 = sample, 3 = label, 4 = both.
  constexpr int DatasetIndex() const {
    return 1 + (sample_bias ? 1 : 0) + (label_bias ? 2 : 0);
  }
  static constexpr BiasSpec FromDatasetIndex(int index) {
    return {(index - 1) % 2 == 1, (index - 1) / 2 == 1};
  }
  bool operator==(const BiasSpec&) const = default;
};

// The policies each grid cell draws from.
struct BiasPolicies {
  LabelPolicy biased_label = LabelPolicy::Biased();
  LabelPolicy unbiased_label = LabelPolicy::Unbiased();
  SamplePolicy biased_sample = SamplePolicy::Biased();
  SamplePolicy unbiased_sample = SamplePolicy::Unbiased();
  // Minimum records per (group, label) cell of a built dataset.
  std::int64_t min_cell_count = 10;

  void Validate() const;
};

// Labels every record; order preserved.
std::vector<LabeledRecord> ApplyLabelPolicy(std::span<const ScoredRecord> pop,
                                            const LabelPolicy& policy);

// Keeps each record independently with its policy probability; order
// preserved, records copied unchanged.
std::vector<ScoredRecord> ApplySamplePolicy(std::span<const ScoredRecord> pop,
                                            const SamplePolicy& policy,
                                            std::uint64_t seed);

// counts[group][label]
struct CellCounts {
  std::int64_t counts[2][2] = {{0, 0}, {0, 0}};
};
CellCounts CountCells(std::span<const LabeledRecord> data);

// Throws DegenerateDatasetError naming the first (group, label) cell with
// fewer than `min_count` records.
void RequireCells(std::span<const LabeledRecord> data, std::int64_t min_count);

// Samples then labels per `spec`, then checks cell sizes.
std::vector<LabeledRecord> BuildDataset(std::span<const ScoredRecord> pop,
                                        const BiasSpec& spec,
                                        std::uint64_t seed,
                                        const BiasPolicies& policies = {});

// Header `id,group,score,label,f0,...`.
void WriteLabeledCsv(std::ostream& out, std::span<const LabeledRecord> data);

}  // namespace fairaudit
