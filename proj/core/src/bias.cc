#include "fairaudit/bias.h"

#include <cmath>
#include <ostream>
#include <string>

#include "fairaudit/csv.h"
#include "fairaudit/error.h"
#include "fairaudit/random.h"

namespace fairaudit {
namespace {

void RequireUnit(double v, const char* field) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(field, "must lie in [0, 1]");
}

}  // namespace

void LabelPolicy::Validate() const {
  RequireUnit(threshold_group0, "threshold_group0");
  RequireUnit(threshold_group1, "threshold_group1");
}

void SamplePolicy::Validate() const {
  RequireUnit(cutoff, "cutoff");
  RequireUnit(p_group0_high, "p_group0_high");
  RequireUnit(p_group0_low, "p_group0_low");
  RequireUnit(p_group1_high, "p_group1_high");
  RequireUnit(p_group1_low, "p_group1_low");
}

double SamplePolicy::InclusionProbability(const ScoredRecord& r) const {
  const bool high = r.score >= cutoff;
  if (r.group == Group::kReference) return high ? p_group0_high : p_group0_low;
  return high ? p_group1_high : p_group1_low;
}

void BiasPolicies::Validate() const {
  biased_label.Validate();
  unbiased_label.Validate();
  biased_sample.Validate();
  unbiased_sample.Validate();
  if (min_cell_count < 0) {
    throw ValidationError("min_cell_count", "must be nonnegative");
  }
}

std::vector<LabeledRecord> ApplyLabelPolicy(std::span<const ScoredRecord> pop,
                                            const LabelPolicy& policy) {
  std::vector<LabeledRecord> out;
  out.reserve(pop.size());
  for (const ScoredRecord& r : pop) out.push_back({r, policy.Label(r)});
  return out;
}

std::vector<ScoredRecord> ApplySamplePolicy(std::span<const ScoredRecord> pop,
                                            const SamplePolicy& policy,
                                            std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, {Tag(Stream::kSample)}));
  std::vector<ScoredRecord> out;
  for (const ScoredRecord& r : pop) {
    // One draw per record keeps the stream aligned regardless of outcome.
    if (rng.Bernoulli(policy.InclusionProbability(r))) out.push_back(r);
  }
  return out;
}

CellCounts CountCells(std::span<const LabeledRecord> data) {
  CellCounts c;
  for (const LabeledRecord& r : data) ++c.counts[Index(r.record.group)][r.label];
  return c;
}

void RequireCells(std::span<const LabeledRecord> data, std::int64_t min_count) {
  const CellCounts c = CountCells(data);
  for (int g = 0; g < 2; ++g) {
    for (int y = 0; y < 2; ++y) {
      if (c.counts[g][y] < min_count) {
        throw DegenerateDatasetError(
            "cell (group=" + std::to_string(g) + ", label=" +
            std::to_string(y) + ") has " + std::to_string(c.counts[g][y]) +
            " records, need at least " + std::to_string(min_count));
      }
    }
  }
}

std::vector<LabeledRecord> BuildDataset(std::span<const ScoredRecord> pop,
                                        const BiasSpec& spec,
                                        std::uint64_t seed,
                                        const BiasPolicies& policies) {
  policies.Validate();
  const SamplePolicy& sampling =
      spec.sample_bias ? policies.biased_sample : policies.unbiased_sample;
  const LabelPolicy& labeling =
      spec.label_bias ? policies.biased_label : policies.unbiased_label;
  const std::vector<ScoredRecord> kept = ApplySamplePolicy(pop, sampling, seed);
  std::vector<LabeledRecord> data = ApplyLabelPolicy(kept, labeling);
  RequireCells(data, policies.min_cell_count);
  return data;
}

void WriteLabeledCsv(std::ostream& out, std::span<const LabeledRecord> data) {
  const std::size_t d = data.empty() ? 0 : data.front().record.features.size();
  out << "id,group,score,label";
  for (std::size_t j = 0; j < d; ++j) out << ",f" << j;
  out << '\n';
  for (const LabeledRecord& r : data) {
    out << r.record.id << ',' << Index(r.record.group) << ','
        << csv::FormatReal(r.record.score) << ',' << r.label;
    for (double f : r.record.features) out << ',' << csv::FormatReal(f);
    out << '\n';
  }
}

}  // namespace fairaudit
