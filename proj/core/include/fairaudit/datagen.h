#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace fairaudit {

// Binary protected attribute. kProtected is S = 1.
enum class Group : std::uint8_t { kReference = 0, kProtected = 1 };

constexpr int Index(Group g) noexcept { return static_cast<int>(g); }
constexpr Group GroupFromIndex(int i) noexcept {
  return i == 0 ? Group::kReference : Group::kProtected;
}

// One individual with a ground-truth likelihood score in [0, 1].
struct ScoredRecord {
  std::int64_t id = 0;
  Group group = Group::kReference;
  double score = 0.0;
  std::vector<double> features;

  bool operator==(const ScoredRecord&) const = default;
};

// Parameters of a synthetic population. The last feature column is the
// group proxy; the others are noisy linear functions of logit(score).
struct PopulationSpec {
  std::int64_t n_group0 = 39780;
  std::int64_t n_group1 = 3551;
  double target_positive_rate_group0 = 64536.0 / 119340.0;
  double target_positive_rate_group1 = 1296.0 / 10653.0;
  int feature_dim = 2;
  double proxy_strength = 0.95;
  double noise_scale = 3.0;
  // a + b of the per-group Beta score distribution.
  double score_concentration = 0.5;
  std::uint64_t seed = 20180101;

  // Throws ValidationError naming the first invalid field.
  void Validate() const;
};

// Beta(a, b) parameters for one group's score distribution.
struct BetaShape {
  double a = 1.0;
  double b = 1.0;
};

// Finds Beta(m*k, (1-m)*k), k = concentration, whose mass on [0.5, 1] equals
// `positive_rate`. Bisection on the mean m.
BetaShape SolveScoreShape(double positive_rate, double concentration);

// Pr{score >= 0.5} under `shape`.
double MassAboveHalf(const BetaShape& shape);

// Clamps to [1e-6, 1 - 1e-6] before taking the log-odds.
double ClampedLogit(double score) noexcept;

// Generates n_group0 group-0 records followed by n_group1 group-1 records.
// Fully determined by spec.seed.
std::vector<ScoredRecord> GeneratePopulation(const PopulationSpec& spec);

// Keeps only group-0 records and reassigns each one's group by a fair coin.
// The proxy column is redrawn against the new groups at `proxy_strength`;
// scores and the score-driven features are left untouched.
// Throws DegenerateDatasetError when pop has no group-0 record.
std::vector<ScoredRecord> MakeBaseDatasetA(std::span<const ScoredRecord> pop,
                                           std::uint64_t seed,
                                           double proxy_strength);

// Identity: the population itself is the ground truth.
std::vector<ScoredRecord> MakeBaseDatasetB(std::span<const ScoredRecord> pop);

// Table-shaped summary: counts per (group, score >= threshold).
struct PopulationSummary {
  // counts[group][positive]
  std::int64_t counts[2][2] = {{0, 0}, {0, 0}};

  std::int64_t GroupSize(Group g) const {
    return counts[Index(g)][0] + counts[Index(g)][1];
  }
  double PositiveRate(Group g) const;
};

PopulationSummary Summarize(std::span<const ScoredRecord> pop,
                            double threshold = 0.5);

// Header `id,group,score,f0,...,f{d-1}`.
void WritePopulationCsv(std::ostream& out, std::span<const ScoredRecord> pop);
// Inverse of WritePopulationCsv. Throws DataError with the offending line.
std::vector<ScoredRecord> ReadPopulationCsv(std::istream& in);

}  // namespace fairaudit
