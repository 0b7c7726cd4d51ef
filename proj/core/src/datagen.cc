#include "fairaudit/datagen.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "fairaudit/csv.h"
#include "fairaudit/error.h"
#include "fairaudit/random.h"

namespace fairaudit {
namespace {

constexpr double kLogitClamp = 1e-6;

void Require(bool ok, const char* field, const char* message) {
  if (!ok) throw ValidationError(field, message);
}

// Proxy feature: unit-variance mix of the standardized group indicator and
// N(0,1) noise. Its correlation with the group is `strength`.
double ProxyValue(Group g, double group1_fraction, double strength,
                  double noise) {
  const double sd = std::sqrt(group1_fraction * (1.0 - group1_fraction));
  const double centered =
      sd > 0.0 ? (Index(g) - group1_fraction) / sd : 0.0;
  return strength * centered + std::sqrt(1.0 - strength * strength) * noise;
}

}  // namespace

void PopulationSpec::Validate() const {
  Require(n_group0 > 0, "n_group0", "must be positive");
  Require(n_group1 > 0, "n_group1", "must be positive");
  Require(target_positive_rate_group0 > 0.0 && target_positive_rate_group0 < 1.0,
          "target_positive_rate_group0", "must lie strictly inside (0, 1)");
  Require(target_positive_rate_group1 > 0.0 && target_positive_rate_group1 < 1.0,
          "target_positive_rate_group1", "must lie strictly inside (0, 1)");
  Require(feature_dim >= 2, "feature_dim",
          "needs at least one informative feature and the proxy");
  Require(proxy_strength >= 0.0 && proxy_strength <= 1.0, "proxy_strength",
          "must lie in [0, 1]");
  Require(noise_scale > 0.0 && std::isfinite(noise_scale), "noise_scale",
          "must be positive and finite");
  Require(score_concentration > 0.0 && std::isfinite(score_concentration),
          "score_concentration", "must be positive and finite");
}

double MassAboveHalf(const BetaShape& shape) {
  return boost::math::ibetac(shape.a, shape.b, 0.5);
}

BetaShape SolveScoreShape(double positive_rate, double concentration) {
  if (!(positive_rate > 0.0 && positive_rate < 1.0)) {
    throw ValidationError("positive_rate", "must lie strictly inside (0, 1)");
  }
  if (!(concentration > 0.0)) {
    throw ValidationError("concentration", "must be positive");
  }
  // Mass above 0.5 increases with the mean at fixed concentration.
  double lo = 1e-9;
  double hi = 1.0 - 1e-9;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    const BetaShape s{mid * concentration, (1.0 - mid) * concentration};
    if (MassAboveHalf(s) < positive_rate) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double mean = 0.5 * (lo + hi);
  return {mean * concentration, (1.0 - mean) * concentration};
}

double ClampedLogit(double score) noexcept {
  const double p = std::clamp(score, kLogitClamp, 1.0 - kLogitClamp);
  return std::log(p / (1.0 - p));
}

std::vector<ScoredRecord> GeneratePopulation(const PopulationSpec& spec) {
  spec.Validate();
  const BetaShape shapes[2] = {
      SolveScoreShape(spec.target_positive_rate_group0,
                      spec.score_concentration),
      SolveScoreShape(spec.target_positive_rate_group1,
                      spec.score_concentration),
  };

  const int d = spec.feature_dim;
  std::vector<double> loadings(d - 1);
  Rng loading_rng(DeriveSeed(spec.seed, {Tag(Stream::kLoadings)}));
  for (double& a : loadings) a = 0.5 + loading_rng.Uniform();

  Rng score_rng(DeriveSeed(spec.seed, {Tag(Stream::kScores)}));
  Rng feature_rng(DeriveSeed(spec.seed, {Tag(Stream::kFeatures)}));

  const std::int64_t n = spec.n_group0 + spec.n_group1;
  const double group1_fraction =
      static_cast<double>(spec.n_group1) / static_cast<double>(n);

  std::vector<ScoredRecord> pop;
  pop.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    ScoredRecord r;
    r.id = i;
    r.group = i < spec.n_group0 ? Group::kReference : Group::kProtected;
    const BetaShape& shape = shapes[Index(r.group)];
    r.score = std::clamp(
        boost::math::ibeta_inv(shape.a, shape.b, score_rng.UniformOpen()), 0.0,
        1.0);
    const double logit = ClampedLogit(r.score);
    r.features.resize(d);
    for (int j = 0; j < d - 1; ++j) {
      r.features[j] = loadings[j] * logit + spec.noise_scale * feature_rng.Normal();
    }
    r.features[d - 1] = ProxyValue(r.group, group1_fraction,
                                   spec.proxy_strength, feature_rng.Normal());
    pop.push_back(std::move(r));
  }
  return pop;
}

std::vector<ScoredRecord> MakeBaseDatasetA(std::span<const ScoredRecord> pop,
                                           std::uint64_t seed,
                                           double proxy_strength) {
  if (!(proxy_strength >= 0.0 && proxy_strength <= 1.0)) {
    throw ValidationError("proxy_strength", "must lie in [0, 1]");
  }
  std::vector<ScoredRecord> base;
  for (const ScoredRecord& r : pop) {
    if (r.group == Group::kReference) base.push_back(r);
  }
  if (base.empty()) {
    throw DegenerateDatasetError(
        "experiment A base: population has no group-0 records to select");
  }

  Rng rng(DeriveSeed(seed, {Tag(Stream::kReassign)}));
  std::int64_t n_group1 = 0;
  for (ScoredRecord& r : base) {
    r.group = rng.Bernoulli(0.5) ? Group::kProtected : Group::kReference;
    n_group1 += Index(r.group);
  }
  const double group1_fraction =
      static_cast<double>(n_group1) / static_cast<double>(base.size());
  for (ScoredRecord& r : base) {
    if (r.features.empty()) continue;
    r.features.back() =
        ProxyValue(r.group, group1_fraction, proxy_strength, rng.Normal());
  }
  return base;
}

std::vector<ScoredRecord> MakeBaseDatasetB(std::span<const ScoredRecord> pop) {
  return {pop.begin(), pop.end()};
}

double PopulationSummary::PositiveRate(Group g) const {
  const std::int64_t n = GroupSize(g);
  return n == 0 ? 0.0
                : static_cast<double>(counts[Index(g)][1]) /
                      static_cast<double>(n);
}

PopulationSummary Summarize(std::span<const ScoredRecord> pop,
                            double threshold) {
  PopulationSummary s;
  for (const ScoredRecord& r : pop) {
    ++s.counts[Index(r.group)][r.score >= threshold ? 1 : 0];
  }
  return s;
}

void WritePopulationCsv(std::ostream& out, std::span<const ScoredRecord> pop) {
  const std::size_t d = pop.empty() ? 0 : pop.front().features.size();
  out << "id,group,score";
  for (std::size_t j = 0; j < d; ++j) out << ",f" << j;
  out << '\n';
  for (const ScoredRecord& r : pop) {
    out << r.id << ',' << Index(r.group) << ',' << csv::FormatReal(r.score);
    for (double f : r.features) out << ',' << csv::FormatReal(f);
    out << '\n';
  }
}

std::vector<ScoredRecord> ReadPopulationCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty population file", 1);
  const auto header = csv::SplitRow(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "group" ||
      header[2] != "score") {
    throw DataError("header must start with id,group,score", 1);
  }
  const std::size_t d = header.size() - 3;
  for (std::size_t j = 0; j < d; ++j) {
    if (header[3 + j] != "f" + std::to_string(j)) {
      throw DataError("feature columns must be named f0..f{d-1}", 1);
    }
  }

  std::vector<ScoredRecord> pop;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::SplitRow(line);
    if (fields.size() != header.size()) {
      throw DataError("expected " + std::to_string(header.size()) +
                          " columns, got " + std::to_string(fields.size()),
                      lineno);
    }
    ScoredRecord r;
    r.id = csv::ParseInt(fields[0], lineno);
    r.group = GroupFromIndex(csv::ParseBit(fields[1], lineno));
    r.score = csv::ParseReal(fields[2], lineno);
    if (r.score < 0.0 || r.score > 1.0) {
      throw DataError("score outside [0, 1]", lineno);
    }
    r.features.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
      r.features.push_back(csv::ParseReal(fields[3 + j], lineno));
    }
    pop.push_back(std::move(r));
  }
  return pop;
}

}  // namespace fairaudit
