#pragma once

#include <filesystem>
#include <iosfwd>

#include <nlohmann/json_fwd.hpp>

#include "fairaudit/harness.h"

namespace fairaudit {

// INI-style experiment configuration. Sections and keys mirror the config
// structs; anything omitted keeps the default for the experiment kind.
//
//   [experiment]       kind (A|B), trials, base_seed, evaluate_on
//                      (test|train|all), threads, min_cell_count
//   [population]       n_group0, n_group1, target_positive_rate_group0,
//                      target_positive_rate_group1, feature_dim,
//                      proxy_strength, noise_scale, score_concentration, seed
//   [label_bias]       threshold_group0, threshold_group1
//   [label_unbiased]   (same keys)
//   [sample_bias]      cutoff, p_group0_high, p_group0_low, p_group1_high,
//                      p_group1_low
//   [sample_unbiased]  (same keys)
//   [model]            lambda, alpha, max_iters, tolerance, train_fraction,
//                      include_group_feature, prediction_threshold
//
// Unknown sections or keys and unparsable values throw ConfigError.
ExperimentConfig ParseConfig(std::istream& in);
ExperimentConfig LoadConfig(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void to_json(nlohmann::json& j, const PopulationSpec& p);

}  // namespace fairaudit
