#include "fairaudit/config.h"

#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fairaudit/error.h"

namespace fairaudit {
namespace {

ExperimentConfig Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseConfig(in);
}

TEST(ParseConfig, EmptyInputKeepsDefaults) {
  const ExperimentConfig c = Parse("");
  const ExperimentConfig d = DefaultConfig(ExperimentKind::kA);
  EXPECT_EQ(nlohmann::json(c).dump(), nlohmann::json(d).dump());
}

TEST(ParseConfig, ReadsEverySection) {
  const ExperimentConfig c = Parse(R"(
[experiment]
kind = B
trials = 7
base_seed = 99
evaluate_on = all
threads = 3
min_cell_count = 4

[population]
n_group0 = 1000
n_group1 = 200
feature_dim = 6
proxy_strength = 0.25
seed = 5

[label_bias]
threshold_group0 = 0.35
threshold_group1 = 0.65

[sample_bias]
p_group0_high = 0.9

[model]
lambda = 0.01
include_group_feature = true
)");
  EXPECT_EQ(c.kind, ExperimentKind::kB);
  EXPECT_EQ(c.trials, 7);
  EXPECT_EQ(c.base_seed, 99u);
  EXPECT_EQ(c.evaluate_on, EvaluationSet::kAll);
  EXPECT_EQ(c.threads, 3);
  EXPECT_EQ(c.policies.min_cell_count, 4);
  EXPECT_EQ(c.population.n_group0, 1000);
  EXPECT_EQ(c.population.n_group1, 200);
  EXPECT_EQ(c.population.feature_dim, 6);
  EXPECT_EQ(c.population.proxy_strength, 0.25);
  EXPECT_EQ(c.population.seed, 5u);
  EXPECT_EQ(c.policies.biased_label.threshold_group0, 0.35);
  EXPECT_EQ(c.policies.biased_label.threshold_group1, 0.65);
  EXPECT_EQ(c.policies.biased_sample.p_group0_high, 0.9);
  EXPECT_EQ(c.policies.biased_sample.p_group0_low, 0.2);
  EXPECT_EQ(c.model.lambda, 0.01);
  EXPECT_TRUE(c.model.include_group_feature);
}

TEST(ParseConfig, UnknownKeyOrSection) {
  EXPECT_THROW(Parse("[model]\nlamda = 0.1\n"), ConfigError);
  EXPECT_THROW(Parse("[modle]\nlambda = 0.1\n"), ConfigError);
}

TEST(ParseConfig, BadValues) {
  EXPECT_THROW(Parse("[experiment]\ntrials = many\n"), ConfigError);
  EXPECT_THROW(Parse("[experiment]\nkind = C\n"), ConfigError);
  EXPECT_THROW(Parse("[experiment]\nevaluate_on = holdout\n"), ConfigError);
  EXPECT_THROW(Parse("[model]\nalpha = 0.5x\n"), ConfigError);
  EXPECT_THROW(Parse("[model]\ninclude_group_feature = maybe\n"), ConfigError);
}

TEST(ParseConfig, ValidationFailuresBecomeConfigErrors) {
  EXPECT_THROW(Parse("[experiment]\ntrials = 0\n"), ConfigError);
  EXPECT_THROW(Parse("[model]\nalpha = 2\n"), ConfigError);
  EXPECT_THROW(Parse("[label_bias]\nthreshold_group0 = 1.5\n"), ConfigError);
  EXPECT_THROW(Parse("[population]\nn_group1 = 0\n"), ConfigError);
}

TEST(LoadConfig, MissingFile) {
  EXPECT_THROW(LoadConfig("/nonexistent/fairaudit.cfg"), ConfigError);
}

TEST(LoadConfig, BundledConfigsMatchDefaults) {
  const std::string dir = FAIRAUDIT_CONFIG_DIR;
  const ExperimentConfig a = LoadConfig(dir + "/experiment_A.cfg");
  const ExperimentConfig b = LoadConfig(dir + "/experiment_B.cfg");
  EXPECT_EQ(a.kind, ExperimentKind::kA);
  EXPECT_EQ(b.kind, ExperimentKind::kB);
  EXPECT_EQ(nlohmann::json(a).dump(),
            nlohmann::json(DefaultConfig(ExperimentKind::kA)).dump());
  EXPECT_EQ(nlohmann::json(b).dump(),
            nlohmann::json(DefaultConfig(ExperimentKind::kB)).dump());
}

}  // namespace
}  // namespace fairaudit
