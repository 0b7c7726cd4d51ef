#include "fairaudit/config.h"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "fairaudit/error.h"

namespace fairaudit {
namespace {

namespace pt = boost::property_tree;

class SectionReader {
 public:
  SectionReader(const pt::ptree& root, const std::string& name)
      : name_(name) {
    if (auto child = root.get_child_optional(name)) section_ = &*child;
  }

  template <typename T>
  void Read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!section_) return;
    const auto raw = section_->get_optional<std::string>(key);
    if (!raw) return;
    out = Convert<T>(key, *raw);
  }

  void RejectUnknown() const {
    if (!section_) return;
    for (const auto& [key, value] : *section_) {
      if (!seen_.count(key)) {
        throw ConfigError("unknown key '" + key + "' in [" + name_ + "]");
      }
    }
  }

 private:
  template <typename T>
  T Convert(const std::string& key, const std::string& raw) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (raw == "true" || raw == "1") return true;
      if (raw == "false" || raw == "0") return false;
      throw Bad(key, raw);
    } else {
      std::istringstream is(raw);
      T value{};
      if (!(is >> value) || !(is >> std::ws).eof()) throw Bad(key, raw);
      return value;
    }
  }

  ConfigError Bad(const std::string& key, const std::string& raw) const {
    return ConfigError("[" + name_ + "] " + key + ": cannot parse '" + raw +
                       "'");
  }

  std::string name_;
  const pt::ptree* section_ = nullptr;
  std::set<std::string> seen_;
};

void ReadLabel(const pt::ptree& root, const std::string& name,
               LabelPolicy& p) {
  SectionReader r(root, name);
  r.Read("threshold_group0", p.threshold_group0);
  r.Read("threshold_group1", p.threshold_group1);
  r.RejectUnknown();
}

void ReadSample(const pt::ptree& root, const std::string& name,
                SamplePolicy& p) {
  SectionReader r(root, name);
  r.Read("cutoff", p.cutoff);
  r.Read("p_group0_high", p.p_group0_high);
  r.Read("p_group0_low", p.p_group0_low);
  r.Read("p_group1_high", p.p_group1_high);
  r.Read("p_group1_low", p.p_group1_low);
  r.RejectUnknown();
}

}  // namespace

ExperimentConfig ParseConfig(std::istream& in) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  static const std::set<std::string> kSections = {
      "experiment",     "population",  "label_bias", "label_unbiased",
      "sample_bias",    "sample_unbiased", "model"};
  for (const auto& [name, child] : root) {
    if (!kSections.count(name)) {
      throw ConfigError("unknown section [" + name + "]");
    }
  }

  SectionReader exp(root, "experiment");
  std::string kind = "A";
  exp.Read("kind", kind);
  if (kind != "A" && kind != "B") {
    throw ConfigError("[experiment] kind must be A or B, got '" + kind + "'");
  }
  ExperimentConfig c =
      DefaultConfig(kind == "A" ? ExperimentKind::kA : ExperimentKind::kB);

  std::string evaluate_on(EvaluationSetName(c.evaluate_on));
  exp.Read("trials", c.trials);
  exp.Read("base_seed", c.base_seed);
  exp.Read("evaluate_on", evaluate_on);
  exp.Read("threads", c.threads);
  exp.Read("min_cell_count", c.policies.min_cell_count);
  exp.RejectUnknown();
  if (evaluate_on == "test") {
    c.evaluate_on = EvaluationSet::kTest;
  } else if (evaluate_on == "train") {
    c.evaluate_on = EvaluationSet::kTrain;
  } else if (evaluate_on == "all") {
    c.evaluate_on = EvaluationSet::kAll;
  } else {
    throw ConfigError("[experiment] evaluate_on must be test, train or all");
  }

  SectionReader pop(root, "population");
  PopulationSpec& p = c.population;
  pop.Read("n_group0", p.n_group0);
  pop.Read("n_group1", p.n_group1);
  pop.Read("target_positive_rate_group0", p.target_positive_rate_group0);
  pop.Read("target_positive_rate_group1", p.target_positive_rate_group1);
  pop.Read("feature_dim", p.feature_dim);
  pop.Read("proxy_strength", p.proxy_strength);
  pop.Read("noise_scale", p.noise_scale);
  pop.Read("score_concentration", p.score_concentration);
  pop.Read("seed", p.seed);
  pop.RejectUnknown();

  ReadLabel(root, "label_bias", c.policies.biased_label);
  ReadLabel(root, "label_unbiased", c.policies.unbiased_label);
  ReadSample(root, "sample_bias", c.policies.biased_sample);
  ReadSample(root, "sample_unbiased", c.policies.unbiased_sample);

  SectionReader model(root, "model");
  ModelParams& m = c.model;
  model.Read("lambda", m.lambda);
  model.Read("alpha", m.alpha);
  model.Read("max_iters", m.max_iters);
  model.Read("tolerance", m.tolerance);
  model.Read("train_fraction", m.train_fraction);
  model.Read("include_group_feature", m.include_group_feature);
  model.Read("prediction_threshold", m.prediction_threshold);
  model.RejectUnknown();

  try {
    c.Validate();
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return c;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return ParseConfig(in);
}

void to_json(nlohmann::json& j, const PopulationSpec& p) {
  j = nlohmann::json{
      {"n_group0", p.n_group0},
      {"n_group1", p.n_group1},
      {"target_positive_rate_group0", p.target_positive_rate_group0},
      {"target_positive_rate_group1", p.target_positive_rate_group1},
      {"feature_dim", p.feature_dim},
      {"proxy_strength", p.proxy_strength},
      {"noise_scale", p.noise_scale},
      {"score_concentration", p.score_concentration},
      {"seed", p.seed}};
}

namespace {

nlohmann::json LabelJson(const LabelPolicy& p) {
  return {{"threshold_group0", p.threshold_group0},
          {"threshold_group1", p.threshold_group1}};
}

nlohmann::json SampleJson(const SamplePolicy& p) {
  return {{"cutoff", p.cutoff},
          {"p_group0_high", p.p_group0_high},
          {"p_group0_low", p.p_group0_low},
          {"p_group1_high", p.p_group1_high},
          {"p_group1_low", p.p_group1_low}};
}

}  // namespace

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{
      {"experiment",
       {{"kind", KindName(c.kind)},
        {"trials", c.trials},
        {"base_seed", c.base_seed},
        {"evaluate_on", EvaluationSetName(c.evaluate_on)},
        {"min_cell_count", c.policies.min_cell_count}}},
      {"population", c.population},
      {"label_bias", LabelJson(c.policies.biased_label)},
      {"label_unbiased", LabelJson(c.policies.unbiased_label)},
      {"sample_bias", SampleJson(c.policies.biased_sample)},
      {"sample_unbiased", SampleJson(c.policies.unbiased_sample)},
      {"model", c.model}};
}

}  // namespace fairaudit
