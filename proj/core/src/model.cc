#include "fairaudit/model.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "fairaudit/error.h"
#include "fairaudit/random.h"

namespace fairaudit {
namespace {

// IRLS weights are floored so separable data cannot produce unbounded steps.
constexpr double kMinWeight = 1e-5;
constexpr int kMaxInnerSweeps = 200;
constexpr int kMaxHalvings = 60;

double SoftThreshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

template <typename Record>
DesignMatrix BuildDesignImpl(std::span<const Record> records,
                             bool include_group,
                             const ScoredRecord& (*get)(const Record&)) {
  const std::size_t d =
      records.empty() ? 0 : get(records.front()).features.size();
  const std::size_t p = d + (include_group ? 1 : 0);
  DesignMatrix x(records.size(), p);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ScoredRecord& r = get(records[i]);
    if (r.features.size() != d) {
      throw ValidationError("features", "records disagree on feature count");
    }
    for (std::size_t j = 0; j < d; ++j) x(i, j) = r.features[j];
    if (include_group) x(i, d) = Index(r.group);
  }
  return x;
}

const ScoredRecord& Self(const ScoredRecord& r) { return r; }
const ScoredRecord& Inner(const LabeledRecord& r) { return r.record; }

}  // namespace

void ModelParams::Validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("lambda", "must be nonnegative and finite");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha", "must lie in [0, 1]");
  }
  if (max_iters < 1) throw ValidationError("max_iters", "must be at least 1");
  if (!(tolerance > 0.0)) throw ValidationError("tolerance", "must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train_fraction", "must lie strictly inside (0, 1)");
  }
  if (!(prediction_threshold >= 0.0 && prediction_threshold <= 1.0)) {
    throw ValidationError("prediction_threshold", "must lie in [0, 1]");
  }
}

TrainTestSplit Split(std::span<const LabeledRecord> data,
                     double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train_fraction", "must lie strictly inside (0, 1)");
  }
  std::array<std::vector<std::size_t>, 4> cells;
  for (std::size_t i = 0; i < data.size(); ++i) {
    cells[2 * Index(data[i].record.group) + data[i].label].push_back(i);
  }
  for (int c = 0; c < 4; ++c) {
    if (cells[c].size() < 2) {
      throw DegenerateDatasetError(
          "cannot stratify: cell (group=" + std::to_string(c / 2) +
          ", label=" + std::to_string(c % 2) + ") has " +
          std::to_string(cells[c].size()) + " records, need at least 2");
    }
  }

  // Largest-remainder allocation of round(f * n) train slots over the cells,
  // keeping at least one record of each cell on either side.
  const auto n = static_cast<double>(data.size());
  auto target = static_cast<std::int64_t>(std::floor(train_fraction * n + 0.5));
  std::array<std::int64_t, 4> alloc{};
  std::array<double, 4> remainder{};
  std::int64_t total = 0;
  for (int c = 0; c < 4; ++c) {
    const auto size = static_cast<std::int64_t>(cells[c].size());
    const double quota = train_fraction * static_cast<double>(size);
    alloc[c] = std::clamp<std::int64_t>(static_cast<std::int64_t>(quota), 1,
                                        size - 1);
    remainder[c] = quota - static_cast<double>(alloc[c]);
    total += alloc[c];
  }
  std::array<int, 4> order{0, 1, 2, 3};
  while (total != target) {
    const bool grow = total < target;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return grow ? remainder[a] > remainder[b] : remainder[a] < remainder[b];
    });
    bool moved = false;
    for (int c : order) {
      const auto size = static_cast<std::int64_t>(cells[c].size());
      if (grow && alloc[c] < size - 1) {
        ++alloc[c];
        remainder[c] -= 1.0;
        ++total;
        moved = true;
        break;
      }
      if (!grow && alloc[c] > 1) {
        --alloc[c];
        remainder[c] += 1.0;
        --total;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }

  Rng rng(DeriveSeed(seed, {Tag(Stream::kSplit)}));
  std::vector<char> in_train(data.size(), 0);
  for (int c = 0; c < 4; ++c) {
    std::vector<std::size_t>& idx = cells[c];
    // Fisher-Yates; only the first alloc[c] positions are needed.
    for (std::size_t k = 0; k < static_cast<std::size_t>(alloc[c]); ++k) {
      const std::size_t pick = k + rng.Below(idx.size() - k);
      std::swap(idx[k], idx[pick]);
      in_train[idx[k]] = 1;
    }
  }

  TrainTestSplit out;
  out.train.reserve(static_cast<std::size_t>(total));
  out.test.reserve(data.size() - static_cast<std::size_t>(total));
  for (std::size_t i = 0; i < data.size(); ++i) {
    (in_train[i] ? out.train : out.test).push_back(data[i]);
  }
  return out;
}

DesignMatrix BuildDesign(std::span<const ScoredRecord> records,
                         bool include_group) {
  return BuildDesignImpl<ScoredRecord>(records, include_group, &Self);
}

DesignMatrix BuildDesign(std::span<const LabeledRecord> records,
                         bool include_group) {
  return BuildDesignImpl<LabeledRecord>(records, include_group, &Inner);
}

ElasticNetObjective::ElasticNetObjective(DesignMatrix x, std::vector<double> y,
                                         double lambda, double alpha)
    : x_(std::move(x)), y_(std::move(y)), lambda_(lambda), alpha_(alpha) {
  if (y_.size() != x_.rows()) {
    throw ValidationError("labels", "one label per design row required");
  }
}

void ElasticNetObjective::Margins(std::span<const double> beta,
                                  double intercept,
                                  std::vector<double>& eta) const {
  eta.assign(x_.rows(), intercept);
  for (std::size_t j = 0; j < x_.cols(); ++j) {
    if (beta[j] == 0.0) continue;
    const auto col = x_.column(j);
    for (std::size_t i = 0; i < eta.size(); ++i) eta[i] += beta[j] * col[i];
  }
}

double ElasticNetObjective::LogLoss(std::span<const double> beta,
                                    double intercept) const {
  std::vector<double> eta;
  Margins(beta, intercept, eta);
  double loss = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    loss += Softplus(eta[i]) - y_[i] * eta[i];
  }
  return loss / static_cast<double>(eta.size());
}

double ElasticNetObjective::SmoothValue(std::span<const double> beta,
                                        double intercept) const {
  double ridge = 0.0;
  for (double b : beta) ridge += b * b;
  return LogLoss(beta, intercept) + lambda_ * (1.0 - alpha_) * 0.5 * ridge;
}

double ElasticNetObjective::Value(std::span<const double> beta,
                                  double intercept) const {
  double l1 = 0.0;
  for (double b : beta) l1 += std::abs(b);
  return SmoothValue(beta, intercept) + lambda_ * alpha_ * l1;
}

void ElasticNetObjective::SmoothGradient(std::span<const double> beta,
                                         double intercept,
                                         std::span<double> grad_beta,
                                         double& grad_intercept) const {
  std::vector<double> eta;
  Margins(beta, intercept, eta);
  const auto n = static_cast<double>(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = Sigmoid(eta[i]) - y_[i];
  grad_intercept = std::accumulate(eta.begin(), eta.end(), 0.0) / n;
  for (std::size_t j = 0; j < x_.cols(); ++j) {
    const auto col = x_.column(j);
    double g = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) g += eta[i] * col[i];
    grad_beta[j] = g / n + lambda_ * (1.0 - alpha_) * beta[j];
  }
}

double ElasticNetObjective::OptimalityViolation(std::span<const double> beta,
                                                double intercept) const {
  std::vector<double> grad(x_.cols());
  double grad_intercept = 0.0;
  SmoothGradient(beta, intercept, grad, grad_intercept);
  const double l1 = lambda_ * alpha_;
  double worst = std::abs(grad_intercept);
  for (std::size_t j = 0; j < grad.size(); ++j) {
    const double v =
        beta[j] != 0.0 ? std::abs(grad[j] + std::copysign(l1, beta[j]))
                       : std::max(0.0, std::abs(grad[j]) - l1);
    worst = std::max(worst, v);
  }
  return worst;
}

double Sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

DesignMatrix Standardize(const DesignMatrix& raw, const Model& model) {
  if (raw.cols() != model.NumInputs()) {
    throw ValidationError("features",
                          "model expects " + std::to_string(model.NumInputs()) +
                              " inputs, got " + std::to_string(raw.cols()));
  }
  DesignMatrix x(raw.rows(), raw.cols());
  for (std::size_t j = 0; j < raw.cols(); ++j) {
    const auto src = raw.column(j);
    auto dst = x.column(j);
    for (std::size_t i = 0; i < raw.rows(); ++i) {
      dst[i] = (src[i] - model.feature_means[j]) / model.feature_scales[j];
    }
  }
  return x;
}

Model FitDesign(const DesignMatrix& raw, std::span<const double> labels,
                const ModelParams& params, FitTrace* trace) {
  params.Validate();
  if (raw.cols() == 0) {
    throw ValidationError("features", "model needs at least one input");
  }
  if (raw.rows() == 0) throw DegenerateDatasetError("empty training set");
  if (labels.size() != raw.rows()) {
    throw ValidationError("labels", "one label per design row required");
  }

  const std::size_t n = raw.rows();
  const std::size_t p = raw.cols();
  const auto nd = static_cast<double>(n);

  Model model;
  model.params = params;
  model.coefficients.assign(p, 0.0);
  model.feature_means.resize(p);
  model.feature_scales.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    const auto col = raw.column(j);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / nd;
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / nd);
    model.feature_means[j] = mean;
    model.feature_scales[j] = sd > 1e-12 ? sd : 1.0;
  }

  const ElasticNetObjective objective(
      Standardize(raw, model), std::vector<double>(labels.begin(), labels.end()),
      params.lambda, params.alpha);
  const DesignMatrix& x = objective.design();

  const double base_rate =
      std::clamp(std::accumulate(labels.begin(), labels.end(), 0.0) / nd, 1e-9,
                 1.0 - 1e-9);
  std::vector<double>& beta = model.coefficients;
  double intercept = std::log(base_rate / (1.0 - base_rate));
  double current = objective.Value(beta, intercept);
  if (trace) trace->objective.assign(1, current);

  const double l1 = params.lambda * params.alpha;
  const double l2 = params.lambda * (1.0 - params.alpha);
  std::vector<double> eta(n), w(n), resid(n), cand_beta(p), col_h(p);

  for (int iter = 1; iter <= params.max_iters; ++iter) {
    model.iterations = iter;

    // Quadratic model of the loss around the current point.
    std::fill(eta.begin(), eta.end(), intercept);
    for (std::size_t j = 0; j < p; ++j) {
      const auto col = x.column(j);
      for (std::size_t i = 0; i < n; ++i) eta[i] += beta[j] * col[i];
    }
    double w_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double prob = Sigmoid(eta[i]);
      w[i] = std::max(prob * (1.0 - prob), kMinWeight);
      // Working residual z_i - eta_i.
      resid[i] = (labels[i] - prob) / w[i];
      w_sum += w[i];
    }
    for (std::size_t j = 0; j < p; ++j) {
      const auto col = x.column(j);
      double h = 0.0;
      for (std::size_t i = 0; i < n; ++i) h += w[i] * col[i] * col[i];
      col_h[j] = h / nd;
    }

    cand_beta = beta;
    double cand_intercept = intercept;
    for (int sweep = 0; sweep < kMaxInnerSweeps; ++sweep) {
      double inner_change = 0.0;
      double num = 0.0;
      for (std::size_t i = 0; i < n; ++i) num += w[i] * resid[i];
      const double delta_b = num / w_sum;
      if (delta_b != 0.0) {
        cand_intercept += delta_b;
        for (std::size_t i = 0; i < n; ++i) resid[i] -= delta_b;
        inner_change = std::abs(delta_b);
      }
      for (std::size_t j = 0; j < p; ++j) {
        const auto col = x.column(j);
        double g = 0.0;
        for (std::size_t i = 0; i < n; ++i) g += w[i] * col[i] * resid[i];
        g /= nd;
        const double old = cand_beta[j];
        const double updated =
            SoftThreshold(g + col_h[j] * old, l1) / (col_h[j] + l2);
        const double delta = updated - old;
        if (delta != 0.0) {
          cand_beta[j] = updated;
          for (std::size_t i = 0; i < n; ++i) resid[i] -= delta * col[i];
          inner_change = std::max(inner_change, std::abs(delta));
        }
      }
      if (inner_change < 0.1 * params.tolerance) break;
    }

    // Backtrack along the proposed step until the objective does not rise.
    double step = 1.0;
    double accepted = current;
    std::vector<double> trial_beta(p);
    double trial_intercept = intercept;
    bool found = false;
    for (int h = 0; h <= kMaxHalvings; ++h, step *= 0.5) {
      for (std::size_t j = 0; j < p; ++j) {
        trial_beta[j] = beta[j] + step * (cand_beta[j] - beta[j]);
      }
      trial_intercept = intercept + step * (cand_intercept - intercept);
      const double value = objective.Value(trial_beta, trial_intercept);
      if (!std::isfinite(value)) {
        throw NumericalError("elastic-net objective became non-finite at "
                             "iteration " + std::to_string(iter));
      }
      if (value <= current) {
        accepted = value;
        found = true;
        break;
      }
    }

    double change = 0.0;
    if (found) {
      change = std::abs(trial_intercept - intercept);
      for (std::size_t j = 0; j < p; ++j) {
        change = std::max(change, std::abs(trial_beta[j] - beta[j]));
      }
      beta = trial_beta;
      intercept = trial_intercept;
      current = accepted;
    }
    if (trace) trace->objective.push_back(current);
    if (!found || change < params.tolerance) {
      model.converged = true;
      break;
    }
  }

  model.intercept = intercept;
  return model;
}

Model Fit(std::span<const LabeledRecord> train, const ModelParams& params,
          FitTrace* trace) {
  params.Validate();
  if (train.empty()) throw DegenerateDatasetError("empty training set");
  const DesignMatrix raw = BuildDesign(train, params.include_group_feature);
  std::vector<double> labels(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) labels[i] = train[i].label;
  return FitDesign(raw, labels, params, trace);
}

Predictions PredictDesign(const Model& model, const DesignMatrix& raw,
                          double threshold) {
  const DesignMatrix x = Standardize(raw, model);
  Predictions out;
  out.score_hat.assign(x.rows(), model.intercept);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const auto col = x.column(j);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      out.score_hat[i] += model.coefficients[j] * col[i];
    }
  }
  out.label_hat.resize(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    out.score_hat[i] = Sigmoid(out.score_hat[i]);
    out.label_hat[i] = out.score_hat[i] >= threshold ? 1 : 0;
  }
  return out;
}

Predictions Predict(const Model& model, std::span<const ScoredRecord> records,
                    double threshold) {
  return PredictDesign(
      model, BuildDesign(records, model.params.include_group_feature),
      threshold);
}

Predictions Predict(const Model& model, std::span<const LabeledRecord> records,
                    double threshold) {
  return PredictDesign(
      model, BuildDesign(records, model.params.include_group_feature),
      threshold);
}

void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{{"lambda", p.lambda},
                     {"alpha", p.alpha},
                     {"max_iters", p.max_iters},
                     {"tolerance", p.tolerance},
                     {"train_fraction", p.train_fraction},
                     {"include_group_feature", p.include_group_feature},
                     {"prediction_threshold", p.prediction_threshold}};
}

void from_json(const nlohmann::json& j, ModelParams& p) {
  j.at("lambda").get_to(p.lambda);
  j.at("alpha").get_to(p.alpha);
  j.at("max_iters").get_to(p.max_iters);
  j.at("tolerance").get_to(p.tolerance);
  j.at("train_fraction").get_to(p.train_fraction);
  j.at("include_group_feature").get_to(p.include_group_feature);
  j.at("prediction_threshold").get_to(p.prediction_threshold);
}

void to_json(nlohmann::json& j, const Model& m) {
  j = nlohmann::json{{"coefficients", m.coefficients},
                     {"intercept", m.intercept},
                     {"feature_means", m.feature_means},
                     {"feature_scales", m.feature_scales},
                     {"params", m.params},
                     {"converged", m.converged},
                     {"iterations", m.iterations}};
}

void from_json(const nlohmann::json& j, Model& m) {
  j.at("coefficients").get_to(m.coefficients);
  j.at("intercept").get_to(m.intercept);
  j.at("feature_means").get_to(m.feature_means);
  j.at("feature_scales").get_to(m.feature_scales);
  j.at("params").get_to(m.params);
  j.at("converged").get_to(m.converged);
  m.iterations = j.value("iterations", 0);
  if (m.feature_means.size() != m.coefficients.size() ||
      m.feature_scales.size() != m.coefficients.size()) {
    throw ValidationError("model", "coefficient and scaling lengths differ");
  }
  for (double s : m.feature_scales) {
    if (!(s > 0.0)) throw ValidationError("feature_scales", "must be positive");
  }
}

}  // namespace fairaudit
