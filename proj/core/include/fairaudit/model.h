#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fairaudit/bias.h"
#include "fairaudit/datagen.h"

namespace fairaudit {

struct ModelParams {
  // Overall penalty strength.
  double lambda = 1e-3;
  // Elastic-net mix; 1 is pure L1, 0 pure ridge.
  double alpha = 0.5;
  int max_iters = 1000;
  // Convergence threshold on the largest coefficient change per iteration.
  double tolerance = 1e-7;
  double train_fraction = 0.7;
  // Append the protected attribute as a model input.
  bool include_group_feature = false;
  double prediction_threshold = 0.5;

  void Validate() const;
};

// Fitted elastic-net logistic model. Coefficients act on standardized inputs
// (x - mean) / scale; the intercept is unpenalized.
struct Model {
  std::vector<double> coefficients;
  double intercept = 0.0;
  std::vector<double> feature_means;
  std::vector<double> feature_scales;
  ModelParams params;
  bool converged = false;
  int iterations = 0;

  std::size_t NumInputs() const { return coefficients.size(); }
};

struct TrainTestSplit {
  std::vector<LabeledRecord> train;
  std::vector<LabeledRecord> test;
};

// Stratified by (group, label): each cell sends round-to-allocation of
// `train_fraction` of its records to train, so the total train size is
// round(train_fraction * n) and each cell is within one record of its share.
// Relative order is preserved in both halves.
// Throws DegenerateDatasetError when any cell has fewer than 2 records.
TrainTestSplit Split(std::span<const LabeledRecord> data,
                     double train_fraction, std::uint64_t seed);

// Column-major n x p matrix.
class DesignMatrix {
 public:
  DesignMatrix() = default;
  DesignMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) {
    return values_[j * rows_ + i];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return values_[j * rows_ + i];
  }
  std::span<const double> column(std::size_t j) const {
    return {values_.data() + j * rows_, rows_};
  }
  std::span<double> column(std::size_t j) {
    return {values_.data() + j * rows_, rows_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Raw model inputs: record features, then the group indicator if requested.
DesignMatrix BuildDesign(std::span<const ScoredRecord> records,
                         bool include_group);
DesignMatrix BuildDesign(std::span<const LabeledRecord> records,
                         bool include_group);

// Mean logistic loss + lambda * (alpha * |beta|_1 + (1 - alpha) / 2 * |beta|_2^2)
// over a fixed (already standardized) design. The intercept is unpenalized.
class ElasticNetObjective {
 public:
  ElasticNetObjective(DesignMatrix x, std::vector<double> y, double lambda,
                      double alpha);

  const DesignMatrix& design() const { return x_; }
  std::span<const double> labels() const { return y_; }
  double lambda() const { return lambda_; }
  double alpha() const { return alpha_; }

  double Value(std::span<const double> beta, double intercept) const;
  // Everything except the L1 term.
  double SmoothValue(std::span<const double> beta, double intercept) const;
  // Gradient of SmoothValue. grad_beta must have one slot per column.
  void SmoothGradient(std::span<const double> beta, double intercept,
                      std::span<double> grad_beta, double& grad_intercept) const;
  // Largest violation of the subgradient optimality conditions:
  //   beta_j != 0: |g_j + lambda * alpha * sign(beta_j)|
  //   beta_j == 0: max(0, |g_j| - lambda * alpha)
  //   intercept:   |g_0|
  // where g is the smooth gradient.
  double OptimalityViolation(std::span<const double> beta,
                             double intercept) const;

  // Mean logistic loss alone.
  double LogLoss(std::span<const double> beta, double intercept) const;

 private:
  void Margins(std::span<const double> beta, double intercept,
               std::vector<double>& eta) const;

  DesignMatrix x_;
  std::vector<double> y_;
  double lambda_;
  double alpha_;
};

// Objective value after each accepted optimizer iteration (index 0 is the
// starting point).
struct FitTrace {
  std::vector<double> objective;
};

// Cyclic coordinate descent on a quadratic (IRLS) approximation of the
// logistic loss with soft-thresholding, followed by a backtracking step that
// never increases the objective.
// Throws ValidationError on bad params or an empty feature set,
// DegenerateDatasetError on an empty training set, and NumericalError when
// the objective stops being finite.
Model Fit(std::span<const LabeledRecord> train, const ModelParams& params,
          FitTrace* trace = nullptr);

// Same as Fit on a raw design matrix and 0/1 labels.
Model FitDesign(const DesignMatrix& raw, std::span<const double> labels,
                const ModelParams& params, FitTrace* trace = nullptr);

// Standardizes `raw` with the model's means and scales.
DesignMatrix Standardize(const DesignMatrix& raw, const Model& model);

struct Predictions {
  std::vector<double> score_hat;
  std::vector<int> label_hat;
};

double Sigmoid(double z) noexcept;

// score_hat = sigmoid(beta . x_std + intercept); label_hat = score_hat >=
// threshold. Throws ValidationError on an input-dimension mismatch.
Predictions Predict(const Model& model, std::span<const ScoredRecord> records,
                    double threshold);
Predictions Predict(const Model& model, std::span<const LabeledRecord> records,
                    double threshold);
Predictions PredictDesign(const Model& model, const DesignMatrix& raw,
                          double threshold);

void to_json(nlohmann::json& j, const ModelParams& p);
void from_json(const nlohmann::json& j, ModelParams& p);
void to_json(nlohmann::json& j, const Model& m);
void from_json(const nlohmann::json& j, Model& m);

}  // namespace fairaudit
