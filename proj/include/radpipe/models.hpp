#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "radpipe/matrix.hpp"

#include "json.hpp"

namespace radpipe {

enum class ModelKind { Svm, Logistic, Knn, RandomForest, AdaBoost };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

struct ModelSpec {
  ModelKind kind = ModelKind::Logistic;
  uint64_t seed = 0;

  // linear SVM (Pegasos-style stochastic subgradient on the hinge loss)
  double svm_c = 1.0;
  int svm_epochs = 200;

  // logistic regression (L2-regularized full-batch gradient descent)
  double logistic_l2 = 1e-3;
  int logistic_epochs = 500;
  double logistic_lr = 0.1;

  // k nearest neighbors (Euclidean)
  int knn_k = 5;

  // random forest (bagged Gini trees, random feature subsets per split)
  int forest_trees = 100;
  int forest_max_depth = 8;

  // AdaBoost on depth-1 stumps
  int ada_rounds = 50;
};

// A trained classifier. Scores are probabilities-like values in [0, 1],
// monotone in the underlying decision value. Scoring requires the feature
// names (and order) seen at training time.
class Model {
 public:
  virtual ~Model() = default;

  ModelKind kind() const { return kind_; }
  const std::vector<std::string>& feature_names() const { return names_; }

  double score_row(const double* row, size_t p) const;
  std::vector<double> score_matrix(const Matrix& x,
                                   const std::vector<std::string>& names) const;

  // default decision rule: score >= 0.5; KNN breaks vote ties toward the
  // negative (majority) class instead
  virtual int predict_row(const double* row, size_t p) const;

  virtual nlohmann::ordered_json to_json() const = 0;

 protected:
  Model(ModelKind kind, std::vector<std::string> names)
      : kind_(kind), names_(std::move(names)) {}

  virtual double score_impl(const double* row) const = 0;

  ModelKind kind_;
  std::vector<std::string> names_;
};

// Deterministic given (spec, data): bit-identical parameters for a fixed
// seed. Requires both classes present and finite features.
std::unique_ptr<Model> train_model(const ModelSpec& spec, const Matrix& x,
                                   const std::vector<int>& y,
                                   const std::vector<std::string>& feature_names);

}  // namespace radpipe
