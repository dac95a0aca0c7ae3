#include "radpipe/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radpipe/error.hpp"
#include "radpipe/kernels.hpp"
#include "radpipe/rng.hpp"
#include "radpipe/util.hpp"

namespace radpipe {

using nlohmann::ordered_json;

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Svm: return "svm";
    case ModelKind::Logistic: return "logistic";
    case ModelKind::Knn: return "knn";
    case ModelKind::RandomForest: return "random_forest";
    case ModelKind::AdaBoost: return "adaboost";
  }
  return "?";
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "svm") return ModelKind::Svm;
  if (name == "logistic") return ModelKind::Logistic;
  if (name == "knn") return ModelKind::Knn;
  if (name == "random_forest") return ModelKind::RandomForest;
  if (name == "adaboost") return ModelKind::AdaBoost;
  fail(ErrorCode::BadArgument, "unknown model kind: " + name);
}

double Model::score_row(const double* row, size_t p) const {
  if (p != names_.size())
    fail(ErrorCode::BadArgument, "model: feature dimension mismatch");
  return score_impl(row);
}

std::vector<double> Model::score_matrix(const Matrix& x,
                                        const std::vector<std::string>& names) const {
  if (names != names_)
    fail(ErrorCode::BadArgument, "model: feature names do not match training");
  if (x.cols != names_.size())
    fail(ErrorCode::BadArgument, "model: feature dimension mismatch");
  std::vector<double> out(x.rows);
  for (size_t r = 0; r < x.rows; ++r) out[r] = score_impl(x.row(r));
  return out;
}

int Model::predict_row(const double* row, size_t p) const {
  return score_row(row, p) >= 0.5 ? 1 : 0;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void validate_training_input(const Matrix& x, const std::vector<int>& y) {
  if (x.rows < 2) fail(ErrorCode::BadArgument, "train: need at least 2 rows");
  if (x.rows != y.size()) fail(ErrorCode::BadArgument, "train: row/label mismatch");
  bool has_pos = false, has_neg = false;
  for (int label : y) (label == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    fail(ErrorCode::SingleClass, "train: both classes required");
  for (double v : x.data)
    if (!std::isfinite(v)) fail(ErrorCode::BadArgument, "train: non-finite feature");
}

// ---- logistic regression

class LogisticModel : public Model {
 public:
  LogisticModel(std::vector<std::string> names, std::vector<double> w, double b)
      : Model(ModelKind::Logistic, std::move(names)), w_(std::move(w)), b_(b) {}

  double score_impl(const double* row) const override {
    return sigmoid(kernels::ops().dot(w_.data(), row, w_.size()) + b_);
  }

  ordered_json to_json() const override {
    return {{"kind", "logistic"}, {"weights", w_}, {"intercept", b_},
            {"features", names_}};
  }

 private:
  std::vector<double> w_;
  double b_;
};

std::unique_ptr<Model> train_logistic(const ModelSpec& spec, const Matrix& x,
                                      const std::vector<int>& y,
                                      std::vector<std::string> names) {
  const size_t n = x.rows, p = x.cols;
  const double dn = static_cast<double>(n);
  std::vector<double> w(p, 0.0), grad(p);
  double b = 0.0;
  for (int epoch = 0; epoch < spec.logistic_epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (size_t r = 0; r < n; ++r) {
      const double* row = x.row(r);
      double err = sigmoid(kernels::ops().dot(w.data(), row, p) + b) - y[r];
      kernels::ops().axpy(err, row, grad.data(), p);
      grad_b += err;
    }
    for (size_t c = 0; c < p; ++c)
      w[c] -= spec.logistic_lr * (grad[c] / dn + spec.logistic_l2 * w[c]);
    b -= spec.logistic_lr * grad_b / dn;
  }
  return std::make_unique<LogisticModel>(std::move(names), std::move(w), b);
}

// ---- linear SVM with a logistic link for scores

class SvmModel : public Model {
 public:
  SvmModel(std::vector<std::string> names, std::vector<double> w, double b,
           double link_a, double link_b)
      : Model(ModelKind::Svm, std::move(names)), w_(std::move(w)), b_(b),
        link_a_(link_a), link_b_(link_b) {}

  double margin(const double* row) const {
    return kernels::ops().dot(w_.data(), row, w_.size()) + b_;
  }

  double score_impl(const double* row) const override {
    return sigmoid(link_a_ * margin(row) + link_b_);
  }

  ordered_json to_json() const override {
    return {{"kind", "svm"}, {"weights", w_}, {"intercept", b_},
            {"link", {{"a", link_a_}, {"b", link_b_}}}, {"features", names_}};
  }

 private:
  std::vector<double> w_;
  double b_;
  double link_a_, link_b_;  // a >= 0 keeps scores monotone in the margin
};

std::unique_ptr<Model> train_svm(const ModelSpec& spec, const Matrix& x,
                                 const std::vector<int>& y,
                                 std::vector<std::string> names) {
  const size_t n = x.rows, p = x.cols;
  const double reg = 1.0 / (spec.svm_c * static_cast<double>(n));

  std::vector<double> w(p, 0.0);
  double b = 0.0;
  Rng rng(derive_seed(spec.seed, "svm"));
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});

  int64_t t = 0;
  for (int epoch = 0; epoch < spec.svm_epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t i : order) {
      ++t;
      const double eta = 1.0 / (reg * static_cast<double>(t));
      const double* row = x.row(i);
      const double ylbl = y[i] == 1 ? 1.0 : -1.0;
      double margin = ylbl * (kernels::ops().dot(w.data(), row, p) + b);
      double shrink = 1.0 - eta * reg;
      for (size_t c = 0; c < p; ++c) w[c] *= shrink;
      if (margin < 1.0) {
        kernels::ops().axpy(eta * ylbl, row, w.data(), p);
        b += eta * ylbl;
      }
    }
  }

  // two-parameter logistic link fitted to training margins (Platt-style
  // smoothed targets); clamped to a >= 0 so scores rank like margins
  std::vector<double> margins(n);
  for (size_t i = 0; i < n; ++i)
    margins[i] = kernels::ops().dot(w.data(), x.row(i), p) + b;
  int64_t n_pos = std::count(y.begin(), y.end(), 1);
  int64_t n_neg = static_cast<int64_t>(n) - n_pos;
  const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
  const double t_neg = 1.0 / (n_neg + 2.0);

  double a = 1.0, bb = 0.0;
  const double lr = 0.05;
  for (int iter = 0; iter < 2000; ++iter) {
    double ga = 0.0, gb = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double target = y[i] == 1 ? t_pos : t_neg;
      double err = sigmoid(a * margins[i] + bb) - target;
      ga += err * margins[i];
      gb += err;
    }
    a -= lr * ga / static_cast<double>(n);
    bb -= lr * gb / static_cast<double>(n);
    if (a < 0.0) a = 0.0;
  }
  return std::make_unique<SvmModel>(std::move(names), std::move(w), b, a, bb);
}

// ---- k nearest neighbors

class KnnModel : public Model {
 public:
  KnnModel(std::vector<std::string> names, Matrix train, std::vector<int> labels, int k)
      : Model(ModelKind::Knn, std::move(names)), train_(std::move(train)),
        labels_(std::move(labels)), k_(std::min<size_t>(k, labels_.size())) {}

  double score_impl(const double* row) const override {
    // neighbors ordered by (distance, index) so ties are deterministic
    std::vector<std::pair<double, size_t>> dist(train_.rows);
    for (size_t i = 0; i < train_.rows; ++i)
      dist[i] = {kernels::ops().sqdist(row, train_.row(i), train_.cols), i};
    std::partial_sort(dist.begin(), dist.begin() + k_, dist.end());
    int positive = 0;
    for (size_t i = 0; i < k_; ++i) positive += labels_[dist[i].second];
    return static_cast<double>(positive) / static_cast<double>(k_);
  }

  // vote ties go to the negative (majority) class
  int predict_row(const double* row, size_t p) const override {
    return score_row(row, p) > 0.5 ? 1 : 0;
  }

  ordered_json to_json() const override {
    return {{"kind", "knn"}, {"k", k_}, {"n_train", train_.rows},
            {"train", train_.data}, {"labels", labels_}, {"features", names_}};
  }

 private:
  Matrix train_;
  std::vector<int> labels_;
  size_t k_;
};

// ---- decision trees (shared by forest)

struct TreeNode {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0.0;  // go left when value <= threshold
  int left = -1, right = -1;
  int label = 0;
};

struct Tree {
  std::vector<TreeNode> nodes;

  int predict(const double* row) const {
    int cur = 0;
    while (nodes[cur].feature >= 0)
      cur = row[nodes[cur].feature] <= nodes[cur].threshold ? nodes[cur].left
                                                            : nodes[cur].right;
    return nodes[cur].label;
  }
};

struct SplitResult {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gini = 0.0;
};

double gini_impurity(int64_t pos, int64_t total) {
  if (total == 0) return 0.0;
  double p = static_cast<double>(pos) / static_cast<double>(total);
  return 2.0 * p * (1.0 - p);
}

SplitResult best_split(const Matrix& x, const std::vector<int>& y,
                       const std::vector<size_t>& rows,
                       const std::vector<size_t>& features) {
  SplitResult best;
  const int64_t total = static_cast<int64_t>(rows.size());
  int64_t total_pos = 0;
  for (size_t r : rows) total_pos += y[r];
  double parent = gini_impurity(total_pos, total);

  std::vector<std::pair<double, int>> vals(rows.size());
  for (size_t f : features) {
    for (size_t i = 0; i < rows.size(); ++i)
      vals[i] = {x.at(rows[i], f), y[rows[i]]};
    std::sort(vals.begin(), vals.end());
    int64_t left_pos = 0;
    for (size_t i = 0; i + 1 < vals.size(); ++i) {
      left_pos += vals[i].second;
      if (vals[i].first == vals[i + 1].first) continue;  // no boundary here
      int64_t left_n = static_cast<int64_t>(i) + 1;
      int64_t right_n = total - left_n;
      double weighted =
          (left_n * gini_impurity(left_pos, left_n) +
           right_n * gini_impurity(total_pos - left_pos, right_n)) /
          static_cast<double>(total);
      if (!best.found || weighted < best.gini - 1e-15) {
        best.found = true;
        best.feature = static_cast<int>(f);
        best.threshold = (vals[i].first + vals[i + 1].first) / 2.0;
        best.gini = weighted;
      }
    }
  }
  if (best.found && best.gini >= parent - 1e-15) best.found = false;  // no gain
  return best;
}

int majority_label(const std::vector<int>& y, const std::vector<size_t>& rows) {
  int64_t pos = 0;
  for (size_t r : rows) pos += y[r];
  // ties break toward the negative (majority) class
  return 2 * pos > static_cast<int64_t>(rows.size()) ? 1 : 0;
}

int build_node(Tree& tree, const Matrix& x, const std::vector<int>& y,
               std::vector<size_t> rows, int depth, int max_depth,
               size_t features_per_split, Rng& rng) {
  int node_index = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();

  int64_t pos = 0;
  for (size_t r : rows) pos += y[r];
  bool pure = pos == 0 || pos == static_cast<int64_t>(rows.size());

  if (pure || depth >= max_depth || rows.size() < 2) {
    tree.nodes[node_index].label = majority_label(y, rows);
    return node_index;
  }

  // random feature subset without replacement
  std::vector<size_t> all(x.cols);
  std::iota(all.begin(), all.end(), size_t{0});
  rng.shuffle(all);
  all.resize(std::min(features_per_split, all.size()));

  SplitResult split = best_split(x, y, rows, all);
  if (!split.found) {
    tree.nodes[node_index].label = majority_label(y, rows);
    return node_index;
  }

  std::vector<size_t> left_rows, right_rows;
  for (size_t r : rows)
    (x.at(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);

  tree.nodes[node_index].feature = split.feature;
  tree.nodes[node_index].threshold = split.threshold;
  int left = build_node(tree, x, y, std::move(left_rows), depth + 1, max_depth,
                        features_per_split, rng);
  int right = build_node(tree, x, y, std::move(right_rows), depth + 1, max_depth,
                         features_per_split, rng);
  tree.nodes[node_index].left = left;
  tree.nodes[node_index].right = right;
  return node_index;
}

class ForestModel : public Model {
 public:
  ForestModel(std::vector<std::string> names, std::vector<Tree> trees)
      : Model(ModelKind::RandomForest, std::move(names)), trees_(std::move(trees)) {}

  double score_impl(const double* row) const override {
    int votes = 0;
    for (const auto& t : trees_) votes += t.predict(row);
    return static_cast<double>(votes) / static_cast<double>(trees_.size());
  }

  const std::vector<Tree>& trees() const { return trees_; }

  ordered_json to_json() const override {
    ordered_json trees = ordered_json::array();
    for (const auto& t : trees_) {
      ordered_json nodes = ordered_json::array();
      for (const auto& n : t.nodes)
        nodes.push_back({{"f", n.feature}, {"t", n.threshold}, {"l", n.left},
                         {"r", n.right}, {"y", n.label}});
      trees.push_back(std::move(nodes));
    }
    return {{"kind", "random_forest"}, {"trees", trees}, {"features", names_}};
  }

 private:
  std::vector<Tree> trees_;
};

std::unique_ptr<Model> train_forest(const ModelSpec& spec, const Matrix& x,
                                    const std::vector<int>& y,
                                    std::vector<std::string> names) {
  const size_t n = x.rows;
  const size_t features_per_split = static_cast<size_t>(
      std::ceil(std::sqrt(static_cast<double>(x.cols))));
  std::vector<Tree> trees(spec.forest_trees);

  parallel_for(trees.size(), [&](size_t t) {
    Rng rng(derive_seed(spec.seed, "tree", t));
    std::vector<size_t> sample(n);
    for (size_t i = 0; i < n; ++i) sample[i] = rng.uniform_int(n);
    build_node(trees[t], x, y, std::move(sample), 0, spec.forest_max_depth,
               features_per_split, rng);
  });
  return std::make_unique<ForestModel>(std::move(names), std::move(trees));
}

// ---- AdaBoost on depth-1 stumps

struct Stump {
  int feature = 0;
  double threshold = 0.0;
  int above_label = 1;  // prediction when value > threshold

  int predict(const double* row) const {
    return row[feature] > threshold ? above_label : 1 - above_label;
  }
};

class AdaBoostModel : public Model {
 public:
  AdaBoostModel(std::vector<std::string> names, std::vector<Stump> stumps,
                std::vector<double> alphas)
      : Model(ModelKind::AdaBoost, std::move(names)), stumps_(std::move(stumps)),
        alphas_(std::move(alphas)) {
    for (double a : alphas_) alpha_total_ += a;
  }

  double score_impl(const double* row) const override {
    if (stumps_.empty()) return 0.5;
    double positive = 0.0;
    for (size_t i = 0; i < stumps_.size(); ++i)
      if (stumps_[i].predict(row) == 1) positive += alphas_[i];
    return positive / alpha_total_;
  }

  size_t rounds() const { return stumps_.size(); }

  ordered_json to_json() const override {
    ordered_json stumps = ordered_json::array();
    for (size_t i = 0; i < stumps_.size(); ++i)
      stumps.push_back({{"f", stumps_[i].feature}, {"t", stumps_[i].threshold},
                        {"above", stumps_[i].above_label}, {"alpha", alphas_[i]}});
    return {{"kind", "adaboost"}, {"stumps", stumps}, {"features", names_}};
  }

 private:
  std::vector<Stump> stumps_;
  std::vector<double> alphas_;
  double alpha_total_ = 0.0;
};

std::unique_ptr<Model> train_adaboost(const ModelSpec& spec, const Matrix& x,
                                      const std::vector<int>& y,
                                      std::vector<std::string> names) {
  const size_t n = x.rows;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<Stump> stumps;
  std::vector<double> alphas;

  // per-feature sorted row orders, reused every round
  std::vector<std::vector<size_t>> sorted(x.cols, std::vector<size_t>(n));
  for (size_t f = 0; f < x.cols; ++f) {
    auto& idx = sorted[f];
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](size_t a, size_t b) { return x.at(a, f) < x.at(b, f); });
  }

  for (int round = 0; round < spec.ada_rounds; ++round) {
    double total_pos_w = 0.0;
    for (size_t i = 0; i < n; ++i)
      if (y[i] == 1) total_pos_w += w[i];

    Stump best;
    double best_err = 2.0;
    for (size_t f = 0; f < x.cols; ++f) {
      const auto& idx = sorted[f];
      // err for "above -> 1" with threshold below all samples: every
      // negative sample is predicted 1
      double err_above1 = 1.0 - total_pos_w;
      // scan thresholds between consecutive distinct values
      double running = err_above1;
      for (size_t i = 0; i < n; ++i) {
        size_t r = idx[i];
        // moving sample r to the "below" side changes the error of the
        // above->1 stump: a positive below is now wrong, a negative right
        running += y[r] == 1 ? w[r] : -w[r];
        if (i + 1 < n && x.at(idx[i + 1], f) == x.at(r, f)) continue;
        double threshold = i + 1 < n
                               ? (x.at(r, f) + x.at(idx[i + 1], f)) / 2.0
                               : x.at(r, f) + 1.0;
        for (int above : {1, 0}) {
          double err = above == 1 ? running : 1.0 - running;
          if (err < best_err) {
            best_err = err;
            best = {static_cast<int>(f), threshold, above};
          }
        }
      }
    }

    if (best_err >= 0.5) break;  // no weak learner better than chance

    double eps = std::clamp(best_err, 1e-12, 1.0 - 1e-12);
    double alpha = 0.5 * std::log((1.0 - eps) / eps);
    stumps.push_back(best);
    alphas.push_back(alpha);

    if (best_err <= 1e-12) break;  // perfect stump

    double norm = 0.0;
    for (size_t i = 0; i < n; ++i) {
      int pred = best.predict(x.row(i));
      bool correct = pred == y[i];
      w[i] *= std::exp(correct ? -alpha : alpha);
      norm += w[i];
    }
    for (auto& wi : w) wi /= norm;
  }
  return std::make_unique<AdaBoostModel>(std::move(names), std::move(stumps),
                                         std::move(alphas));
}

}  // namespace

std::unique_ptr<Model> train_model(const ModelSpec& spec, const Matrix& x,
                                   const std::vector<int>& y,
                                   const std::vector<std::string>& feature_names) {
  validate_training_input(x, y);
  if (feature_names.size() != x.cols)
    fail(ErrorCode::BadArgument, "train: feature name/column mismatch");

  switch (spec.kind) {
    case ModelKind::Logistic: return train_logistic(spec, x, y, feature_names);
    case ModelKind::Svm: return train_svm(spec, x, y, feature_names);
    case ModelKind::Knn:
      return std::make_unique<KnnModel>(feature_names, x, y, spec.knn_k);
    case ModelKind::RandomForest: return train_forest(spec, x, y, feature_names);
    case ModelKind::AdaBoost: return train_adaboost(spec, x, y, feature_names);
  }
  fail(ErrorCode::Internal, "train: unhandled model kind");
}

}  // namespace radpipe
