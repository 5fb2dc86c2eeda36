#pragma once

// Classical scorecard models: logistic regression, an information-gain
// decision tree, a bagged random forest, and first-order gradient boosting
// on the logistic loss. Every model predicts a default probability in [0, 1].

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qcredit::classical {

/// Row-major feature matrix with 0/1 labels.
struct LabeledData {
  std::vector<std::vector<double>> features;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return features.empty() ? 0 : features.front().size(); }

  /// Rectangular matrix, matching lengths, labels in {0, 1}.
  void validate() const;
  /// Throws DegenerateDataError unless both classes are present.
  void require_both_classes() const;
};

double sigmoid(double z);

// ---------------------------------------------------------------------------
// Logistic regression

struct LogisticModel {
  double alpha = 0.0;
  std::vector<double> beta;

  double predict(std::span<const double> x) const;
  std::vector<double> predict(const std::vector<std::vector<double>> &rows) const;
};

struct LogisticOptions {
  double learning_rate = 0.5;
  std::size_t max_iters = 3000;
  double tol = 1e-6;
};

struct LogisticFit {
  LogisticModel model;
  // Loss before the first step and after every accepted step.
  std::vector<double> loss_history;
  std::size_t iterations = 0;
};

/// Mean binary cross-entropy of the model on `data`.
double logistic_loss(const LogisticModel &model, const LabeledData &data);

/// Full-batch gradient descent from alpha = beta = 0. Features are
/// standardized internally and the weights mapped back to raw units. A step
/// that would raise the loss is rejected and the step size halved.
LogisticFit fit_logistic(const LabeledData &data, const LogisticOptions &options = {});
LogisticModel train_logistic(const LabeledData &data, const LogisticOptions &options = {});

// ---------------------------------------------------------------------------
// Entropy and information gain (log base 2)

double entropy(std::span<const double> class_proportions);
double label_entropy(std::span<const int> labels);
double information_gain(std::span<const int> parent, const std::vector<std::vector<int>> &partition);

// ---------------------------------------------------------------------------
// Trees

struct TreeNode {
  // Leaves carry `value`; splits send x[feature] <= threshold to `left`.
  bool leaf = true;
  double value = 0.0;
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  std::size_t samples = 0;
};

class DecisionTree {
public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes);

  double predict(std::span<const double> x) const;
  std::vector<double> predict(const std::vector<std::vector<double>> &rows) const;

  const TreeNode &root() const { return nodes_.at(0); }
  std::span<const TreeNode> nodes() const noexcept { return nodes_; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

private:
  std::vector<TreeNode> nodes_;
};

struct TreeOptions {
  std::size_t max_depth = 4;
  std::size_t min_leaf = 5;
};

/// Greedy information-gain tree. Candidate thresholds are midpoints of
/// consecutive distinct feature values; ties go to the lowest feature index,
/// then the lowest threshold. Leaves store the default fraction.
DecisionTree build_tree(const LabeledData &data, const TreeOptions &options = {});

// ---------------------------------------------------------------------------
// Ensembles

struct ForestModel {
  std::vector<DecisionTree> trees;

  double predict(std::span<const double> x) const;
  std::vector<double> predict(const std::vector<std::vector<double>> &rows) const;
};

struct ForestOptions {
  std::size_t n_trees = 100;
  std::size_t max_depth = 5;
  std::size_t min_leaf = 5;
  // Fraction of features drawn per split; unset means sqrt(d) / d.
  std::optional<double> feature_fraction;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

ForestModel train_forest(const LabeledData &data, const ForestOptions &options = {});

struct BoostedModel {
  double base_score = 0.0; // prior log-odds
  double learning_rate = 0.1;
  std::vector<DecisionTree> trees;

  double margin(std::span<const double> x) const;
  double predict(std::span<const double> x) const;
  std::vector<double> predict(const std::vector<std::vector<double>> &rows) const;
};

struct BoostOptions {
  std::size_t n_rounds = 100;
  std::size_t max_depth = 3;
  std::size_t min_leaf = 5;
  double learning_rate = 0.1;
  // Row fraction sampled without replacement each round; 1 uses every row.
  double subsample = 1.0;
  std::uint64_t seed = 0;
};

struct BoostFit {
  BoostedModel model;
  // Training loss before any tree and after each round.
  std::vector<double> loss_history;
};

/// Each round fits a regression tree to the residuals y - p (the negative
/// logistic-loss gradient on the margin); leaves hold mean residuals.
BoostFit fit_boosted(const LabeledData &data, const BoostOptions &options = {});
BoostedModel train_boosted(const LabeledData &data, const BoostOptions &options = {});

} // namespace qcredit::classical
