#include "qcredit/classical.hpp"

#include "qcredit/errors.hpp"
#include "qcredit/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

namespace qcredit::classical {

namespace {

constexpr double kGainEpsilon = 1e-12;

// log(1 + e^m) without overflow.
double softplus(double m) { return m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m)); }

double binary_entropy(std::size_t positives, std::size_t total) {
  if (total == 0 || positives == 0 || positives == total) {
    return 0.0;
  }
  const double p = static_cast<double>(positives) / static_cast<double>(total);
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

enum class Criterion { InformationGain, SquaredError };

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = 0.0;
};

// Grows one tree over a (possibly repeating) list of row indices.
class TreeGrower {
public:
  TreeGrower(const LabeledData &data, std::span<const double> targets, Criterion criterion, std::size_t max_depth,
             std::size_t min_leaf, std::size_t features_per_split, std::mt19937_64 *rng)
      : data_(data), targets_(targets), criterion_(criterion), max_depth_(max_depth),
        min_leaf_(std::max<std::size_t>(min_leaf, 1)), features_per_split_(features_per_split), rng_(rng) {}

  DecisionTree grow(std::vector<std::size_t> rows) {
    nodes_.clear();
    grow_node(std::move(rows), 0);
    return DecisionTree(std::move(nodes_));
  }

private:
  double target(std::size_t row) const {
    return criterion_ == Criterion::InformationGain ? static_cast<double>(data_.labels[row]) : targets_[row];
  }

  double leaf_value(const std::vector<std::size_t> &rows) const {
    double sum = 0.0;
    for (std::size_t r : rows) {
      sum += target(r);
    }
    return rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
  }

  std::vector<std::size_t> candidate_features() {
    const std::size_t d = data_.dim();
    std::vector<std::size_t> features(d);
    std::iota(features.begin(), features.end(), 0);
    if (rng_ && features_per_split_ < d) {
      for (std::size_t i = 0; i < features_per_split_; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, d - 1);
        std::swap(features[i], features[pick(*rng_)]);
      }
      features.resize(features_per_split_);
      std::sort(features.begin(), features.end());
    }
    return features;
  }

  SplitChoice best_split(const std::vector<std::size_t> &rows) {
    const std::size_t n = rows.size();
    double total_sum = 0.0;
    double total_sq = 0.0;
    std::size_t total_pos = 0;
    for (std::size_t r : rows) {
      const double t = target(r);
      total_sum += t;
      total_sq += t * t;
      total_pos += data_.labels[r] == 1 ? 1 : 0;
    }
    const double parent_entropy = binary_entropy(total_pos, n);
    const double parent_sse = total_sq - total_sum * total_sum / static_cast<double>(n);

    SplitChoice best;
    std::vector<std::size_t> order(rows);
    for (std::size_t f : candidate_features()) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return data_.features[a][f] < data_.features[b][f]; });
      double left_sum = 0.0;
      double left_sq = 0.0;
      std::size_t left_pos = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t r = order[i];
        const double t = target(r);
        left_sum += t;
        left_sq += t * t;
        left_pos += data_.labels[r] == 1 ? 1 : 0;
        const double x = data_.features[r][f];
        const double next = data_.features[order[i + 1]][f];
        const std::size_t nl = i + 1;
        const std::size_t nr = n - nl;
        if (!(x < next) || nl < min_leaf_ || nr < min_leaf_) {
          continue;
        }
        double score;
        if (criterion_ == Criterion::InformationGain) {
          score = parent_entropy - (static_cast<double>(nl) * binary_entropy(left_pos, nl) +
                                    static_cast<double>(nr) * binary_entropy(total_pos - left_pos, nr)) /
                                       static_cast<double>(n);
        } else {
          const double right_sum = total_sum - left_sum;
          const double right_sq = total_sq - left_sq;
          const double sse = (left_sq - left_sum * left_sum / static_cast<double>(nl)) +
                             (right_sq - right_sum * right_sum / static_cast<double>(nr));
          score = parent_sse - sse;
        }
        if (!best.found || score > best.score + kGainEpsilon) {
          best = {true, f, midpoint(x, next), score};
        }
      }
    }
    return best;
  }

  std::size_t grow_node(std::vector<std::size_t> rows, std::size_t depth) {
    const std::size_t id = nodes_.size();
    nodes_.push_back(TreeNode{true, leaf_value(rows), 0, 0.0, 0, 0, rows.size()});
    if (depth >= max_depth_ || rows.size() < 2 * min_leaf_) {
      return id;
    }
    const SplitChoice split = best_split(rows);
    if (!split.found || split.score <= kGainEpsilon) {
      return id;
    }
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) {
      (data_.features[r][split.feature] <= split.threshold ? left : right).push_back(r);
    }
    const std::size_t l = grow_node(std::move(left), depth + 1);
    const std::size_t rr = grow_node(std::move(right), depth + 1);
    TreeNode &node = nodes_[id];
    node.leaf = false;
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = rr;
    return id;
  }

  const LabeledData &data_;
  std::span<const double> targets_;
  Criterion criterion_;
  std::size_t max_depth_;
  std::size_t min_leaf_;
  std::size_t features_per_split_;
  std::mt19937_64 *rng_;
  std::vector<TreeNode> nodes_;
};

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

} // namespace

void LabeledData::validate() const {
  if (features.size() != labels.size()) {
    throw ContractError("feature rows (" + std::to_string(features.size()) + ") and labels (" +
                        std::to_string(labels.size()) + ") differ");
  }
  const std::size_t d = dim();
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != d) {
      throw ContractError("feature row " + std::to_string(i) + " has " + std::to_string(features[i].size()) +
                          " columns, expected " + std::to_string(d));
    }
  }
  for (int y : labels) {
    if (y != 0 && y != 1) {
      throw ContractError("labels must be 0 or 1");
    }
  }
}

void LabeledData::require_both_classes() const {
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size())) {
    throw DegenerateDataError("training data must contain both classes");
  }
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------

double LogisticModel::predict(std::span<const double> x) const {
  if (x.size() != beta.size()) {
    throw ContractError("logistic model expects " + std::to_string(beta.size()) + " features, got " +
                        std::to_string(x.size()));
  }
  double z = alpha;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    z += beta[j] * x[j];
  }
  return sigmoid(z);
}

std::vector<double> LogisticModel::predict(const std::vector<std::vector<double>> &rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto &row : rows) {
    out.push_back(predict(row));
  }
  return out;
}

double logistic_loss(const LogisticModel &model, const LabeledData &data) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double m = model.alpha;
    for (std::size_t j = 0; j < model.beta.size(); ++j) {
      m += model.beta[j] * data.features[i][j];
    }
    total += softplus(m) - data.labels[i] * m;
  }
  return total / static_cast<double>(data.size());
}

LogisticFit fit_logistic(const LabeledData &data, const LogisticOptions &options) {
  data.validate();
  data.require_both_classes();
  if (!(options.learning_rate > 0.0) || !(options.tol >= 0.0)) {
    throw ContractError("logistic learning rate must be positive and tolerance non-negative");
  }
  const std::size_t n = data.size();
  const std::size_t d = data.dim();

  std::vector<double> mean(d, 0.0);
  std::vector<double> scale(d, 0.0);
  for (const auto &row : data.features) {
    for (std::size_t j = 0; j < d; ++j) {
      mean[j] += row[j];
    }
  }
  for (double &m : mean) {
    m /= static_cast<double>(n);
  }
  for (const auto &row : data.features) {
    for (std::size_t j = 0; j < d; ++j) {
      scale[j] += (row[j] - mean[j]) * (row[j] - mean[j]);
    }
  }
  for (double &s : scale) {
    s = std::sqrt(s / static_cast<double>(n));
    if (!(s > 0.0)) {
      s = 1.0;
    }
  }
  std::vector<std::vector<double>> z(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      z[i][j] = (data.features[i][j] - mean[j]) / scale[j];
    }
  }

  // Standardized parameters: w[0] is the intercept.
  std::vector<double> w(d + 1, 0.0);
  auto loss_and_grad = [&](const std::vector<double> &params, std::vector<double> *grad) {
    double loss = 0.0;
    if (grad) {
      grad->assign(d + 1, 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      double m = params[0];
      for (std::size_t j = 0; j < d; ++j) {
        m += params[j + 1] * z[i][j];
      }
      loss += softplus(m) - data.labels[i] * m;
      if (grad) {
        const double r = sigmoid(m) - data.labels[i];
        (*grad)[0] += r;
        for (std::size_t j = 0; j < d; ++j) {
          (*grad)[j + 1] += r * z[i][j];
        }
      }
    }
    if (grad) {
      for (double &g : *grad) {
        g /= static_cast<double>(n);
      }
    }
    return loss / static_cast<double>(n);
  };

  LogisticFit fit;
  std::vector<double> grad;
  double loss = loss_and_grad(w, &grad);
  fit.loss_history.push_back(loss);
  double step = options.learning_rate;
  std::vector<double> trial(d + 1);
  for (std::size_t it = 0; it < options.max_iters; ++it) {
    double gmax = 0.0;
    for (double g : grad) {
      gmax = std::max(gmax, std::abs(g));
    }
    if (gmax < options.tol || step < 1e-12) {
      break;
    }
    ++fit.iterations;
    for (std::size_t k = 0; k <= d; ++k) {
      trial[k] = w[k] - step * grad[k];
    }
    const double trial_loss = loss_and_grad(trial, nullptr);
    if (trial_loss <= loss) {
      w = trial;
      loss = loss_and_grad(w, &grad);
      fit.loss_history.push_back(loss);
    } else {
      step /= 2.0;
    }
  }

  fit.model.beta.resize(d);
  fit.model.alpha = w[0];
  for (std::size_t j = 0; j < d; ++j) {
    fit.model.beta[j] = w[j + 1] / scale[j];
    fit.model.alpha -= w[j + 1] * mean[j] / scale[j];
  }
  return fit;
}

LogisticModel train_logistic(const LabeledData &data, const LogisticOptions &options) {
  return fit_logistic(data, options).model;
}

// ---------------------------------------------------------------------------

double entropy(std::span<const double> class_proportions) {
  double sum = 0.0;
  for (double p : class_proportions) {
    if (!(p >= 0.0)) {
      throw ContractError("class proportions must be non-negative");
    }
    sum += p;
  }
  if (class_proportions.empty() || std::abs(sum - 1.0) > 1e-9) {
    throw ContractError("class proportions must sum to 1");
  }
  double h = 0.0;
  for (double p : class_proportions) {
    if (p > 0.0) {
      h -= p * std::log2(p);
    }
  }
  return h;
}

double label_entropy(std::span<const int> labels) {
  if (labels.empty()) {
    return 0.0;
  }
  std::map<int, std::size_t> counts;
  for (int y : labels) {
    ++counts[y];
  }
  std::vector<double> proportions;
  for (const auto &[label, count] : counts) {
    proportions.push_back(static_cast<double>(count) / static_cast<double>(labels.size()));
  }
  double h = 0.0;
  for (double p : proportions) {
    h -= p * std::log2(p);
  }
  return h;
}

double information_gain(std::span<const int> parent, const std::vector<std::vector<int>> &partition) {
  std::map<int, std::ptrdiff_t> balance;
  for (int y : parent) {
    ++balance[y];
  }
  for (const auto &subset : partition) {
    for (int y : subset) {
      --balance[y];
    }
  }
  for (const auto &[label, diff] : balance) {
    if (diff != 0) {
      throw ContractError("partition does not cover the parent labels exactly");
    }
  }
  if (parent.empty()) {
    return 0.0;
  }
  double expected = 0.0;
  for (const auto &subset : partition) {
    expected += static_cast<double>(subset.size()) / static_cast<double>(parent.size()) * label_entropy(subset);
  }
  return std::max(0.0, label_entropy(parent) - expected);
}

// ---------------------------------------------------------------------------

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) {
    throw ContractError("a tree needs at least one node");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto &node = nodes_[i];
    if (!node.leaf && (node.left <= i || node.right <= i || node.left >= nodes_.size() ||
                       node.right >= nodes_.size())) {
      throw ContractError("malformed tree: node " + std::to_string(i) + " has invalid children");
    }
  }
}

double DecisionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes_.at(i).leaf) {
    const TreeNode &node = nodes_[i];
    if (node.feature >= x.size()) {
      throw ContractError("tree splits on feature " + std::to_string(node.feature) + " but the row has " +
                          std::to_string(x.size()));
    }
    i = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes_[i].value;
}

std::vector<double> DecisionTree::predict(const std::vector<std::vector<double>> &rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto &row : rows) {
    out.push_back(predict(row));
  }
  return out;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].leaf) {
      level[nodes_[i].left] = level[i] + 1;
      level[nodes_[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode &n) { return n.leaf; }));
}

DecisionTree build_tree(const LabeledData &data, const TreeOptions &options) {
  data.validate();
  if (data.size() == 0) {
    throw ContractError("cannot build a tree from zero samples");
  }
  TreeGrower grower(data, {}, Criterion::InformationGain, options.max_depth, options.min_leaf, data.dim(), nullptr);
  return grower.grow(all_rows(data.size()));
}

// ---------------------------------------------------------------------------

double ForestModel::predict(std::span<const double> x) const {
  if (trees.empty()) {
    throw ContractError("empty forest");
  }
  double sum = 0.0;
  for (const auto &tree : trees) {
    sum += tree.predict(x);
  }
  return sum / static_cast<double>(trees.size());
}

std::vector<double> ForestModel::predict(const std::vector<std::vector<double>> &rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto &row : rows) {
    out.push_back(predict(row));
  }
  return out;
}

ForestModel train_forest(const LabeledData &data, const ForestOptions &options) {
  data.validate();
  if (options.n_trees < 1) {
    throw ContractError("a forest needs at least one tree");
  }
  if (data.size() == 0) {
    throw ContractError("cannot train a forest on zero samples");
  }
  const std::size_t d = data.dim();
  const double fraction =
      options.feature_fraction.value_or(d > 0 ? std::sqrt(static_cast<double>(d)) / static_cast<double>(d) : 1.0);
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ContractError("feature_fraction must lie in (0, 1]");
  }
  const std::size_t per_split =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(fraction * static_cast<double>(d))), 1,
                              std::max<std::size_t>(d, 1));

  ForestModel forest;
  forest.trees.reserve(options.n_trees);
  const std::size_t n = data.size();
  for (std::size_t t = 0; t < options.n_trees; ++t) {
    std::mt19937_64 rng(derive_seed(options.seed, 0xF0, t));
    std::vector<std::size_t> rows;
    if (options.bootstrap) {
      std::uniform_int_distribution<std::size_t> draw(0, n - 1);
      rows.resize(n);
      for (auto &r : rows) {
        r = draw(rng);
      }
    } else {
      rows = all_rows(n);
    }
    TreeGrower grower(data, {}, Criterion::InformationGain, options.max_depth, options.min_leaf, per_split, &rng);
    forest.trees.push_back(grower.grow(std::move(rows)));
  }
  return forest;
}

// ---------------------------------------------------------------------------

double BoostedModel::margin(std::span<const double> x) const {
  double m = base_score;
  for (const auto &tree : trees) {
    m += learning_rate * tree.predict(x);
  }
  return m;
}

double BoostedModel::predict(std::span<const double> x) const { return sigmoid(margin(x)); }

std::vector<double> BoostedModel::predict(const std::vector<std::vector<double>> &rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto &row : rows) {
    out.push_back(predict(row));
  }
  return out;
}

BoostFit fit_boosted(const LabeledData &data, const BoostOptions &options) {
  data.validate();
  data.require_both_classes();
  if (!(options.learning_rate > 0.0)) {
    throw ContractError("boosting learning rate must be positive");
  }
  if (!(options.subsample > 0.0 && options.subsample <= 1.0)) {
    throw ContractError("subsample must lie in (0, 1]");
  }
  const std::size_t n = data.size();
  const double base_rate =
      static_cast<double>(std::count(data.labels.begin(), data.labels.end(), 1)) / static_cast<double>(n);

  BoostFit fit;
  fit.model.base_score = std::log(base_rate / (1.0 - base_rate));
  fit.model.learning_rate = options.learning_rate;

  std::vector<double> margins(n, fit.model.base_score);
  auto loss = [&] {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += softplus(margins[i]) - data.labels[i] * margins[i];
    }
    return total / static_cast<double>(n);
  };
  fit.loss_history.push_back(loss());

  std::mt19937_64 rng(options.seed);
  std::vector<double> residuals(n);
  const auto sample_size =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(options.subsample * static_cast<double>(n))));
  for (std::size_t round = 0; round < options.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      residuals[i] = data.labels[i] - sigmoid(margins[i]);
    }
    std::vector<std::size_t> rows = all_rows(n);
    if (sample_size < n) {
      std::shuffle(rows.begin(), rows.end(), rng);
      rows.resize(sample_size);
      std::sort(rows.begin(), rows.end());
    }
    TreeGrower grower(data, residuals, Criterion::SquaredError, options.max_depth, options.min_leaf, data.dim(),
                      nullptr);
    DecisionTree tree = grower.grow(std::move(rows));
    for (std::size_t i = 0; i < n; ++i) {
      margins[i] += options.learning_rate * tree.predict(data.features[i]);
    }
    fit.model.trees.push_back(std::move(tree));
    fit.loss_history.push_back(loss());
  }
  return fit;
}

BoostedModel train_boosted(const LabeledData &data, const BoostOptions &options) {
  return fit_boosted(data, options).model;
}

} // namespace qcredit::classical
