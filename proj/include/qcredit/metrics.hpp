#pragma once

// Scorecard metrics. Label 1 (default) is the positive class and a sample
// is predicted positive when its score is >= the threshold.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qcredit::metrics {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix &) const = default;
};

ConfusionMatrix confusion_at_threshold(std::span<const double> scores, std::span<const int> labels, double threshold);

/// Probability that a random positive outscores a random negative; ties
/// count one half.
double auc(std::span<const double> scores, std::span<const int> labels);

struct KsResult {
  double ks = 0.0;
  // Highest threshold attaining the maximum of TPR - FPR.
  double threshold = 0.0;
};

/// max over thresholds of TPR - FPR with FPR = FP / (FP + TN).
KsResult ks_statistic(std::span<const double> scores, std::span<const int> labels);
double ks(std::span<const double> scores, std::span<const int> labels);

double recall(const ConfusionMatrix &cm);
double precision(const ConfusionMatrix &cm);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

/// (0,0), then one point per distinct score in descending order; ends at (1,1).
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);
double trapezoid_area(std::span<const RocPoint> curve);

/// Operating point for recall/precision: the KS-optimal threshold unless a
/// fixed one is given.
struct ThresholdPolicy {
  std::optional<double> fixed;

  static ThresholdPolicy ks_optimal() { return {}; }
  static ThresholdPolicy at(double threshold) { return {threshold}; }
};

struct MetricsReport {
  int partition = 0;
  double auc = 0.0;
  double ks = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double threshold = 0.0;
  ConfusionMatrix confusion;
};

/// Full report for one scored set. With a fixed threshold that flags no
/// sample, precision is reported as 0.
MetricsReport evaluate(std::span<const double> scores, std::span<const int> labels,
                       const ThresholdPolicy &policy = {}, int partition = 0);

std::string csv_header();
std::string to_csv_row(const MetricsReport &report);

} // namespace qcredit::metrics
