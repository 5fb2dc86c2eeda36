#include "qcredit/metrics.hpp"

#include "qcredit/errors.hpp"
#include "qcredit/format.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace qcredit::metrics {

namespace {

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

ClassCounts check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ContractError("scores and labels differ in length (" + std::to_string(scores.size()) + " vs " +
                        std::to_string(labels.size()) + ")");
  }
  ClassCounts counts;
  for (int y : labels) {
    if (y == 1) {
      ++counts.positives;
    } else if (y == 0) {
      ++counts.negatives;
    } else {
      throw ContractError("labels must be 0 or 1");
    }
  }
  return counts;
}

ClassCounts require_both_classes(std::span<const double> scores, std::span<const int> labels) {
  const ClassCounts counts = check_inputs(scores, labels);
  if (counts.positives == 0 || counts.negatives == 0) {
    throw DegenerateDataError("metric needs at least one positive and one negative sample");
  }
  return counts;
}

// Cumulative (fp, tp) after admitting each distinct score, highest first.
struct SweepStep {
  double score;
  std::size_t tp;
  std::size_t fp;
};

std::vector<SweepStep> descending_sweep(std::span<const double> scores, std::span<const int> labels) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<SweepStep> steps;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (labels[order[i]] == 1 ? tp : fp) += 1;
    const bool group_ends = i + 1 == order.size() || scores[order[i + 1]] != scores[order[i]];
    if (group_ends) {
      steps.push_back({scores[order[i]], tp, fp});
    }
  }
  return steps;
}

} // namespace

ConfusionMatrix confusion_at_threshold(std::span<const double> scores, std::span<const int> labels, double threshold) {
  check_inputs(scores, labels);
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      (predicted ? cm.tp : cm.fn) += 1;
    } else {
      (predicted ? cm.fp : cm.tn) += 1;
    }
  }
  return cm;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  const ClassCounts counts = require_both_classes(scores, labels);
  // Mann-Whitney U with mid-ranks for ties.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) {
      ++j;
    }
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += mid_rank;
      }
    }
    i = j + 1;
  }
  const auto p = static_cast<double>(counts.positives);
  const auto n = static_cast<double>(counts.negatives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

KsResult ks_statistic(std::span<const double> scores, std::span<const int> labels) {
  const ClassCounts counts = require_both_classes(scores, labels);
  const auto p = static_cast<double>(counts.positives);
  const auto n = static_cast<double>(counts.negatives);
  KsResult best{-std::numeric_limits<double>::infinity(), 0.0};
  for (const SweepStep &step : descending_sweep(scores, labels)) {
    const double gap = static_cast<double>(step.tp) / p - static_cast<double>(step.fp) / n;
    if (gap > best.ks) {
      best = {gap, step.score};
    }
  }
  // The lowest threshold admits everything, so best.ks >= 0 always.
  best.ks = std::clamp(best.ks, 0.0, 1.0);
  return best;
}

double ks(std::span<const double> scores, std::span<const int> labels) { return ks_statistic(scores, labels).ks; }

double recall(const ConfusionMatrix &cm) {
  if (cm.tp + cm.fn == 0) {
    throw DegenerateDataError("recall is undefined without positive samples");
  }
  return static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
}

double precision(const ConfusionMatrix &cm) {
  if (cm.tp + cm.fp == 0) {
    throw DegenerateDataError("precision is undefined without predicted positives");
  }
  return static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  const ClassCounts counts = require_both_classes(scores, labels);
  const auto p = static_cast<double>(counts.positives);
  const auto n = static_cast<double>(counts.negatives);
  std::vector<RocPoint> curve{{0.0, 0.0}};
  for (const SweepStep &step : descending_sweep(scores, labels)) {
    curve.push_back({static_cast<double>(step.fp) / n, static_cast<double>(step.tp) / p});
  }
  return curve;
}

double trapezoid_area(std::span<const RocPoint> curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
  }
  return area;
}

MetricsReport evaluate(std::span<const double> scores, std::span<const int> labels, const ThresholdPolicy &policy,
                       int partition) {
  MetricsReport report;
  report.partition = partition;
  report.auc = auc(scores, labels);
  const KsResult k = ks_statistic(scores, labels);
  report.ks = k.ks;
  report.threshold = policy.fixed.value_or(k.threshold);
  report.confusion = confusion_at_threshold(scores, labels, report.threshold);
  report.recall = recall(report.confusion);
  report.precision = report.confusion.tp + report.confusion.fp == 0 ? 0.0 : precision(report.confusion);
  return report;
}

std::string csv_header() { return "partition,auc,ks,recall,precision,threshold"; }

std::string to_csv_row(const MetricsReport &report) {
  return std::to_string(report.partition) + "," + format_double(report.auc) + "," + format_double(report.ks) + "," +
         format_double(report.recall) + "," + format_double(report.precision) + "," + format_double(report.threshold);
}

} // namespace qcredit::metrics
