#pragma once

// Experiment orchestration: synthetic credit data, stratified partitions,
// stacking of classical base models into a 3-feature input, QNN training,
// and cross-validated evaluation against classical benchmarks.

#include "qcredit/ansatz.hpp"
#include "qcredit/classical.hpp"
#include "qcredit/metrics.hpp"
#include "qcredit/qsim.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace qcredit::pipeline {

inline constexpr std::size_t kRawFeatureCount = 8;
inline constexpr std::size_t kStackedFeatureCount = 3;
inline constexpr std::size_t kSyntheticSamples = 279;
inline constexpr std::size_t kSyntheticDefaults = 41;

/// Batch size per partition, partitions 1 through 10.
inline const std::vector<std::size_t> kReferenceBatchSizes = {64, 64, 32, 32, 32, 64, 128, 128, 32, 32};

// Feature order: cumulative early repayment, interest rate, credit score
// lower bound, credit score upper bound, online loan level, employment
// length, two anonymized features.
struct RawSample {
  std::array<double, kRawFeatureCount> features{};
  int label = 0;

  bool operator==(const RawSample &) const = default;
};

using Dataset = std::vector<RawSample>;

struct StackedSample {
  // Default probabilities from logistic regression, forest, boosted trees.
  std::array<double, kStackedFeatureCount> features{};
  int label = 0;

  bool operator==(const StackedSample &) const = default;
};

std::vector<int> labels_of(const Dataset &data);
std::vector<int> labels_of(const std::vector<StackedSample> &data);
classical::LabeledData to_labeled(const Dataset &data);
classical::LabeledData to_labeled(const std::vector<StackedSample> &data);
Dataset select(const Dataset &data, std::span<const std::size_t> indices);

/// 279 borrowers, 41 defaults, drawn from two class-conditional Gaussian
/// profiles and returned in shuffled order.
Dataset generate_synthetic_dataset(std::uint64_t seed);

void write_dataset_csv(std::ostream &out, const Dataset &data);
/// Parses the `f1..f8,label` CSV. Throws ParseError naming the line.
Dataset read_dataset_csv(std::istream &in);

// ---------------------------------------------------------------------------

struct PartitionPlan {
  int id = 1;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::size_t batch_size = 32;
};

/// Per partition the training set takes ceil(f * #defaults) defaults and
/// floor(f * #non-defaults) non-defaults, each class shuffled independently.
std::vector<PartitionPlan> stratified_partitions(std::span<const int> labels, std::size_t n_partitions,
                                                 double train_fraction, std::span<const std::size_t> batch_sizes,
                                                 std::uint64_t seed);

// ---------------------------------------------------------------------------

struct StackingConfig {
  classical::LogisticOptions logistic;
  classical::ForestOptions forest;
  classical::BoostOptions boosted;
  // When set, training-set features come from k-fold out-of-fold models.
  bool out_of_fold = false;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
};

struct BaseModels {
  classical::LogisticModel logistic;
  classical::ForestModel forest;
  classical::BoostedModel boosted;

  StackedSample stack(const RawSample &sample) const;
};

BaseModels fit_base_models(const Dataset &train, const StackingConfig &config);

/// Fits the base models on `train` once and maps every `apply_to` sample to
/// its three predicted default probabilities.
std::vector<StackedSample> build_stacked_features(const Dataset &train, const Dataset &apply_to,
                                                  const StackingConfig &config);

struct StackedPartition {
  std::vector<StackedSample> train;
  std::vector<StackedSample> test;
};

StackedPartition stack_partition(const Dataset &train, const Dataset &test, const StackingConfig &config);

// ---------------------------------------------------------------------------

struct TrainConfig {
  std::size_t epochs = 50;
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
  double init_low = -std::numbers::pi;
  double init_high = std::numbers::pi;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0; // 1-based
  double loss = 0.0;     // mean per-sample BCE seen during the epoch
  double train_auc = 0.0;
  std::vector<double> params;            // after the epoch
  std::vector<double> grads;             // mean batch gradient over the epoch
  std::vector<double> train_predictions; // with `params`, in input order
};

using TrainTrace = std::vector<EpochRecord>;

struct TrainResult {
  std::vector<double> initial_params;
  std::vector<double> final_params;
  std::vector<double> best_params;
  std::size_t best_epoch = 0;
  TrainTrace trace;
};

/// Batch gradient of the mean BCE over `batch` by parameter shift.
struct BatchGradient {
  double loss = 0.0;
  std::vector<double> predictions;
  std::vector<double> grad;
};

BatchGradient batch_gradient(const qsim::ParameterizedCircuit &circuit, std::span<const StackedSample> batch,
                             std::span<const double> theta, double angle_scale);

double batch_loss(const qsim::ParameterizedCircuit &circuit, std::span<const StackedSample> batch,
                  std::span<const double> theta, double angle_scale);

std::vector<double> predict_qnn(const qsim::ParameterizedCircuit &circuit, std::span<const StackedSample> data,
                                std::span<const double> theta, double angle_scale);

/// Mini-batch AdamW on the BCE loss with parameter-shift gradients. The
/// best parameters are the snapshot with the highest training AUC, earliest
/// epoch on ties.
TrainResult train_qnn(const std::vector<StackedSample> &train, const qsim::ParameterizedCircuit &circuit,
                      double angle_scale, const TrainConfig &config);

// ---------------------------------------------------------------------------

struct CrossValidationConfig {
  ansatz::AnsatzConfig ansatz;
  TrainConfig train;
  StackingConfig stacking;
  std::vector<std::size_t> batch_sizes = kReferenceBatchSizes;
  std::size_t n_partitions = 10;
  double train_fraction = 0.7;
  metrics::ThresholdPolicy threshold;
  std::uint64_t master_seed = 0;
  std::size_t jobs = 1;

  void validate() const;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0; // sample standard deviation
};

struct AggregateReport {
  MeanStd auc;
  MeanStd ks;
  MeanStd recall;
  MeanStd precision;
};

AggregateReport aggregate(std::span<const metrics::MetricsReport> reports);

/// Everything derived deterministically for one partition before training.
struct PreparedPartition {
  PartitionPlan plan;
  StackedPartition stacked;
};

std::vector<PartitionPlan> plan_partitions(const Dataset &data, const CrossValidationConfig &config);
PreparedPartition prepare_partition(const Dataset &data, const PartitionPlan &plan,
                                    const CrossValidationConfig &config);

struct PartitionOutcome {
  metrics::MetricsReport report;
  TrainResult training;
  std::vector<double> test_scores;
};

PartitionOutcome run_partition(const PreparedPartition &prepared, const CrossValidationConfig &config);

struct CrossValidationResult {
  std::vector<PartitionPlan> plans;
  std::vector<PartitionOutcome> outcomes;
  AggregateReport aggregate;

  std::vector<metrics::MetricsReport> reports() const;
};

/// Runs every partition (up to `config.jobs` at a time); output does not
/// depend on the job count.
CrossValidationResult run_cross_validation(const Dataset &data, const CrossValidationConfig &config);

struct BenchmarkRow {
  std::string model;
  std::vector<metrics::MetricsReport> per_partition;
  AggregateReport metrics;
};

/// Logistic regression, decision tree, forest, and boosted trees trained on
/// the stacked features of each partition and scored on its test set. When
/// `qnn_reports` is non-empty a "qnn" row is appended.
std::vector<BenchmarkRow> run_benchmarks(const Dataset &data, std::span<const PartitionPlan> partitions,
                                         const CrossValidationConfig &config,
                                         std::span<const metrics::MetricsReport> qnn_reports = {});

void write_benchmark_csv(std::ostream &out, std::span<const BenchmarkRow> rows);

} // namespace qcredit::pipeline
