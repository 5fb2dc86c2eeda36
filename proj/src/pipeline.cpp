#include "qcredit/pipeline.hpp"

#include "qcredit/errors.hpp"
#include "qcredit/format.hpp"
#include "qcredit/gradients.hpp"
#include "qcredit/optimizer.hpp"
#include "qcredit/seeding.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace qcredit::pipeline {

namespace {

// Seed streams under the cross-validation master seed.
constexpr std::uint64_t kPartitionStream = 0x5041525449ULL;
constexpr std::uint64_t kStackingStream = 0x535441434bULL;
constexpr std::uint64_t kQnnStream = 0x514e4eULL;
constexpr std::uint64_t kBenchmarkStream = 0x42454e4348ULL;

// Class-conditional profile of one raw feature: (non-default mean, default
// mean, spread).
struct FeatureProfile {
  double mean_good;
  double mean_bad;
  double spread;
};

constexpr std::array<FeatureProfile, kRawFeatureCount> kProfiles = {{
    {8.0, 7.3, 0.9},     // log cumulative early repayment
    {11.0, 13.2, 2.6},   // interest rate, percent
    {690.0, 664.0, 35.0}, // credit score lower bound
    {0.0, 0.0, 0.0},     // upper bound, derived from the lower bound
    {3.0, 4.1, 1.3},     // online loan level 1..7
    {5.5, 4.3, 3.0},     // employment length, years 0..10
    {0.0, 0.55, 1.0},    // anonymized
    {0.0, -0.4, 1.0},    // anonymized
}};

double round_decimals(double value, double scale) { return std::round(value * scale) / scale; }

RawSample draw_sample(int label, std::mt19937_64 &rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  auto draw = [&](std::size_t f) {
    const auto &p = kProfiles[f];
    return (label == 1 ? p.mean_bad : p.mean_good) + p.spread * unit(rng);
  };
  RawSample s;
  s.label = label;
  s.features[0] = round_decimals(std::exp(draw(0)), 100.0);
  s.features[1] = round_decimals(std::clamp(draw(1), 5.0, 24.0), 100.0);
  s.features[2] = std::clamp(5.0 * std::round(draw(2) / 5.0), 600.0, 845.0);
  s.features[3] = s.features[2] + 4.0;
  s.features[4] = std::clamp(std::round(draw(4)), 1.0, 7.0);
  s.features[5] = std::clamp(std::round(draw(5)), 0.0, 10.0);
  s.features[6] = round_decimals(draw(6), 1e4);
  s.features[7] = round_decimals(draw(7), 1e4);
  return s;
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<double> stacked_row(const StackedSample &s) { return {s.features.begin(), s.features.end()}; }

std::vector<StackedSample> stack_all(const BaseModels &models, const Dataset &data) {
  std::vector<StackedSample> out;
  out.reserve(data.size());
  for (const auto &s : data) {
    out.push_back(models.stack(s));
  }
  return out;
}

template <typename Fn> void for_each_index(std::size_t count, std::size_t jobs, Fn &&fn) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) {
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto &t : workers) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

MeanStd mean_std(const std::vector<double> &values) {
  MeanStd out;
  if (values.empty()) {
    return out;
  }
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      ss += (v - out.mean) * (v - out.mean);
    }
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

} // namespace

std::vector<int> labels_of(const Dataset &data) {
  std::vector<int> labels;
  labels.reserve(data.size());
  for (const auto &s : data) {
    labels.push_back(s.label);
  }
  return labels;
}

std::vector<int> labels_of(const std::vector<StackedSample> &data) {
  std::vector<int> labels;
  labels.reserve(data.size());
  for (const auto &s : data) {
    labels.push_back(s.label);
  }
  return labels;
}

classical::LabeledData to_labeled(const Dataset &data) {
  classical::LabeledData out;
  for (const auto &s : data) {
    out.features.emplace_back(s.features.begin(), s.features.end());
    out.labels.push_back(s.label);
  }
  return out;
}

classical::LabeledData to_labeled(const std::vector<StackedSample> &data) {
  classical::LabeledData out;
  for (const auto &s : data) {
    out.features.push_back(stacked_row(s));
    out.labels.push_back(s.label);
  }
  return out;
}

Dataset select(const Dataset &data, std::span<const std::size_t> indices) {
  Dataset out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    out.push_back(data.at(i));
  }
  return out;
}

Dataset generate_synthetic_dataset(std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, 0xDA7A));
  Dataset data;
  data.reserve(kSyntheticSamples);
  for (std::size_t i = 0; i < kSyntheticSamples; ++i) {
    data.push_back(draw_sample(i < kSyntheticDefaults ? 1 : 0, rng));
  }
  std::shuffle(data.begin(), data.end(), rng);
  return data;
}

void write_dataset_csv(std::ostream &out, const Dataset &data) {
  for (std::size_t f = 0; f < kRawFeatureCount; ++f) {
    out << 'f' << (f + 1) << ',';
  }
  out << "label\n";
  for (const auto &s : data) {
    for (double v : s.features) {
      out << format_double(v) << ',';
    }
    out << s.label << '\n';
  }
}

Dataset read_dataset_csv(std::istream &in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw ParseError("line 1: missing header");
  }
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  const auto header = split_csv_line(trim(line));
  std::vector<std::string> expected;
  for (std::size_t f = 0; f < kRawFeatureCount; ++f) {
    expected.push_back("f" + std::to_string(f + 1));
  }
  expected.emplace_back("label");
  std::vector<std::string> got;
  for (const auto &h : header) {
    got.push_back(trim(h));
  }
  if (got != expected) {
    throw ParseError("line 1: expected header f1,...,f8,label");
  }

  Dataset data;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != kRawFeatureCount + 1) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(kRawFeatureCount + 1) +
                       " fields, found " + std::to_string(fields.size()));
    }
    RawSample s;
    for (std::size_t f = 0; f <= kRawFeatureCount; ++f) {
      const std::string field = trim(fields[f]);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw ParseError("line " + std::to_string(line_no) + ": column " + std::to_string(f + 1) +
                         " is not a finite number: '" + field + "'");
      }
      if (f < kRawFeatureCount) {
        s.features[f] = value;
      } else if (value == 0.0 || value == 1.0) {
        s.label = static_cast<int>(value);
      } else {
        throw ParseError("line " + std::to_string(line_no) + ": label must be 0 or 1, got '" + field + "'");
      }
    }
    data.push_back(s);
  }
  return data;
}

// ---------------------------------------------------------------------------

std::vector<PartitionPlan> stratified_partitions(std::span<const int> labels, std::size_t n_partitions,
                                                 double train_fraction, std::span<const std::size_t> batch_sizes,
                                                 std::uint64_t seed) {
  if (batch_sizes.size() != n_partitions) {
    throw ContractError("need one batch size per partition (" + std::to_string(n_partitions) + "), got " +
                        std::to_string(batch_sizes.size()));
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ContractError("train_fraction must lie strictly between 0 and 1");
  }
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      positives.push_back(i);
    } else if (labels[i] == 0) {
      negatives.push_back(i);
    } else {
      throw ContractError("labels must be 0 or 1");
    }
  }
  if (positives.empty() || negatives.empty()) {
    throw DegenerateDataError("stratified partitioning needs both classes");
  }
  // The product is nudged to absorb representation error (0.7 * 41 is
  // 28.699999999999996 in binary).
  const auto n_pos = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(positives.size()) - 1e-9));
  const auto n_neg =
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(negatives.size()) + 1e-9));

  std::vector<PartitionPlan> plans;
  for (std::size_t k = 0; k < n_partitions; ++k) {
    if (batch_sizes[k] < 1) {
      throw ContractError("batch sizes must be positive");
    }
    std::mt19937_64 rng(derive_seed(seed, 0x57A7, k));
    std::vector<std::size_t> pos = positives;
    std::vector<std::size_t> neg = negatives;
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);

    PartitionPlan plan;
    plan.id = static_cast<int>(k + 1);
    plan.batch_size = batch_sizes[k];
    plan.train.assign(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(n_pos));
    plan.train.insert(plan.train.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(n_neg));
    plan.test.assign(pos.begin() + static_cast<std::ptrdiff_t>(n_pos), pos.end());
    plan.test.insert(plan.test.end(), neg.begin() + static_cast<std::ptrdiff_t>(n_neg), neg.end());
    std::sort(plan.train.begin(), plan.train.end());
    std::sort(plan.test.begin(), plan.test.end());
    plans.push_back(std::move(plan));
  }
  return plans;
}

// ---------------------------------------------------------------------------

StackedSample BaseModels::stack(const RawSample &sample) const {
  StackedSample out;
  out.label = sample.label;
  out.features = {logistic.predict(sample.features), forest.predict(sample.features), boosted.predict(sample.features)};
  return out;
}

BaseModels fit_base_models(const Dataset &train, const StackingConfig &config) {
  const classical::LabeledData data = to_labeled(train);
  data.validate();
  data.require_both_classes();
  classical::ForestOptions forest = config.forest;
  forest.seed = derive_seed(config.seed, 1);
  classical::BoostOptions boosted = config.boosted;
  boosted.seed = derive_seed(config.seed, 2);
  return BaseModels{classical::train_logistic(data, config.logistic), classical::train_forest(data, forest),
                    classical::train_boosted(data, boosted)};
}

std::vector<StackedSample> build_stacked_features(const Dataset &train, const Dataset &apply_to,
                                                  const StackingConfig &config) {
  return stack_all(fit_base_models(train, config), apply_to);
}

StackedPartition stack_partition(const Dataset &train, const Dataset &test, const StackingConfig &config) {
  const BaseModels full = fit_base_models(train, config);
  StackedPartition out;
  out.test = stack_all(full, test);
  if (!config.out_of_fold) {
    out.train = stack_all(full, train);
    return out;
  }
  if (config.folds < 2) {
    throw ContractError("out-of-fold stacking needs at least 2 folds");
  }
  // Stratified fold assignment: each class dealt round-robin after a shuffle.
  std::vector<std::size_t> fold(train.size());
  std::mt19937_64 rng(derive_seed(config.seed, 3));
  for (int cls : {1, 0}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (train[i].label == cls) {
        members.push_back(i);
      }
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t j = 0; j < members.size(); ++j) {
      fold[members[j]] = j % config.folds;
    }
  }
  out.train.resize(train.size());
  for (std::size_t f = 0; f < config.folds; ++f) {
    Dataset fit_rows;
    std::vector<std::size_t> held_out;
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (fold[i] == f) {
        held_out.push_back(i);
      } else {
        fit_rows.push_back(train[i]);
      }
    }
    StackingConfig fold_config = config;
    fold_config.seed = derive_seed(config.seed, 4, f);
    const BaseModels models = fit_base_models(fit_rows, fold_config);
    for (std::size_t i : held_out) {
      out.train[i] = models.stack(train[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
  if (epochs < 1) {
    throw ContractError("epochs must be >= 1");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ContractError("learning_rate must be a finite non-negative number");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw ContractError("moment decays must lie in [0, 1)");
  }
  if (!(epsilon > 0.0) || !(weight_decay >= 0.0)) {
    throw ContractError("epsilon must be positive and weight_decay non-negative");
  }
  if (!(init_low <= init_high) || !std::isfinite(init_low) || !std::isfinite(init_high)) {
    throw ContractError("initialization range must be finite with init_low <= init_high");
  }
  if (batch_size < 1) {
    throw ContractError("batch_size must be >= 1");
  }
}

std::vector<double> predict_qnn(const qsim::ParameterizedCircuit &circuit, std::span<const StackedSample> data,
                                std::span<const double> theta, double angle_scale) {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto &s : data) {
    out.push_back(ansatz::qnn_forward(circuit, s.features, theta, angle_scale));
  }
  return out;
}

double batch_loss(const qsim::ParameterizedCircuit &circuit, std::span<const StackedSample> batch,
                  std::span<const double> theta, double angle_scale) {
  const std::vector<double> p = predict_qnn(circuit, batch, theta, angle_scale);
  std::vector<int> labels;
  for (const auto &s : batch) {
    labels.push_back(s.label);
  }
  return gradients::bce_loss(p, labels);
}

BatchGradient batch_gradient(const qsim::ParameterizedCircuit &circuit, std::span<const StackedSample> batch,
                             std::span<const double> theta, double angle_scale) {
  BatchGradient out;
  gradients::Jacobian jacobian;
  std::vector<int> labels;
  jacobian.reserve(batch.size());
  for (const auto &s : batch) {
    const std::vector<double> angles = ansatz::encode_features(s.features, angle_scale);
    const double z = gradients::expectation_of(circuit, angles, theta);
    out.predictions.push_back((1.0 - z) / 2.0);
    std::vector<double> dz = gradients::parameter_shift_gradient(circuit, angles, theta).grad;
    for (double &g : dz) {
      g *= -0.5;
    }
    jacobian.push_back(std::move(dz));
    labels.push_back(s.label);
  }
  out.loss = gradients::bce_loss(out.predictions, labels);
  out.grad = gradients::loss_vjp(out.predictions, labels, jacobian);
  return out;
}

TrainResult train_qnn(const std::vector<StackedSample> &train, const qsim::ParameterizedCircuit &circuit,
                      double angle_scale, const TrainConfig &config) {
  config.validate();
  circuit.validate();
  if (circuit.num_encoding_slots != kStackedFeatureCount) {
    throw ContractError("circuit has " + std::to_string(circuit.num_encoding_slots) + " encoding slots but samples carry " +
                        std::to_string(kStackedFeatureCount) + " features");
  }
  if (train.empty()) {
    throw ContractError("empty training set");
  }
  const std::vector<int> labels = labels_of(train);
  to_labeled(train).require_both_classes();

  const std::size_t n_params = circuit.num_trainable_slots;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> init(config.init_low, config.init_high);
  std::vector<double> theta(n_params);
  for (double &t : theta) {
    t = config.init_low == config.init_high ? config.init_low : init(rng);
  }

  TrainResult result;
  result.initial_params = theta;
  AdamW optimizer(n_params, {config.learning_rate, config.beta1, config.beta2, config.epsilon, config.weight_decay});
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<StackedSample> batch;
  double best_auc = -1.0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::vector<double> grad_sum(n_params, 0.0);
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(train[order[i]]);
      }
      const BatchGradient bg = batch_gradient(circuit, batch, theta, angle_scale);
      loss_sum += bg.loss * static_cast<double>(batch.size());
      for (std::size_t i = 0; i < n_params; ++i) {
        grad_sum[i] += bg.grad[i];
      }
      ++batches;
      optimizer.step(theta, bg.grad);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.loss = loss_sum / static_cast<double>(train.size());
    record.params = theta;
    record.grads = grad_sum;
    for (double &g : record.grads) {
      g /= static_cast<double>(batches);
    }
    record.train_predictions = predict_qnn(circuit, train, theta, angle_scale);
    record.train_auc = metrics::auc(record.train_predictions, labels);
    if (record.train_auc > best_auc) {
      best_auc = record.train_auc;
      result.best_params = theta;
      result.best_epoch = epoch;
    }
    result.trace.push_back(std::move(record));
  }
  result.final_params = theta;
  return result;
}

// ---------------------------------------------------------------------------

void CrossValidationConfig::validate() const {
  ansatz.validate();
  train.validate();
  if (n_partitions < 1) {
    throw ContractError("need at least one partition");
  }
  if (batch_sizes.size() != n_partitions) {
    throw ContractError("batch_sizes must list one entry per partition");
  }
  for (std::size_t b : batch_sizes) {
    if (b < 1) {
      throw ContractError("batch sizes must be positive");
    }
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ContractError("train_fraction must lie strictly between 0 and 1");
  }
  if (ansatz.num_qubits != kStackedFeatureCount) {
    throw ContractError("the stacked input has 3 features, so the ansatz needs 3 qubits");
  }
  if (jobs < 1) {
    throw ContractError("jobs must be >= 1");
  }
}

AggregateReport aggregate(std::span<const metrics::MetricsReport> reports) {
  std::vector<double> auc;
  std::vector<double> ks;
  std::vector<double> rec;
  std::vector<double> prec;
  for (const auto &r : reports) {
    auc.push_back(r.auc);
    ks.push_back(r.ks);
    rec.push_back(r.recall);
    prec.push_back(r.precision);
  }
  return {mean_std(auc), mean_std(ks), mean_std(rec), mean_std(prec)};
}

std::vector<PartitionPlan> plan_partitions(const Dataset &data, const CrossValidationConfig &config) {
  return stratified_partitions(labels_of(data), config.n_partitions, config.train_fraction, config.batch_sizes,
                               derive_seed(config.master_seed, kPartitionStream));
}

PreparedPartition prepare_partition(const Dataset &data, const PartitionPlan &plan,
                                    const CrossValidationConfig &config) {
  StackingConfig stacking = config.stacking;
  stacking.seed = derive_seed(config.master_seed, kStackingStream, static_cast<std::uint64_t>(plan.id));
  return {plan, stack_partition(select(data, plan.train), select(data, plan.test), stacking)};
}

PartitionOutcome run_partition(const PreparedPartition &prepared, const CrossValidationConfig &config) {
  const qsim::ParameterizedCircuit circuit = ansatz::build_ansatz(config.ansatz);
  TrainConfig train = config.train;
  train.batch_size = prepared.plan.batch_size;
  train.seed = derive_seed(config.master_seed, kQnnStream, static_cast<std::uint64_t>(prepared.plan.id));

  PartitionOutcome outcome;
  outcome.training = train_qnn(prepared.stacked.train, circuit, config.ansatz.angle_scale, train);
  outcome.test_scores =
      predict_qnn(circuit, prepared.stacked.test, outcome.training.best_params, config.ansatz.angle_scale);
  outcome.report =
      metrics::evaluate(outcome.test_scores, labels_of(prepared.stacked.test), config.threshold, prepared.plan.id);
  return outcome;
}

std::vector<metrics::MetricsReport> CrossValidationResult::reports() const {
  std::vector<metrics::MetricsReport> out;
  for (const auto &o : outcomes) {
    out.push_back(o.report);
  }
  return out;
}

CrossValidationResult run_cross_validation(const Dataset &data, const CrossValidationConfig &config) {
  config.validate();
  CrossValidationResult result;
  result.plans = plan_partitions(data, config);
  result.outcomes.resize(result.plans.size());
  for_each_index(result.plans.size(), config.jobs, [&](std::size_t k) {
    result.outcomes[k] = run_partition(prepare_partition(data, result.plans[k], config), config);
  });
  const auto reports = result.reports();
  result.aggregate = aggregate(reports);
  return result;
}

std::vector<BenchmarkRow> run_benchmarks(const Dataset &data, std::span<const PartitionPlan> partitions,
                                         const CrossValidationConfig &config,
                                         std::span<const metrics::MetricsReport> qnn_reports) {
  config.validate();
  const std::vector<std::string> names = {"logistic", "tree", "forest", "boosted"};
  std::vector<std::vector<metrics::MetricsReport>> per_model(names.size(),
                                                             std::vector<metrics::MetricsReport>(partitions.size()));
  for_each_index(partitions.size(), config.jobs, [&](std::size_t k) {
    const PartitionPlan &plan = partitions[k];
    const PreparedPartition prepared = prepare_partition(data, plan, config);
    const classical::LabeledData train = to_labeled(prepared.stacked.train);
    const classical::LabeledData test = to_labeled(prepared.stacked.test);

    classical::ForestOptions forest = config.stacking.forest;
    forest.seed = derive_seed(config.master_seed, kBenchmarkStream, static_cast<std::uint64_t>(plan.id));
    classical::BoostOptions boosted = config.stacking.boosted;
    boosted.seed = forest.seed;

    const std::vector<std::vector<double>> scores = {
        classical::train_logistic(train, config.stacking.logistic).predict(test.features),
        classical::build_tree(train).predict(test.features),
        classical::train_forest(train, forest).predict(test.features),
        classical::train_boosted(train, boosted).predict(test.features),
    };
    for (std::size_t m = 0; m < names.size(); ++m) {
      per_model[m][k] = metrics::evaluate(scores[m], test.labels, config.threshold, plan.id);
    }
  });

  std::vector<BenchmarkRow> rows;
  for (std::size_t m = 0; m < names.size(); ++m) {
    rows.push_back({names[m], per_model[m], aggregate(per_model[m])});
  }
  if (!qnn_reports.empty()) {
    std::vector<metrics::MetricsReport> qnn(qnn_reports.begin(), qnn_reports.end());
    rows.push_back({"qnn", qnn, aggregate(qnn)});
  }
  return rows;
}

void write_benchmark_csv(std::ostream &out, std::span<const BenchmarkRow> rows) {
  out << "model,auc,ks,recall,precision,auc_std,ks_std,recall_std,precision_std\n";
  for (const auto &row : rows) {
    const auto &m = row.metrics;
    out << row.model << ',' << format_double(m.auc.mean) << ',' << format_double(m.ks.mean) << ','
        << format_double(m.recall.mean) << ',' << format_double(m.precision.mean) << ',' << format_double(m.auc.std)
        << ',' << format_double(m.ks.std) << ',' << format_double(m.recall.std) << ','
        << format_double(m.precision.std) << '\n';
  }
}

} // namespace qcredit::pipeline
