#include "qcredit/errors.hpp"
#include "qcredit/metrics.hpp"
#include "qcredit/pipeline.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace qcredit;
using namespace qcredit::pipeline;

namespace {

std::vector<StackedSample> toy_separable(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  std::vector<StackedSample> out;
  for (int i = 0; i < 20; ++i) {
    StackedSample s;
    s.label = i % 2;
    const double centre = s.label == 1 ? 0.8 : 0.2;
    for (double &f : s.features) {
      f = centre + jitter(rng);
    }
    out.push_back(s);
  }
  return out;
}

std::string dataset_text(const Dataset &data) {
  std::ostringstream ss;
  write_dataset_csv(ss, data);
  return ss.str();
}

Dataset parse(const std::string &text) {
  std::istringstream in(text);
  return read_dataset_csv(in);
}

CrossValidationConfig quick_config() {
  CrossValidationConfig cfg;
  cfg.train.epochs = 3;
  cfg.stacking.forest.n_trees = 10;
  cfg.stacking.boosted.n_rounds = 10;
  return cfg;
}

} // namespace

TEST_CASE("synthetic dataset") {
  const auto data = generate_synthetic_dataset(0);
  CHECK(data.size() == 279);
  const auto labels = labels_of(data);
  CHECK(std::count(labels.begin(), labels.end(), 1) == 41);
  CHECK(static_cast<double>(41) / 279.0 == doctest::Approx(0.147).epsilon(1e-3));
  CHECK(data == generate_synthetic_dataset(0));
  CHECK_FALSE(data == generate_synthetic_dataset(1));
  for (const auto &s : data) {
    CHECK(s.features[3] == s.features[2] + 4.0);
    CHECK(s.features[4] >= 1.0);
    CHECK(s.features[4] <= 7.0);
  }
}

TEST_CASE("dataset CSV round-trips exactly") {
  const auto data = generate_synthetic_dataset(3);
  const std::string text = dataset_text(data);
  CHECK(std::count(text.begin(), text.end(), '\n') == 280);
  CHECK(text.rfind("f1,f2,f3,f4,f5,f6,f7,f8,label\n", 0) == 0);
  const auto back = parse(text);
  CHECK(back == data);
  CHECK(dataset_text(back) == text);
  CHECK(parse("f1,f2,f3,f4,f5,f6,f7,f8,label\r\n1,2,3,4,5,6,7,8,1\r\n\r\n").size() == 1);
}

TEST_CASE("dataset CSV errors name the line") {
  const std::string header = "f1,f2,f3,f4,f5,f6,f7,f8,label\n";
  const std::string good = "1,2,3,4,5,6,7,8,0\n";
  auto message = [](const std::string &text) {
    try {
      parse(text);
    } catch (const ParseError &e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("").find("line 1") != std::string::npos);
  CHECK(message("a,b\n" + good).find("line 1") != std::string::npos);
  CHECK(message(header + good + "1,2,3\n").find("line 3") != std::string::npos);
  CHECK(message(header + good + good + "1,2,x,4,5,6,7,8,0\n").find("line 4") != std::string::npos);
  CHECK(message(header + "1,2,3,4,5,6,7,8,2\n").find("line 2") != std::string::npos);
  CHECK(message(header + "1,2,3,4,5,6,7,nan,1\n").find("line 2") != std::string::npos);
}

TEST_CASE("stratified partitions reproduce the reference split") {
  const auto data = generate_synthetic_dataset(0);
  const auto labels = labels_of(data);
  const auto plans = stratified_partitions(labels, 10, 0.7, kReferenceBatchSizes, 42);
  REQUIRE(plans.size() == 10);
  for (std::size_t k = 0; k < plans.size(); ++k) {
    const auto &p = plans[k];
    CHECK(p.id == static_cast<int>(k + 1));
    CHECK(p.train.size() == 195);
    CHECK(p.test.size() == 84);
    std::size_t train_pos = 0;
    std::size_t test_pos = 0;
    for (auto i : p.train) {
      train_pos += static_cast<std::size_t>(labels[i]);
    }
    for (auto i : p.test) {
      test_pos += static_cast<std::size_t>(labels[i]);
    }
    CHECK(train_pos == 29);
    CHECK(test_pos == 12);
    std::set<std::size_t> all(p.train.begin(), p.train.end());
    all.insert(p.test.begin(), p.test.end());
    CHECK(all.size() == 279);
    CHECK(*all.rbegin() == 278);
    CHECK(p.batch_size == kReferenceBatchSizes[k]);
  }
  CHECK(plans[0].train != plans[1].train);

  const auto again = stratified_partitions(labels, 10, 0.7, kReferenceBatchSizes, 42);
  CHECK(again[4].train == plans[4].train);

  CHECK_THROWS_AS(stratified_partitions(labels, 3, 0.7, kReferenceBatchSizes, 1), ContractError);
  const std::vector<int> one_class(20, 0);
  const std::vector<std::size_t> sizes = {8};
  CHECK_THROWS_AS(stratified_partitions(one_class, 1, 0.7, sizes, 1), DegenerateDataError);
}

TEST_CASE("stacked features") {
  const auto data = generate_synthetic_dataset(0);
  const auto plans = stratified_partitions(labels_of(data), 10, 0.7, kReferenceBatchSizes, 1);
  const auto train = select(data, plans[0].train);
  const auto test = select(data, plans[0].test);
  StackingConfig cfg;
  cfg.seed = 9;
  const auto stacked = build_stacked_features(train, test, cfg);
  REQUIRE(stacked.size() == test.size());
  for (std::size_t i = 0; i < stacked.size(); ++i) {
    CHECK(stacked[i].label == test[i].label);
    for (double f : stacked[i].features) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
  }
  CHECK(build_stacked_features(train, test, cfg) == stacked);

  const auto part = stack_partition(train, test, cfg);
  CHECK(part.test == stacked);
  CHECK(part.train.size() == train.size());

  StackingConfig oof = cfg;
  oof.out_of_fold = true;
  const auto folded = stack_partition(train, test, oof);
  CHECK(folded.test == stacked);
  CHECK(folded.train != part.train);
  for (std::size_t i = 0; i < train.size(); ++i) {
    CHECK(folded.train[i].label == train[i].label);
  }

  Dataset single(train.begin(), train.begin() + 5);
  for (auto &s : single) {
    s.label = 0;
  }
  CHECK_THROWS_AS(build_stacked_features(single, test, cfg), DegenerateDataError);
}

TEST_CASE("batch gradient matches finite differences of the batch loss") {
  const auto circuit = ansatz::build_simulation_ansatz({});
  const auto train = toy_separable(5);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 8;
  cfg.seed = 2;
  const auto result = train_qnn(train, circuit, std::numbers::pi, cfg);
  const std::span<const StackedSample> batch(train.data(), 8);
  for (const auto &theta : {result.initial_params, result.trace[1].params, result.final_params}) {
    const auto g = batch_gradient(circuit, batch, theta, std::numbers::pi);
    CHECK(g.loss == batch_loss(circuit, batch, theta, std::numbers::pi));
    const double eps = 1e-5;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      auto up = theta;
      auto down = theta;
      up[i] += eps;
      down[i] -= eps;
      const double fd = (batch_loss(circuit, batch, up, std::numbers::pi) -
                         batch_loss(circuit, batch, down, std::numbers::pi)) /
                        (2.0 * eps);
      CHECK(std::abs(g.grad[i] - fd) < 1e-5);
    }
  }
}

TEST_CASE("training on a separable toy set") {
  const auto circuit = ansatz::build_simulation_ansatz({});
  const auto train = toy_separable(1);
  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.seed = 0;
  const auto result = train_qnn(train, circuit, std::numbers::pi, cfg);
  REQUIRE(result.trace.size() == 50);
  double best = 0.0;
  for (std::size_t e = 0; e < result.trace.size(); ++e) {
    CHECK(result.trace[e].epoch == e + 1);
    best = std::max(best, result.trace[e].train_auc);
  }
  CHECK(best >= 0.99);
  CHECK(result.trace[9].loss < result.trace[0].loss);

  // Best parameters reproduce the best recorded AUC, at the earliest epoch.
  const auto &chosen = result.trace[result.best_epoch - 1];
  CHECK(chosen.train_auc == best);
  CHECK(chosen.params == result.best_params);
  for (std::size_t e = 0; e + 1 < result.best_epoch; ++e) {
    CHECK(result.trace[e].train_auc < best);
  }
  const auto preds = predict_qnn(circuit, train, result.best_params, std::numbers::pi);
  CHECK(metrics::auc(preds, labels_of(train)) == best);
  CHECK(result.final_params == result.trace.back().params);

  CHECK(train_qnn(train, circuit, std::numbers::pi, cfg).trace.back().params == result.final_params);
}

TEST_CASE("training with a zero learning rate keeps the initial parameters") {
  const auto circuit = ansatz::build_simulation_ansatz({});
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.epochs = 3;
  const auto result = train_qnn(toy_separable(2), circuit, std::numbers::pi, cfg);
  for (const auto &rec : result.trace) {
    CHECK(rec.params == result.initial_params);
  }
}

TEST_CASE("training contracts") {
  const auto circuit = ansatz::build_simulation_ansatz({});
  auto train = toy_separable(3);
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK_THROWS_AS(train_qnn(train, circuit, std::numbers::pi, cfg), ContractError);
  cfg.epochs = 1;
  ansatz::AnsatzConfig four;
  four.num_qubits = 4;
  CHECK_THROWS_AS(train_qnn(train, ansatz::build_simulation_ansatz(four), std::numbers::pi, cfg), ContractError);
  for (auto &s : train) {
    s.label = 1;
  }
  CHECK_THROWS_AS(train_qnn(train, circuit, std::numbers::pi, cfg), DegenerateDataError);
}

TEST_CASE("aggregate uses the sample standard deviation") {
  std::vector<metrics::MetricsReport> reports(3);
  reports[0].auc = 0.7;
  reports[1].auc = 0.8;
  reports[2].auc = 0.9;
  const auto agg = aggregate(reports);
  CHECK(agg.auc.mean == doctest::Approx(0.8));
  CHECK(agg.auc.std == doctest::Approx(0.1));
  CHECK(agg.ks.std == 0.0);
}

TEST_CASE("cross-validation is deterministic and independent of the job count") {
  const auto data = generate_synthetic_dataset(0);
  auto cfg = quick_config();
  const auto serial = run_cross_validation(data, cfg);
  REQUIRE(serial.outcomes.size() == 10);
  for (const auto &o : serial.outcomes) {
    CHECK(o.report.auc >= 0.0);
    CHECK(o.report.auc <= 1.0);
    CHECK(o.training.trace.size() == 3);
  }
  cfg.jobs = 3;
  const auto parallel = run_cross_validation(data, cfg);
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(metrics::to_csv_row(parallel.outcomes[k].report) == metrics::to_csv_row(serial.outcomes[k].report));
    CHECK(parallel.outcomes[k].training.final_params == serial.outcomes[k].training.final_params);
  }

  const auto reports = serial.reports();
  const auto rows = run_benchmarks(data, serial.plans, cfg, reports);
  std::vector<std::string> names;
  for (const auto &r : rows) {
    names.push_back(r.model);
    CHECK(r.per_partition.size() == 10);
  }
  CHECK(names == std::vector<std::string>{"logistic", "tree", "forest", "boosted", "qnn"});
  std::ostringstream csv;
  write_benchmark_csv(csv, rows);
  const std::string text = csv.str();
  CHECK(text.rfind("model,auc,ks,recall,precision,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 6);
}

TEST_CASE("cross-validation config validation") {
  auto cfg = quick_config();
  cfg.batch_sizes.pop_back();
  CHECK_THROWS_AS(cfg.validate(), ContractError);
  cfg = quick_config();
  cfg.ansatz.num_qubits = 4;
  CHECK_THROWS_AS(cfg.validate(), ContractError);
  cfg = quick_config();
  cfg.train_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ContractError);
}
