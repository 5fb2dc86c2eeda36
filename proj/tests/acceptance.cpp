// Acceptance suite: one PASS/FAIL line per criterion.

#include "oracles.hpp"
#include "qcredit/ansatz.hpp"
#include "qcredit/classical.hpp"
#include "qcredit/gradients.hpp"
#include "qcredit/metrics.hpp"
#include "qcredit/pipeline.hpp"
#include "qcredit/qsim.hpp"
#include "qcredit/serialize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace qcredit;

namespace {

constexpr double pi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool ok, const std::string &detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) {
    ++failures;
  }
}

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void gradient_exactness() {
  const auto circuit = ansatz::build_simulation_ansatz({});
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> feat(0.0, 1.0);
  std::uniform_real_distribution<double> ang(-pi, pi);
  double worst = 0.0;
  const auto start = Clock::now();
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(3);
    for (double &v : x) {
      v = feat(rng);
    }
    std::vector<double> theta(circuit.num_trainable_slots);
    for (double &t : theta) {
      t = ang(rng);
    }
    const auto enc = ansatz::encode_features(x, pi);
    const auto ps = gradients::parameter_shift_gradient(circuit, enc, theta).grad;
    const auto fd = gradients::finite_difference_gradient(circuit, enc, theta, 1e-5);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      worst = std::max(worst, std::abs(ps[i] - fd[i]));
    }
  }
  const double elapsed = seconds_since(start);
  report(1, worst < 1e-6 && elapsed < 10.0,
         fmt("50 instances, max |PS - FD| = %.3e (tol 1e-6), %.3f s (limit 10 s)", worst, elapsed));
}

void analytic_ry() {
  qsim::ParameterizedCircuit c;
  c.num_qubits = 1;
  c.num_trainable_slots = 1;
  c.gates = {qsim::GateOp::ry(0, qsim::TrainableSlot{0})};
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> ang(-2.0 * pi, 2.0 * pi);
  double worst_value = 0.0;
  double worst_grad = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> theta = {ang(rng)};
    const double z = gradients::expectation_of(c, {}, theta);
    const double g = gradients::parameter_shift_gradient(c, {}, theta).grad[0];
    worst_value = std::max(worst_value, std::abs(z - std::cos(theta[0])));
    worst_grad = std::max(worst_grad, std::abs(g + std::sin(theta[0])));
  }
  report(2, worst_value < 1e-9 && worst_grad < 1e-9,
         fmt("100 angles, max |<Z> - cos| = %.3e, max |dZ + sin| = %.3e (tol 1e-9)", worst_value, worst_grad));
}

void simulator_oracle() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> ang(-pi, pi);
  std::uniform_int_distribution<std::size_t> qubits(1, 4);
  std::uniform_int_distribution<std::size_t> length(1, 12);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = oracle::random_circuit(rng, qubits(rng), length(rng), 2);
    const std::vector<double> enc = {ang(rng), ang(rng)};
    std::vector<double> theta(c.num_trainable_slots);
    for (double &t : theta) {
      t = ang(rng);
    }
    const auto got = qsim::run_circuit(c, enc, theta);
    const auto want = oracle::dense_run(c, enc, theta);
    for (std::size_t i = 0; i < want.size(); ++i) {
      worst = std::max(worst, std::abs(got[i] - want[i]));
    }
  }
  report(3, worst < 1e-10, fmt("100 circuits, max amplitude error = %.3e (tol 1e-10)", worst));
}

void metric_oracles() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(2, 50);
  std::uniform_int_distribution<int> grid(0, 5);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = size(rng);
    std::vector<double> scores;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
      scores.push_back(trial % 2 == 0 ? grid(rng) / 5.0 : u(rng));
      labels.push_back(u(rng) < 0.4 ? 1 : 0);
    }
    labels[0] = 1;
    labels[1] = 0;
    const double pairwise = metrics::auc(scores, labels);
    const double area = metrics::trapezoid_area(metrics::roc_curve(scores, labels));
    worst = std::max({worst, std::abs(pairwise - area), std::abs(pairwise - oracle::pairwise_auc(scores, labels))});
  }

  const std::vector<double> s = {0.8, 0.4, 0.6, 0.2};
  const std::vector<int> y = {1, 1, 0, 0};
  const double k = metrics::ks(s, y);
  const double k_oracle = oracle::brute_ks(s, y);

  const std::vector<int> parent = {1, 1, 0, 0, 0, 0};
  const double ig = classical::information_gain(parent, {{1, 1, 0}, {0, 0, 0}});
  const double ig_oracle = oracle::h2(2.0, 6.0) - 0.5 * oracle::h2(2.0, 3.0) - 0.5 * oracle::h2(0.0, 3.0);

  const bool ok = worst < 1e-12 && k == 0.5 && k_oracle == 0.5 && std::abs(ig - ig_oracle) < 1e-12 &&
                  std::abs(ig - 0.459) < 5e-4;
  report(4, ok,
         fmt("AUC vs trapezoid max diff = %.3e (tol 1e-12); KS = %.4f (want 0.5); IG = %.4f (want 0.459)", worst, k,
             ig));
}

void protocol_reproduction(const pipeline::Dataset &data) {
  const auto labels = pipeline::labels_of(data);
  const auto defaults = std::count(labels.begin(), labels.end(), 1);
  const auto plans =
      pipeline::stratified_partitions(labels, 10, 0.7, pipeline::kReferenceBatchSizes, 0x5041525449ULL);
  bool ok = labels.size() == 279 && defaults == 41 && plans.size() == 10;
  for (const auto &p : plans) {
    const auto count_defaults = [&](const std::vector<std::size_t> &idx) {
      return std::count_if(idx.begin(), idx.end(), [&](std::size_t i) { return labels[i] == 1; });
    };
    ok = ok && p.train.size() == 195 && p.test.size() == 84 && count_defaults(p.train) == 29 &&
         count_defaults(p.test) == 12;
  }
  report(5, ok, "10 partitions of 279/41: every split 195/84 with 29/12 defaults");
}

void ansatz_structure() {
  const auto sim = ansatz::build_simulation_ansatz({});
  const auto hw = ansatz::build_hardware_ansatz({ansatz::Variant::Hardware});
  const bool ok = sim.num_trainable_slots == 14 && sim.count(qsim::GateKind::CNOT) == 6 &&
                  hw.num_trainable_slots == 6;
  report(6, ok,
         fmt("simulation %.0f params / %.0f CNOTs, hardware %.0f params", static_cast<double>(sim.num_trainable_slots),
             static_cast<double>(sim.count(qsim::GateKind::CNOT)), static_cast<double>(hw.num_trainable_slots)));
}

std::vector<pipeline::StackedSample> toy_separable() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  std::vector<pipeline::StackedSample> out;
  for (int i = 0; i < 20; ++i) {
    pipeline::StackedSample s;
    s.label = i % 2;
    const double centre = s.label == 1 ? 0.8 : 0.2;
    for (double &f : s.features) {
      f = centre + jitter(rng);
    }
    out.push_back(s);
  }
  return out;
}

std::string render(const pipeline::CrossValidationResult &result, std::span<const pipeline::BenchmarkRow> rows) {
  std::ostringstream ss;
  ss << metrics::csv_header() << '\n';
  for (const auto &r : result.reports()) {
    ss << metrics::to_csv_row(r) << '\n';
  }
  ss << serialize::to_json(result.aggregate).dump(2) << '\n';
  pipeline::write_benchmark_csv(ss, rows);
  return ss.str();
}

void training_and_determinism(const pipeline::Dataset &data) {
  pipeline::CrossValidationConfig cfg;
  const auto start = Clock::now();
  const auto cv = pipeline::run_cross_validation(data, cfg);
  const auto reports = cv.reports();
  const auto rows = pipeline::run_benchmarks(data, cv.plans, cfg, reports);
  const double elapsed = seconds_since(start);

  double lr_auc = 0.0;
  for (const auto &row : rows) {
    if (row.model == "logistic") {
      lr_auc = row.metrics.auc.mean;
    }
  }
  const double qnn_auc = cv.aggregate.auc.mean;
  const bool a = std::abs(qnn_auc - lr_auc) <= 0.05;

  const auto circuit = ansatz::build_simulation_ansatz({});
  pipeline::TrainConfig toy_cfg;
  toy_cfg.batch_size = 4;
  const auto toy = pipeline::train_qnn(toy_separable(), circuit, pi, toy_cfg);
  double toy_best = 0.0;
  for (const auto &e : toy.trace) {
    toy_best = std::max(toy_best, e.train_auc);
  }
  const bool b = toy.trace.size() <= 50 && toy_best >= 0.99;

  bool c = true;
  for (const auto &o : cv.outcomes) {
    c = c && o.training.trace.size() >= 10 && o.training.trace[9].loss < o.training.trace[0].loss;
  }
  const bool timely = elapsed < 600.0;

  report(7, a && b && c && timely,
         fmt("(a) QNN AUC %.4f vs stacked LR %.4f (tol 0.05); ", qnn_auc, lr_auc) +
             fmt("(b) toy best train AUC %.4f (min 0.99); ", toy_best) + "(c) epoch-10 loss below epoch-1 on " +
             (c ? "all" : "NOT all") + " partitions; " + fmt("full run %.1f s (limit 600 s)", elapsed));

  pipeline::CrossValidationConfig again = cfg;
  const auto cv_same = pipeline::run_cross_validation(data, again);
  again.jobs = 4;
  const auto cv_jobs = pipeline::run_cross_validation(data, again);
  const std::string base = render(cv, rows);
  const bool same = base == render(cv_same, pipeline::run_benchmarks(data, cv_same.plans, cfg, cv_same.reports()));
  const bool jobs = base == render(cv_jobs, pipeline::run_benchmarks(data, cv_jobs.plans, again, cv_jobs.reports()));
  report(8, same && jobs,
         std::string("repeat run ") + (same ? "identical" : "DIFFERS") + ", jobs 1 vs 4 " +
             (jobs ? "identical" : "DIFFERS"));
}

} // namespace

int main() {
  gradient_exactness();
  analytic_ry();
  simulator_oracle();
  metric_oracles();
  const auto data = pipeline::generate_synthetic_dataset(0);
  protocol_reproduction(data);
  ansatz_structure();
  training_and_determinism(data);
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
