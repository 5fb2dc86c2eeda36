#include "qcredit/gradients.hpp"

#include "qcredit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qcredit::gradients {

namespace {

void check_labels(std::span<const double> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw ContractError("predictions and labels differ in length (" + std::to_string(predictions.size()) + " vs " +
                        std::to_string(labels.size()) + ")");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) {
      throw ContractError("labels must be 0 or 1");
    }
  }
}

void check_shiftable(const qsim::ParameterizedCircuit &circuit) {
  std::vector<std::size_t> uses(circuit.num_trainable_slots, 0);
  for (const auto &gate : circuit.gates) {
    const auto *slot = std::get_if<qsim::TrainableSlot>(&gate.angle);
    if (!slot) {
      continue;
    }
    if (!qsim::is_rotation(gate.kind)) {
      throw UnsupportedGeneratorError("trainable slot " + std::to_string(slot->index) + " drives a " +
                                      std::string(qsim::to_string(gate.kind)) + " gate");
    }
    if (slot->index < uses.size()) {
      ++uses[slot->index];
    }
  }
  for (std::size_t i = 0; i < uses.size(); ++i) {
    if (uses[i] > 1) {
      throw UnsupportedGeneratorError("trainable slot " + std::to_string(i) +
                                      " is shared by several gates; the two-term shift rule does not apply");
    }
  }
}

} // namespace

ShiftSet generate_parameter_shift_values(std::span<const double> theta) {
  if (theta.empty()) {
    throw ContractError("cannot shift an empty parameter vector");
  }
  const std::size_t n = theta.size();
  ShiftSet set;
  set.base.assign(theta.begin(), theta.end());
  set.shifted.assign(2 * n, set.base);
  for (std::size_t i = 0; i < n; ++i) {
    set.shifted[i][i] += kShift;
    set.shifted[n + i][i] -= kShift;
  }
  return set;
}

double expectation_of(const qsim::ParameterizedCircuit &circuit, std::span<const double> encoding,
                      std::span<const double> theta, const qsim::EstimatorOptions &estimator,
                      qsim::PauliZObservable obs) {
  return qsim::estimate_expectation(qsim::run_circuit(circuit, encoding, theta), obs, estimator);
}

GradientResult parameter_shift_gradient(const qsim::ParameterizedCircuit &circuit, std::span<const double> encoding,
                                        std::span<const double> theta, const qsim::EstimatorOptions &estimator,
                                        qsim::PauliZObservable obs) {
  check_shiftable(circuit);
  circuit.validate();
  if (theta.size() != circuit.num_trainable_slots) {
    throw ContractError("expected " + std::to_string(circuit.num_trainable_slots) + " parameters, got " +
                        std::to_string(theta.size()));
  }
  GradientResult result;
  if (theta.empty()) {
    return result;
  }
  const ShiftSet set = generate_parameter_shift_values(theta);
  const std::size_t k = set.shifted.size();
  std::vector<double> values(k);
  for (std::size_t i = 0; i < k; ++i) {
    qsim::EstimatorOptions opts = estimator;
    opts.seed = estimator.seed + i;
    values[i] = expectation_of(circuit, encoding, set.shifted[i], opts, obs);
  }
  const std::size_t n = k / 2;
  result.grad.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.grad[i] = (values[i] - values[n + i]) / 2.0;
  }
  result.evaluations = k;
  return result;
}

std::vector<double> finite_difference_gradient(const qsim::ParameterizedCircuit &circuit,
                                               std::span<const double> encoding, std::span<const double> theta,
                                               double epsilon, qsim::PauliZObservable obs) {
  if (!(epsilon > 0.0)) {
    throw ContractError("finite-difference epsilon must be positive");
  }
  std::vector<double> point(theta.begin(), theta.end());
  std::vector<double> grad(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double original = point[i];
    point[i] = original + epsilon;
    const double up = expectation_of(circuit, encoding, point, {}, obs);
    point[i] = original - epsilon;
    const double down = expectation_of(circuit, encoding, point, {}, obs);
    point[i] = original;
    grad[i] = (up - down) / (2.0 * epsilon);
  }
  return grad;
}

double clamp_probability(double p) { return std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor); }

double bce_loss(std::span<const double> predictions, std::span<const int> labels) {
  check_labels(predictions, labels);
  if (predictions.empty()) {
    throw ContractError("empty batch");
  }
  double total = 0.0;
  for (std::size_t s = 0; s < predictions.size(); ++s) {
    const double p = clamp_probability(predictions[s]);
    total -= labels[s] == 1 ? std::log(p) : std::log1p(-p);
  }
  return total / static_cast<double>(predictions.size());
}

std::vector<double> loss_vjp(std::span<const double> predictions, std::span<const int> labels,
                             const Jacobian &prediction_jacobian) {
  check_labels(predictions, labels);
  if (prediction_jacobian.size() != predictions.size()) {
    throw ContractError("Jacobian has " + std::to_string(prediction_jacobian.size()) + " rows for " +
                        std::to_string(predictions.size()) + " samples");
  }
  if (predictions.empty()) {
    throw ContractError("empty batch");
  }
  const std::size_t n = prediction_jacobian.front().size();
  std::vector<double> grad(n, 0.0);
  const double inv_m = 1.0 / static_cast<double>(predictions.size());
  for (std::size_t s = 0; s < predictions.size(); ++s) {
    if (prediction_jacobian[s].size() != n) {
      throw ContractError("ragged Jacobian row " + std::to_string(s));
    }
    const double p = clamp_probability(predictions[s]);
    const double upstream = (p - labels[s]) / (p * (1.0 - p)) * inv_m;
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] += upstream * prediction_jacobian[s][i];
    }
  }
  return grad;
}

} // namespace qcredit::gradients
