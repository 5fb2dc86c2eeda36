#include "qcredit/ansatz.hpp"

#include "qcredit/errors.hpp"

#include <cmath>
#include <string>

namespace qcredit::ansatz {

using qsim::GateOp;
using qsim::ParameterizedCircuit;
using qsim::TrainableSlot;

namespace {

class CircuitBuilder {
public:
  explicit CircuitBuilder(std::size_t num_qubits) {
    circuit_.num_qubits = num_qubits;
    circuit_.gates = build_encoding_layer(num_qubits);
    circuit_.num_encoding_slots = num_qubits;
  }

  void trainable(qsim::GateKind kind, std::size_t qubit) {
    circuit_.gates.push_back(GateOp::rotation(kind, qubit, TrainableSlot{circuit_.num_trainable_slots++}));
  }

  void cnot_ring() {
    const std::size_t n = circuit_.num_qubits;
    for (std::size_t j = 0; j < n; ++j) {
      circuit_.gates.push_back(GateOp::cnot(j, (j + 1) % n));
    }
  }

  ParameterizedCircuit finish() {
    circuit_.validate();
    return std::move(circuit_);
  }

private:
  ParameterizedCircuit circuit_;
};

} // namespace

std::string_view to_string(Variant variant) {
  return variant == Variant::Simulation ? "simulation" : "hardware";
}

std::optional<Variant> variant_from_string(std::string_view name) {
  if (name == "simulation") {
    return Variant::Simulation;
  }
  if (name == "hardware") {
    return Variant::Hardware;
  }
  return std::nullopt;
}

void AnsatzConfig::validate() const {
  if (num_qubits < 2 || num_qubits > qsim::kMaxQubits) {
    throw ContractError("ansatz needs between 2 and " + std::to_string(qsim::kMaxQubits) + " qubits, got " +
                        std::to_string(num_qubits));
  }
  if (!std::isfinite(angle_scale)) {
    throw ContractError("angle_scale must be finite");
  }
}

std::vector<GateOp> build_encoding_layer(std::size_t num_qubits) {
  if (num_qubits < 1) {
    throw ContractError("encoding layer needs at least one qubit");
  }
  std::vector<GateOp> layer;
  layer.reserve(num_qubits);
  for (std::size_t j = 0; j < num_qubits; ++j) {
    layer.push_back(GateOp::rx(j, qsim::EncodingSlot{j}));
  }
  return layer;
}

ParameterizedCircuit build_simulation_ansatz(const AnsatzConfig &config) {
  if (config.variant != Variant::Simulation) {
    throw ContractError("build_simulation_ansatz called with a hardware config");
  }
  config.validate();
  CircuitBuilder b(config.num_qubits);
  for (int layer = 0; layer < 2; ++layer) {
    for (std::size_t q = 0; q < config.num_qubits; ++q) {
      b.trainable(qsim::GateKind::RX, q);
      b.trainable(qsim::GateKind::RY, q);
    }
    b.cnot_ring();
  }
  b.trainable(qsim::GateKind::RX, 0);
  b.trainable(qsim::GateKind::RY, 0);
  return b.finish();
}

ParameterizedCircuit build_hardware_ansatz(const AnsatzConfig &config) {
  if (config.variant != Variant::Hardware) {
    throw ContractError("build_hardware_ansatz called with a simulation config");
  }
  config.validate();
  CircuitBuilder b(config.num_qubits);
  for (int layer = 0; layer < 2; ++layer) {
    for (std::size_t q = 0; q < config.num_qubits; ++q) {
      b.trainable(qsim::GateKind::RY, q);
    }
    b.cnot_ring();
  }
  return b.finish();
}

ParameterizedCircuit build_ansatz(const AnsatzConfig &config) {
  return config.variant == Variant::Simulation ? build_simulation_ansatz(config) : build_hardware_ansatz(config);
}

std::vector<double> encode_features(std::span<const double> features, double angle_scale) {
  std::vector<double> angles(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    angles[i] = angle_scale * features[i];
  }
  return angles;
}

double qnn_forward(const ParameterizedCircuit &circuit, std::span<const double> features,
                   std::span<const double> theta, double angle_scale) {
  if (features.size() != circuit.num_encoding_slots) {
    throw ContractError("expected " + std::to_string(circuit.num_encoding_slots) + " features, got " +
                        std::to_string(features.size()));
  }
  if (theta.size() != circuit.num_trainable_slots) {
    throw ContractError("expected " + std::to_string(circuit.num_trainable_slots) + " parameters, got " +
                        std::to_string(theta.size()));
  }
  const std::vector<double> angles = encode_features(features, angle_scale);
  const double z = qsim::expectation(qsim::run_circuit(circuit, angles, theta), {0});
  return (1.0 - z) / 2.0;
}

} // namespace qcredit::ansatz
