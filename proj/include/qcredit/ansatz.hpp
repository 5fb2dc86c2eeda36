#pragma once

#include "qcredit/qsim.hpp"

#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace qcredit::ansatz {

enum class Variant { Simulation, Hardware };

std::string_view to_string(Variant variant);
std::optional<Variant> variant_from_string(std::string_view name);

struct AnsatzConfig {
  Variant variant = Variant::Simulation;
  std::size_t num_qubits = 3;
  // Multiplier mapping features in [0, 1] onto encoding angles.
  double angle_scale = std::numbers::pi;

  void validate() const;
};

/// One RX per qubit; qubit j reads encoding slot j.
std::vector<qsim::GateOp> build_encoding_layer(std::size_t num_qubits);

/// Encoding layer, then RX+RY on every qubit, CNOT ring, RX+RY on every
/// qubit, CNOT ring, and a final RX+RY on qubit 0 only. The CNOT ring runs
/// control j -> target (j + 1) mod n. Three qubits give 14 trainable slots.
qsim::ParameterizedCircuit build_simulation_ansatz(const AnsatzConfig &config);

/// Encoding layer, then RY on every qubit, CNOT ring, RY on every qubit,
/// CNOT ring. Three qubits give 6 trainable slots.
qsim::ParameterizedCircuit build_hardware_ansatz(const AnsatzConfig &config);

qsim::ParameterizedCircuit build_ansatz(const AnsatzConfig &config);

std::vector<double> encode_features(std::span<const double> features, double angle_scale);

/// (1 - <Z_0>) / 2 of the circuit bound to angle_scale * features and theta.
double qnn_forward(const qsim::ParameterizedCircuit &circuit, std::span<const double> features,
                   std::span<const double> theta, double angle_scale);

} // namespace qcredit::ansatz
