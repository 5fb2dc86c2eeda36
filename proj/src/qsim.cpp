#include "qcredit/qsim.hpp"

#include "qcredit/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace qcredit::qsim {

namespace {

void check_qubit_count(std::size_t num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw SizeError("qubit count " + std::to_string(num_qubits) + " outside [1, " + std::to_string(kMaxQubits) + "]");
  }
}

std::size_t qubit_mask(std::size_t qubit, std::size_t num_qubits) {
  return std::size_t{1} << (num_qubits - 1 - qubit);
}

// 2x2 unitary acting on the (bit = 0, bit = 1) amplitude pair of one qubit.
struct Mat2 {
  Complex m00, m01, m10, m11;
};

Mat2 rotation_matrix(GateKind kind, double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  switch (kind) {
  case GateKind::RX:
    return {c, Complex(0.0, -s), Complex(0.0, -s), c};
  case GateKind::RY:
    return {c, -s, s, c};
  case GateKind::RZ:
    return {Complex(c, -s), 0.0, 0.0, Complex(c, s)};
  default:
    throw ContractError("not a rotation gate");
  }
}

void apply_single(std::vector<Complex> &amps, std::size_t mask, const Mat2 &u) {
  const std::size_t dim = amps.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & mask) {
      continue;
    }
    const Complex a0 = amps[i];
    const Complex a1 = amps[i | mask];
    amps[i] = u.m00 * a0 + u.m01 * a1;
    amps[i | mask] = u.m10 * a0 + u.m11 * a1;
  }
}

void check_gate_shape(const GateOp &gate, std::size_t num_qubits) {
  const std::size_t arity = is_rotation(gate.kind) ? 1 : 2;
  if (gate.targets.size() != arity) {
    throw ContractError(std::string(to_string(gate.kind)) + " expects " + std::to_string(arity) + " qubit(s), got " +
                        std::to_string(gate.targets.size()));
  }
  for (std::size_t q : gate.targets) {
    if (q >= num_qubits) {
      throw IndexError("qubit index " + std::to_string(q) + " out of range for " + std::to_string(num_qubits) +
                       " qubits");
    }
  }
  if (arity == 2 && gate.targets[0] == gate.targets[1]) {
    throw ContractError(std::string(to_string(gate.kind)) + " needs two distinct qubits");
  }
}

std::size_t qubits_for_dimension(std::size_t dim) {
  if (dim < 2 || !std::has_single_bit(dim)) {
    throw SizeError("amplitude count " + std::to_string(dim) + " is not a power of two >= 2");
  }
  const auto n = static_cast<std::size_t>(std::countr_zero(dim));
  check_qubit_count(n);
  return n;
}

} // namespace

StateVector::StateVector(std::size_t num_qubits) : num_qubits_(num_qubits) {
  check_qubit_count(num_qubits);
  amplitudes_.assign(std::size_t{1} << num_qubits, Complex(0.0, 0.0));
  amplitudes_[0] = 1.0;
}

StateVector::StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes) {
  const std::size_t n = qubits_for_dimension(amplitudes.size());
  StateVector state(n, std::move(amplitudes));
  if (std::abs(state.norm_squared() - 1.0) > kNormTolerance) {
    throw ContractError("amplitudes are not normalized");
  }
  return state;
}

double StateVector::norm_squared() const noexcept {
  double total = 0.0;
  for (const Complex &a : amplitudes_) {
    total += std::norm(a);
  }
  return total;
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> probs(amplitudes_.size());
  std::transform(amplitudes_.begin(), amplitudes_.end(), probs.begin(), [](const Complex &a) { return std::norm(a); });
  return probs;
}

StateVector init_state(std::size_t num_qubits) { return StateVector(num_qubits); }

std::string_view to_string(GateKind kind) {
  switch (kind) {
  case GateKind::RX:
    return "RX";
  case GateKind::RY:
    return "RY";
  case GateKind::RZ:
    return "RZ";
  case GateKind::CNOT:
    return "CNOT";
  case GateKind::CZ:
    return "CZ";
  }
  return "?";
}

std::optional<GateKind> gate_kind_from_string(std::string_view name) {
  for (GateKind k : {GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::CNOT, GateKind::CZ}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  return std::nullopt;
}

GateOp GateOp::rotation(GateKind kind, std::size_t qubit, AngleSource angle) {
  if (!is_rotation(kind)) {
    throw ContractError("GateOp::rotation called with a two-qubit kind");
  }
  return GateOp{kind, {qubit}, angle};
}

GateOp GateOp::cnot(std::size_t control, std::size_t target) { return GateOp{GateKind::CNOT, {control, target}, NoAngle{}}; }

GateOp GateOp::cz(std::size_t a, std::size_t b) { return GateOp{GateKind::CZ, {a, b}, NoAngle{}}; }

void apply_gate_in_place(StateVector &state, const GateOp &gate, std::optional<double> angle) {
  const std::size_t n = state.num_qubits_;
  check_gate_shape(gate, n);
  auto &amps = state.amplitudes_;

  if (is_rotation(gate.kind)) {
    if (!angle) {
      throw ContractError(std::string(to_string(gate.kind)) + " requires an angle");
    }
    apply_single(amps, qubit_mask(gate.targets[0], n), rotation_matrix(gate.kind, *angle));
    return;
  }
  if (angle) {
    throw ContractError(std::string(to_string(gate.kind)) + " takes no angle");
  }

  const std::size_t m0 = qubit_mask(gate.targets[0], n);
  const std::size_t m1 = qubit_mask(gate.targets[1], n);
  const std::size_t dim = amps.size();
  if (gate.kind == GateKind::CNOT) {
    // Swap target-bit pairs where the control bit is set.
    for (std::size_t i = 0; i < dim; ++i) {
      if ((i & m0) && !(i & m1)) {
        std::swap(amps[i], amps[i | m1]);
      }
    }
  } else {
    for (std::size_t i = 0; i < dim; ++i) {
      if ((i & m0) && (i & m1)) {
        amps[i] = -amps[i];
      }
    }
  }
}

StateVector apply_gate(StateVector state, const GateOp &gate, std::optional<double> angle) {
  apply_gate_in_place(state, gate, angle);
  return state;
}

void ParameterizedCircuit::validate() const {
  check_qubit_count(num_qubits);
  std::vector<std::size_t> trainable_uses(num_trainable_slots, 0);
  for (std::size_t g = 0; g < gates.size(); ++g) {
    const GateOp &gate = gates[g];
    check_gate_shape(gate, num_qubits);
    const bool rot = is_rotation(gate.kind);
    const bool has_angle = !std::holds_alternative<NoAngle>(gate.angle);
    if (rot != has_angle) {
      throw ContractError("gate " + std::to_string(g) + " (" + std::string(to_string(gate.kind)) +
                          (rot ? ") is missing an angle source" : ") must not carry an angle source"));
    }
    if (const auto *enc = std::get_if<EncodingSlot>(&gate.angle); enc && enc->index >= num_encoding_slots) {
      throw IndexError("gate " + std::to_string(g) + " reads encoding slot " + std::to_string(enc->index) + " of " +
                       std::to_string(num_encoding_slots));
    }
    if (const auto *tr = std::get_if<TrainableSlot>(&gate.angle)) {
      if (tr->index >= num_trainable_slots) {
        throw IndexError("gate " + std::to_string(g) + " reads trainable slot " + std::to_string(tr->index) + " of " +
                         std::to_string(num_trainable_slots));
      }
      ++trainable_uses[tr->index];
    }
  }
  for (std::size_t s = 0; s < trainable_uses.size(); ++s) {
    if (trainable_uses[s] != 1) {
      throw ContractError("trainable slot " + std::to_string(s) + " is bound to " + std::to_string(trainable_uses[s]) +
                          " gates; exactly one is required");
    }
  }
}

std::size_t ParameterizedCircuit::count(GateKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(gates.begin(), gates.end(), [kind](const GateOp &g) { return g.kind == kind; }));
}

StateVector run_circuit(const ParameterizedCircuit &circuit, std::span<const double> encoding_values,
                        std::span<const double> trainable_values) {
  circuit.validate();
  if (encoding_values.size() != circuit.num_encoding_slots) {
    throw ContractError("expected " + std::to_string(circuit.num_encoding_slots) + " encoding values, got " +
                        std::to_string(encoding_values.size()));
  }
  if (trainable_values.size() != circuit.num_trainable_slots) {
    throw ContractError("expected " + std::to_string(circuit.num_trainable_slots) + " trainable values, got " +
                        std::to_string(trainable_values.size()));
  }

  StateVector state(circuit.num_qubits);
  for (const GateOp &gate : circuit.gates) {
    const std::optional<double> angle = std::visit(
        [&](const auto &src) -> std::optional<double> {
          using T = std::decay_t<decltype(src)>;
          if constexpr (std::is_same_v<T, NoAngle>) {
            return std::nullopt;
          } else if constexpr (std::is_same_v<T, FixedAngle>) {
            return src.value;
          } else if constexpr (std::is_same_v<T, EncodingSlot>) {
            return encoding_values[src.index];
          } else {
            return trainable_values[src.index];
          }
        },
        gate.angle);
    apply_gate_in_place(state, gate, angle);
  }
  return state;
}

double expectation(const StateVector &state, PauliZObservable obs) {
  const std::size_t n = state.num_qubits();
  if (obs.qubit >= n) {
    throw IndexError("observable qubit " + std::to_string(obs.qubit) + " out of range for " + std::to_string(n) +
                     " qubits");
  }
  const std::size_t mask = qubit_mask(obs.qubit, n);
  const auto amps = state.amplitudes();
  double value = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double p = std::norm(amps[i]);
    value += (i & mask) ? -p : p;
  }
  return std::clamp(value, -1.0, 1.0);
}

std::string basis_label(std::size_t index, std::size_t num_qubits) {
  std::string label(num_qubits, '0');
  for (std::size_t q = 0; q < num_qubits; ++q) {
    if (index & qubit_mask(q, num_qubits)) {
      label[q] = '1';
    }
  }
  return label;
}

Histogram sample_measurements(const StateVector &state, std::size_t shots, std::uint64_t seed) {
  if (shots < 1) {
    throw ContractError("shots must be >= 1");
  }
  const std::vector<double> probs = state.probabilities();
  std::discrete_distribution<std::size_t> dist(probs.begin(), probs.end());
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> tally(probs.size(), 0);
  for (std::size_t s = 0; s < shots; ++s) {
    ++tally[dist(rng)];
  }
  Histogram counts;
  for (std::size_t i = 0; i < tally.size(); ++i) {
    if (tally[i] > 0) {
      counts.emplace(basis_label(i, state.num_qubits()), tally[i]);
    }
  }
  return counts;
}

double expectation_from_counts(const Histogram &counts, PauliZObservable obs) {
  std::size_t total = 0;
  long long signed_total = 0;
  for (const auto &[bits, count] : counts) {
    if (obs.qubit >= bits.size()) {
      throw IndexError("observable qubit " + std::to_string(obs.qubit) + " not present in bitstring '" + bits + "'");
    }
    total += count;
    signed_total += bits[obs.qubit] == '1' ? -static_cast<long long>(count) : static_cast<long long>(count);
  }
  if (total == 0) {
    throw ContractError("empty histogram");
  }
  return static_cast<double>(signed_total) / static_cast<double>(total);
}

ReadoutErrorModel::ReadoutErrorModel(std::vector<ReadoutFidelity> per_qubit) : per_qubit_(std::move(per_qubit)) {
  for (std::size_t q = 0; q < per_qubit_.size(); ++q) {
    const auto &f = per_qubit_[q];
    if (!(f.f0 >= 0.0 && f.f0 <= 1.0 && f.f1 >= 0.0 && f.f1 <= 1.0)) {
      throw ContractError("readout fidelities for qubit " + std::to_string(q) + " must lie in [0, 1]");
    }
  }
}

std::vector<double> apply_readout_error(std::span<const double> probabilities, const ReadoutErrorModel &model) {
  const std::size_t n = qubits_for_dimension(probabilities.size());
  if (model.size() < n) {
    throw ContractError("readout model covers " + std::to_string(model.size()) + " qubits, need " + std::to_string(n));
  }
  std::vector<double> out(probabilities.begin(), probabilities.end());
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t mask = qubit_mask(q, n);
    const auto [f0, f1] = model[q];
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (i & mask) {
        continue;
      }
      const double p0 = out[i];
      const double p1 = out[i | mask];
      out[i] = f0 * p0 + (1.0 - f1) * p1;
      out[i | mask] = (1.0 - f0) * p0 + f1 * p1;
    }
  }
  return out;
}

Histogram apply_readout_error(const Histogram &counts, const ReadoutErrorModel &model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Histogram out;
  for (const auto &[bits, count] : counts) {
    if (model.size() < bits.size()) {
      throw ContractError("readout model covers " + std::to_string(model.size()) + " qubits, bitstring has " +
                          std::to_string(bits.size()));
    }
    for (std::size_t shot = 0; shot < count; ++shot) {
      std::string read = bits;
      for (std::size_t q = 0; q < read.size(); ++q) {
        const double u = unit(rng);
        if (read[q] == '0' && u >= model[q].f0) {
          read[q] = '1';
        } else if (read[q] == '1' && u >= model[q].f1) {
          read[q] = '0';
        }
      }
      ++out[read];
    }
  }
  return out;
}

double estimate_expectation(const StateVector &state, PauliZObservable obs, const EstimatorOptions &options) {
  if (options.shots == 0) {
    if (!options.readout) {
      return expectation(state, obs);
    }
    const std::vector<double> noisy = apply_readout_error(state.probabilities(), *options.readout);
    if (obs.qubit >= state.num_qubits()) {
      throw IndexError("observable qubit out of range");
    }
    const std::size_t mask = qubit_mask(obs.qubit, state.num_qubits());
    double value = 0.0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      value += (i & mask) ? -noisy[i] : noisy[i];
    }
    return std::clamp(value, -1.0, 1.0);
  }
  Histogram counts = sample_measurements(state, options.shots, options.seed);
  if (options.readout) {
    counts = apply_readout_error(counts, *options.readout, options.seed ^ 0x9e3779b97f4a7c15ULL);
  }
  return expectation_from_counts(counts, obs);
}

} // namespace qcredit::qsim
