#pragma once

// Dense statevector simulation for few-qubit circuits.
//
// Qubit 0 is the most significant bit of a basis index: on n qubits the
// amplitude of |b0 b1 ... b(n-1)> lives at index sum_k b_k * 2^(n-1-k).
// Rotations follow U(theta) = exp(-i * theta * P / 2).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qcredit::qsim {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 20;
inline constexpr double kNormTolerance = 1e-10;

struct GateOp;

class StateVector {
public:
  /// |0...0> on `num_qubits` qubits. Throws SizeError outside [1, kMaxQubits].
  explicit StateVector(std::size_t num_qubits);

  /// Wraps explicit amplitudes. The length must be a power of two and the
  /// vector must be normalized within kNormTolerance.
  static StateVector from_amplitudes(std::vector<Complex> amplitudes);

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  std::size_t dimension() const noexcept { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  const Complex &operator[](std::size_t index) const { return amplitudes_.at(index); }

  double norm_squared() const noexcept;
  std::vector<double> probabilities() const;

private:
  StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes);

  friend void apply_gate_in_place(StateVector &, const GateOp &, std::optional<double>);

  std::size_t num_qubits_;
  std::vector<Complex> amplitudes_;
};

StateVector init_state(std::size_t num_qubits);

enum class GateKind { RX, RY, RZ, CNOT, CZ };

constexpr bool is_rotation(GateKind kind) noexcept {
  return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ;
}

std::string_view to_string(GateKind kind);
std::optional<GateKind> gate_kind_from_string(std::string_view name);

struct NoAngle {
  bool operator==(const NoAngle &) const = default;
};
struct FixedAngle {
  double value = 0.0;
  bool operator==(const FixedAngle &) const = default;
};
struct EncodingSlot {
  std::size_t index = 0;
  bool operator==(const EncodingSlot &) const = default;
};
struct TrainableSlot {
  std::size_t index = 0;
  bool operator==(const TrainableSlot &) const = default;
};

using AngleSource = std::variant<NoAngle, FixedAngle, EncodingSlot, TrainableSlot>;

struct GateOp {
  GateKind kind = GateKind::RX;
  // One qubit for rotations; (control, target) for CNOT; two qubits for CZ.
  std::vector<std::size_t> targets;
  AngleSource angle = NoAngle{};

  static GateOp rotation(GateKind kind, std::size_t qubit, AngleSource angle);
  static GateOp rx(std::size_t qubit, AngleSource angle) { return rotation(GateKind::RX, qubit, angle); }
  static GateOp ry(std::size_t qubit, AngleSource angle) { return rotation(GateKind::RY, qubit, angle); }
  static GateOp rz(std::size_t qubit, AngleSource angle) { return rotation(GateKind::RZ, qubit, angle); }
  static GateOp cnot(std::size_t control, std::size_t target);
  static GateOp cz(std::size_t a, std::size_t b);

  bool operator==(const GateOp &) const = default;
};

/// Applies `gate` with an explicitly resolved angle. `angle` must be present
/// exactly when the gate is a rotation (ContractError otherwise); qubit
/// indices are checked against the state (IndexError).
StateVector apply_gate(StateVector state, const GateOp &gate, std::optional<double> angle = std::nullopt);
void apply_gate_in_place(StateVector &state, const GateOp &gate, std::optional<double> angle = std::nullopt);

struct ParameterizedCircuit {
  std::size_t num_qubits = 1;
  std::vector<GateOp> gates;
  std::size_t num_encoding_slots = 0;
  std::size_t num_trainable_slots = 0;

  /// Throws on any structural violation: qubit range, arity, angle-source
  /// kind, slot bounds, and each trainable slot bound to exactly one gate.
  void validate() const;

  std::size_t count(GateKind kind) const;
};

/// Runs every gate of `circuit` on |0...0>, resolving slot-bound angles from
/// the two value vectors. Their lengths must equal the circuit's slot counts.
StateVector run_circuit(const ParameterizedCircuit &circuit, std::span<const double> encoding_values,
                        std::span<const double> trainable_values);

struct PauliZObservable {
  std::size_t qubit = 0;
};

/// Exact <Z_q>, always within [-1, 1].
double expectation(const StateVector &state, PauliZObservable obs);

/// Bitstrings are written qubit 0 first, e.g. "100" is qubit 0 in |1>.
using Histogram = std::map<std::string, std::size_t>;

std::string basis_label(std::size_t index, std::size_t num_qubits);

Histogram sample_measurements(const StateVector &state, std::size_t shots, std::uint64_t seed);

/// <Z_q> estimated from measurement counts.
double expectation_from_counts(const Histogram &counts, PauliZObservable obs);

struct ReadoutFidelity {
  double f0 = 1.0; // P(read 0 | prepared 0)
  double f1 = 1.0; // P(read 1 | prepared 1)
};

class ReadoutErrorModel {
public:
  ReadoutErrorModel() = default;
  explicit ReadoutErrorModel(std::vector<ReadoutFidelity> per_qubit);

  std::size_t size() const noexcept { return per_qubit_.size(); }
  const ReadoutFidelity &operator[](std::size_t qubit) const { return per_qubit_.at(qubit); }

private:
  std::vector<ReadoutFidelity> per_qubit_;
};

/// Exact readout channel on a full probability vector (length 2^n).
std::vector<double> apply_readout_error(std::span<const double> probabilities, const ReadoutErrorModel &model);

/// Flips every recorded bit of every shot independently.
Histogram apply_readout_error(const Histogram &counts, const ReadoutErrorModel &model, std::uint64_t seed);

/// How expectation values are estimated. shots == 0 means exact.
struct EstimatorOptions {
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  std::optional<ReadoutErrorModel> readout;
};

double estimate_expectation(const StateVector &state, PauliZObservable obs, const EstimatorOptions &options);

} // namespace qcredit::qsim
