#pragma once

#include "qcredit/qsim.hpp"

#include <numbers>
#include <span>
#include <vector>

namespace qcredit::gradients {

inline constexpr double kShift = std::numbers::pi / 2.0;

// Predictions are clamped into [kProbabilityFloor, 1 - kProbabilityFloor]
// before the cross-entropy and its derivative.
inline constexpr double kProbabilityFloor = 1e-7;

struct ShiftSet {
  std::vector<double> base;
  // First n entries shift coordinate i by +pi/2, the last n by -pi/2.
  std::vector<std::vector<double>> shifted;
};

struct GradientResult {
  std::vector<double> grad;
  std::size_t evaluations = 0;
};

/// Rows are samples, columns are parameters.
using Jacobian = std::vector<std::vector<double>>;

ShiftSet generate_parameter_shift_values(std::span<const double> theta);

/// <Z_obs> of the circuit bound to `encoding` angles and `theta`.
double expectation_of(const qsim::ParameterizedCircuit &circuit, std::span<const double> encoding,
                      std::span<const double> theta, const qsim::EstimatorOptions &estimator = {},
                      qsim::PauliZObservable obs = {0});

/// d<Z_obs>/dtheta by the two-term shift rule; costs 2n expectation
/// evaluations. Every trainable slot must drive exactly one Pauli rotation,
/// otherwise UnsupportedGeneratorError.
GradientResult parameter_shift_gradient(const qsim::ParameterizedCircuit &circuit, std::span<const double> encoding,
                                        std::span<const double> theta, const qsim::EstimatorOptions &estimator = {},
                                        qsim::PauliZObservable obs = {0});

/// Central differences of the exact expectation.
std::vector<double> finite_difference_gradient(const qsim::ParameterizedCircuit &circuit,
                                               std::span<const double> encoding, std::span<const double> theta,
                                               double epsilon, qsim::PauliZObservable obs = {0});

double clamp_probability(double p);

/// Mean binary cross-entropy over the batch, on clamped predictions.
double bce_loss(std::span<const double> predictions, std::span<const int> labels);

/// dL/dtheta for the mean BCE given per-sample dp/dtheta rows.
std::vector<double> loss_vjp(std::span<const double> predictions, std::span<const int> labels,
                             const Jacobian &prediction_jacobian);

} // namespace qcredit::gradients
