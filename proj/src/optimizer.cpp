#include "qcredit/optimizer.hpp"

#include "qcredit/errors.hpp"

#include <cmath>
#include <string>

namespace qcredit {

AdamW::AdamW(std::size_t parameter_count, Params params)
    : params_(params), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {
  if (!(params_.learning_rate >= 0.0) || !(params_.beta1 >= 0.0 && params_.beta1 < 1.0) ||
      !(params_.beta2 >= 0.0 && params_.beta2 < 1.0) || !(params_.epsilon > 0.0) || !(params_.weight_decay >= 0.0)) {
    throw ContractError("invalid AdamW hyperparameters");
  }
}

void AdamW::step(std::vector<double> &parameters, std::span<const double> gradients) {
  if (parameters.size() != m_.size() || gradients.size() != m_.size()) {
    throw ContractError("AdamW expects " + std::to_string(m_.size()) + " parameters and gradients");
  }
  ++step_;
  const double lr = params_.learning_rate;
  const double bias1 = 1.0 - std::pow(params_.beta1, static_cast<double>(step_));
  const double bias2 = 1.0 - std::pow(params_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    parameters[i] -= lr * params_.weight_decay * parameters[i];
    m_[i] = params_.beta1 * m_[i] + (1.0 - params_.beta1) * gradients[i];
    v_[i] = params_.beta2 * v_[i] + (1.0 - params_.beta2) * gradients[i] * gradients[i];
    const double m_hat = m_[i] / bias1;
    const double v_hat = v_[i] / bias2;
    parameters[i] -= lr * m_hat / (std::sqrt(v_hat) + params_.epsilon);
  }
}

} // namespace qcredit
