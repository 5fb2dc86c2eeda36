#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qcredit {

/// Adaptive moment estimation with decoupled weight decay: the decay is
/// applied as p -= lr * weight_decay * p before the moment update, so a
/// zero learning rate leaves parameters untouched.
class AdamW {
public:
  struct Params {
    double learning_rate = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.01;
  };

  AdamW(std::size_t parameter_count, Params params);

  void step(std::vector<double> &parameters, std::span<const double> gradients);

  const Params &params() const noexcept { return params_; }
  std::size_t step_count() const noexcept { return step_; }

private:
  Params params_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t step_ = 0;
};

} // namespace qcredit
