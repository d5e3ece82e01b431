#pragma once

#include <cstdint>
#include <vector>

#include "wikireading/nn/tensor.hpp"

namespace wikireading::train {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam over the trainable parameters of a set. Moments are
/// created lazily, shaped like their parameters.
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  /// One update from the current Parameter::grad values. Non-trainable
  /// parameters are left untouched.
  void step(nn::ParameterSet& params);

  std::uint64_t steps() const noexcept { return steps_; }
  const AdamOptions& options() const noexcept { return options_; }
  void set_learning_rate(double lr) { options_.learning_rate = lr; }

 private:
  AdamOptions options_;
  std::uint64_t steps_ = 0;
  std::vector<nn::Tensor> first_;
  std::vector<nn::Tensor> second_;
};

/// Euclidean norm of all trainable gradients taken together.
double gradient_norm(const nn::ParameterSet& params);

/// Scales every trainable gradient by min(1, threshold / ||g||). Returns the
/// norm before clipping. A zero gradient is left as is.
double clip_gradient(nn::ParameterSet& params, double threshold);

}  // namespace wikireading::train
