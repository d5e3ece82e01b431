#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wikireading/data/instance.hpp"
#include "wikireading/models/model.hpp"

namespace wikireading::train {

/// Raised when a run cannot continue because the loss stopped being finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HyperParams {
  double learning_rate = 1e-3;
  double clip = 1.0;
  /// Overrides the model's entropy_weight when set.
  std::optional<double> entropy_weight;
};

struct Schedule {
  std::size_t batch_size = 32;
  std::size_t max_steps = 2000;
  std::size_t eval_every = 100;
  /// Evaluations without improvement before stopping; 0 disables.
  std::size_t patience = 5;
  /// Stop as soon as validation Mean F1 reaches this.
  std::optional<double> target_f1;
  bool pretrain = true;
};

struct Evaluation {
  std::size_t step;
  double mean_f1;
};

struct TrainResult {
  HyperParams hyper;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;
  std::size_t steps = 0;           // supervised updates taken
  std::size_t best_step = 0;
  double validation_f1 = 0.0;      // best seen
  std::optional<std::size_t> steps_to_target;
  std::vector<double> losses;      // mean mini-batch loss per step
  std::vector<Evaluation> evaluations;
};

/// Model inputs for every instance, in order.
std::vector<models::Example> encode_all(const models::Model& model, std::span<const data::Instance> instances);

/// Predicted answer sets; an abstention gives an empty set.
std::vector<std::vector<std::string>> predict_all(const models::Model& model, std::span<const models::Example> examples);
std::vector<std::vector<std::string>> predict_all(const models::Model& model, std::span<const data::Instance> instances);

/// Mean F1 of the model's predictions against each example's gold set.
double evaluate(const models::Model& model, std::span<const models::Example> examples);

/// Runs the model's pretraining (if enabled), then Adam on mini-batches
/// sampled without replacement from the trainable examples. Validation Mean
/// F1 is measured every eval_every steps and after the last step; the
/// parameters of the best evaluation are restored before returning. A
/// non-finite loss marks the result failed and stops training.
///
/// Throws data::DataError when no training example has a target.
TrainResult train(models::Model& model, std::span<const data::Instance> training,
                  std::span<const data::Instance> validation, const HyperParams& hyper, const Schedule& schedule,
                  std::uint64_t seed);

/// Copies of every parameter value, in set order.
std::vector<nn::Tensor> snapshot(const nn::ParameterSet& params);
void restore(nn::ParameterSet& params, const std::vector<nn::Tensor>& values);

}  // namespace wikireading::train
