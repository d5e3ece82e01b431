#include "wikireading/train/trainer.hpp"

#include <cmath>
#include <numeric>

#include "wikireading/eval/metrics.hpp"
#include "wikireading/random.hpp"
#include "wikireading/train/optimizer.hpp"

namespace wikireading::train {

std::vector<models::Example> encode_all(const models::Model& model, std::span<const data::Instance> instances) {
  std::vector<models::Example> out;
  out.reserve(instances.size());
  for (const auto& instance : instances) out.push_back(model.encode(instance));
  return out;
}

std::vector<std::vector<std::string>> predict_all(const models::Model& model,
                                                  std::span<const models::Example> examples) {
  std::vector<std::vector<std::string>> out;
  out.reserve(examples.size());
  for (const auto& example : examples) {
    auto answer = model.predict(example).answer;
    out.push_back(answer.empty() ? std::vector<std::string>{} : std::vector<std::string>{std::move(answer)});
  }
  return out;
}

std::vector<std::vector<std::string>> predict_all(const models::Model& model,
                                                  std::span<const data::Instance> instances) {
  return predict_all(model, encode_all(model, instances));
}

double evaluate(const models::Model& model, std::span<const models::Example> examples) {
  if (examples.empty()) return 0.0;
  const auto predictions = predict_all(model, examples);
  double total = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) total += eval::instance_f1(predictions[i], examples[i].gold);
  return total / static_cast<double>(examples.size());
}

std::vector<nn::Tensor> snapshot(const nn::ParameterSet& params) {
  std::vector<nn::Tensor> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p->value);
  return out;
}

void restore(nn::ParameterSet& params, const std::vector<nn::Tensor>& values) {
  if (values.size() != params.size()) throw std::invalid_argument("restore: snapshot has a different parameter count");
  std::size_t i = 0;
  for (auto& p : params) {
    if (p->value.shape() != values[i].shape()) throw nn::ShapeError("restore: shape mismatch for " + p->name);
    p->value = values[i++];
  }
}

TrainResult train(models::Model& model, std::span<const data::Instance> training,
                  std::span<const data::Instance> validation, const HyperParams& hyper, const Schedule& schedule,
                  std::uint64_t seed) {
  if (schedule.batch_size == 0 || schedule.eval_every == 0) {
    throw std::invalid_argument("train: batch_size and eval_every must be positive");
  }
  if (hyper.learning_rate < 0.0 || !(hyper.clip > 0.0)) {
    throw std::invalid_argument("train: learning rate must be >= 0 and clip > 0");
  }
  if (hyper.entropy_weight && *hyper.entropy_weight != model.config().entropy_weight) {
    throw std::invalid_argument("train: entropy_weight must be set on the model config before creation");
  }

  TrainResult result;
  result.hyper = hyper;
  result.seed = seed;

  if (schedule.pretrain) model.pretrain(training, mix64(seed ^ 0x9e7a));

  std::vector<models::Example> examples;
  for (const auto& instance : training) {
    auto example = model.encode(instance);
    if (model.has_target(example)) examples.push_back(std::move(example));
  }
  if (examples.empty()) throw data::DataError("train: no training instance has a usable target");
  const auto validation_examples = encode_all(model, validation);

  auto& params = model.parameters();
  Adam adam({hyper.learning_rate});
  Rng rng(mix64(seed));
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());
  std::size_t cursor = 0;

  std::vector<nn::Tensor> best = snapshot(params);
  double best_f1 = -1.0;
  std::size_t stale = 0;
  const double inverse_batch = 1.0 / static_cast<double>(schedule.batch_size);

  auto run_evaluation = [&](std::size_t step) {
    const double f1 = evaluate(model, validation_examples);
    result.evaluations.push_back({step, f1});
    if (f1 > best_f1) {
      best_f1 = f1;
      result.best_step = step;
      best = snapshot(params);
      stale = 0;
    } else {
      ++stale;
    }
    if (schedule.target_f1 && f1 >= *schedule.target_f1 && !result.steps_to_target) result.steps_to_target = step;
  };

  for (std::size_t step = 1; step <= schedule.max_steps; ++step) {
    params.zero_grad();
    double total = 0.0;
    for (std::size_t b = 0; b < schedule.batch_size; ++b) {
      if (cursor == order.size()) {
        rng.shuffle(order.begin(), order.end());
        cursor = 0;
      }
      nn::Graph graph;
      const nn::Var loss = model.loss(graph, examples[order[cursor++]]);
      total += loss.value().item();
      graph.backward(loss, inverse_batch);
    }
    const double mean_loss = total * inverse_batch;
    result.losses.push_back(mean_loss);
    if (!std::isfinite(mean_loss)) {
      result.failed = true;
      result.failure = "loss is not finite at step " + std::to_string(step);
      break;
    }
    clip_gradient(params, hyper.clip);
    adam.step(params);
    result.steps = step;

    if (step % schedule.eval_every == 0 || step == schedule.max_steps) {
      run_evaluation(step);
      if (result.steps_to_target) break;
      if (schedule.patience > 0 && stale >= schedule.patience) break;
    }
  }

  if (result.evaluations.empty() && !result.failed) run_evaluation(result.steps);
  restore(params, best);
  result.validation_f1 = std::max(best_f1, 0.0);
  return result;
}

}  // namespace wikireading::train
