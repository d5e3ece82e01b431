#include "wikireading/train/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace wikireading::train {

void Adam::step(nn::ParameterSet& params) {
  if (first_.empty()) {
    for (const auto& p : params) {
      first_.emplace_back(p->value.shape());
      second_.emplace_back(p->value.shape());
    }
  }
  if (first_.size() != params.size()) throw std::logic_error("Adam: parameter set changed between steps");
  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const double lr = options_.learning_rate;
  std::size_t i = 0;
  for (auto& p : params) {
    auto& m = first_[i];
    auto& v = second_[i];
    ++i;
    if (!p->trainable) continue;
    double* value = p->value.data();
    const double* grad = p->grad.data();
    double* mp = m.data();
    double* vp = v.data();
    const std::size_t n = p->value.size();
    for (std::size_t k = 0; k < n; ++k) {
      const double g = grad[k];
      mp[k] = b1 * mp[k] + (1.0 - b1) * g;
      vp[k] = b2 * vp[k] + (1.0 - b2) * g * g;
      const double m_hat = mp[k] / correction1;
      const double v_hat = vp[k] / correction2;
      value[k] -= lr * m_hat / (std::sqrt(v_hat) + options_.epsilon);
    }
  }
}

double gradient_norm(const nn::ParameterSet& params) {
  double sq = 0.0;
  for (const auto& p : params) {
    if (!p->trainable) continue;
    for (double g : p->grad.values()) sq += g * g;
  }
  return std::sqrt(sq);
}

double clip_gradient(nn::ParameterSet& params, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("clip threshold must be positive");
  const double norm = gradient_norm(params);
  if (norm > threshold) {
    const double factor = threshold / norm;
    for (auto& p : params) {
      if (!p->trainable) continue;
      for (double& g : p->grad.values()) g *= factor;
    }
  }
  return norm;
}

}  // namespace wikireading::train
