#include "wikireading/nn/graph.hpp"

#include <algorithm>

namespace wikireading::nn {

const char* to_string(OpKind kind) {
  switch (kind) {
    case OpKind::kInput: return "input";
    case OpKind::kParameter: return "parameter";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kLinear: return "linear";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kConcat: return "concat";
    case OpKind::kSlice: return "slice";
    case OpKind::kRow: return "row";
    case OpKind::kStack: return "stack";
    case OpKind::kSum: return "sum";
    case OpKind::kMean: return "mean";
    case OpKind::kSumRows: return "sum_rows";
    case OpKind::kMeanRows: return "mean_rows";
    case OpKind::kDot: return "dot";
    case OpKind::kTanh: return "tanh";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kLogSoftmax: return "log_softmax";
    case OpKind::kCrossEntropy: return "cross_entropy";
    case OpKind::kSigmoidCrossEntropy: return "sigmoid_cross_entropy";
    case OpKind::kEmbed: return "embed";
    case OpKind::kWeightedSum: return "weighted_sum";
  }
  return "unknown";
}

Var Graph::input(Tensor value) { return record(OpKind::kInput, std::move(value), {}, nullptr); }

Var Graph::param(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{this, it->second};
  Var v = record(OpKind::kParameter, Tensor{}, {}, nullptr);
  nodes_[v.id].param = &p;
  param_nodes_.emplace(&p, v.id);
  return v;
}

Var Graph::record(OpKind kind, Tensor value, std::vector<std::uint32_t> inputs, BackwardFn backward) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(Node{kind, std::move(value), Tensor{}, std::move(inputs), std::move(backward), nullptr});
  return Var{this, id};
}

Tensor& Graph::grad(std::uint32_t id) {
  auto& node = nodes_[id];
  if (node.param) return node.param->grad;
  if (node.grad.empty()) node.grad = Tensor(node.value.shape());
  return node.grad;
}

void Graph::backward(Var loss, Scalar seed) {
  if (loss.graph != this) throw std::invalid_argument("loss belongs to a different computation record");
  if (value(loss.id).size() != 1) {
    throw ShapeError("backward needs a scalar loss, got shape " + to_string(value(loss.id).shape()));
  }
  grad(loss.id)[0] += seed;
  for (std::uint32_t id = loss.id + 1; id-- > 0;) {
    auto& node = nodes_[id];
    if (node.grad.empty() || !node.backward) continue;
    node.backward(*this, id);
  }
}

}  // namespace wikireading::nn
