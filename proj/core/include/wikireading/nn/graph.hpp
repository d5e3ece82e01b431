#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "wikireading/nn/tensor.hpp"

namespace wikireading::nn {

enum class OpKind : std::uint8_t {
  kInput,
  kParameter,
  kMatMul,
  kLinear,
  kAdd,
  kSub,
  kMul,
  kScale,
  kConcat,
  kSlice,
  kRow,
  kStack,
  kSum,
  kMean,
  kSumRows,
  kMeanRows,
  kDot,
  kTanh,
  kSigmoid,
  kExp,
  kLog,
  kSoftmax,
  kLogSoftmax,
  kCrossEntropy,
  kSigmoidCrossEntropy,
  kEmbed,
  kWeightedSum,
};

const char* to_string(OpKind kind);

class Graph;

/// Handle to a value recorded in a Graph.
struct Var {
  Graph* graph = nullptr;
  std::uint32_t id = 0;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t size() const { return value().size(); }
};

/// The computation record: an append-only, topologically ordered list of
/// primitive applications. Every node's inputs have smaller ids than the
/// node itself. One Graph serves one forward/backward pass on one thread.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::uint32_t self)>;

  struct Node {
    OpKind kind;
    Tensor value;
    Tensor grad;  // allocated on first accumulation
    std::vector<std::uint32_t> inputs;
    BackwardFn backward;
    Parameter* param = nullptr;  // parameter leaves alias the parameter's storage
  };

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var input(Tensor value);
  /// Leaf bound to a parameter; repeated calls return the same node.
  Var param(Parameter& p);

  Var record(OpKind kind, Tensor value, std::vector<std::uint32_t> inputs, BackwardFn backward);

  const Tensor& value(std::uint32_t id) const {
    const auto& n = nodes_[id];
    return n.param ? n.param->value : n.value;
  }
  const Node& node(std::uint32_t id) const { return nodes_[id]; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Gradient buffer of a node, zero-initialised on first access. For a
  /// parameter leaf this is Parameter::grad itself.
  Tensor& grad(std::uint32_t id);

  /// Reverse sweep from a one-element loss. `seed` scales the loss gradient,
  /// which lets a mini-batch accumulate mean gradients across graphs.
  /// Parameter gradients are added to Parameter::grad.
  void backward(Var loss, Scalar seed = 1.0);

 private:
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::uint32_t> param_nodes_;
};

inline const Tensor& Var::value() const { return graph->value(id); }

}  // namespace wikireading::nn
