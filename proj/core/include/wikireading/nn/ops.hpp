#pragma once

#include <span>
#include <vector>

#include "wikireading/nn/graph.hpp"

namespace wikireading::nn {

// Differentiable primitives. Every function records its result in the graph
// owning its operands and throws ShapeError naming the offending shapes when
// operands do not conform. Vectors have rank 1, matrices rank 2, and a
// scalar is a rank-1 tensor of length 1.

/// [m x k] * [k x n] -> [m x n]; [m x k] * [k] -> [m].
Var matmul(Var a, Var b);
/// W x + b for W [r x c], x [c], b [r].
Var linear(Var weight, Var x, Var bias);
Var linear(Var weight, Var x);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, Scalar factor);

/// Concatenation along the last axis. Leading dimensions must agree.
Var concat(std::span<const Var> parts);
Var concat(std::initializer_list<Var> parts);
/// Contiguous range [offset, offset + length) of a vector.
Var slice(Var a, std::size_t offset, std::size_t length);
/// Row i of a matrix as a vector.
Var row(Var a, std::size_t i);
/// Stacks equal-length vectors into a matrix, one per row.
Var stack(std::span<const Var> rows);

Var sum(Var a);
Var mean(Var a);
/// Column-wise reductions of a matrix: [n x d] -> [d].
Var sum_rows(Var a);
Var mean_rows(Var a);
Var dot(Var a, Var b);

Var tanh(Var a);
Var sigmoid(Var a);
Var exp(Var a);
Var log(Var a);

/// Max-subtracted softmax over a vector.
Var softmax(Var logits);
Var log_softmax(Var logits);
/// -log softmax(logits)[target], fused.
Var cross_entropy(Var logits, std::size_t target);
/// Mean over positions of the binary cross-entropy between sigmoid(logits)
/// and 0/1 labels, computed from logits without forming log(0).
Var sigmoid_cross_entropy(Var logits, std::span<const int> labels);

/// Rows `ids` of a [V x d] table -> [len x d]. Gradients scatter into only
/// the rows that were read.
Var embed(Graph& graph, Parameter& table, std::span<const int> ids);
/// A single row of the table as a [d] vector.
Var embed(Graph& graph, Parameter& table, int id);

/// sum_i weights[i] * vectors[i].
Var weighted_sum(Var weights, std::span<const Var> vectors);

enum class Primitive { kMatMul, kAdd, kMul, kConcat, kMean, kTanh, kSigmoid };

/// Uniform entry point over the basic primitives.
Var apply_primitive(Primitive kind, std::span<const Var> inputs);

/// Plain (unrecorded) numerically stable softmax.
std::vector<Scalar> softmax_values(std::span<const Scalar> logits);

}  // namespace wikireading::nn
