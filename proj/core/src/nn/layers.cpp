#include "wikireading/nn/layers.hpp"

#include <cmath>

#include "wikireading/nn/ops.hpp"

namespace wikireading::nn {

Tensor glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor t({rows, cols});
  for (auto& v : t.values()) v = rng.uniform(-limit, limit);
  return t;
}

Tensor embedding_init(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t({rows, cols});
  for (auto& v : t.values()) v = rng.normal(0.0, 0.1);
  return t;
}

Var Affine::operator()(Graph& g, Var x) const {
  return bias ? linear(g.param(*weight), x, g.param(*bias)) : linear(g.param(*weight), x);
}

Affine make_affine(ParameterSet& params, const std::string& name, std::size_t in, std::size_t out, Rng& rng,
                   bool with_bias) {
  Affine layer;
  layer.weight = &params.add(name + "/weight", glorot_uniform(out, in, rng));
  if (with_bias) layer.bias = &params.add(name + "/bias", Tensor({out}));
  return layer;
}

namespace {

void check_dim(const char* cell, const char* what, std::size_t expected, const Shape& got) {
  if (got != Shape{expected}) {
    throw ShapeError(std::string(cell) + ": " + what + " must be [" + std::to_string(expected) + "], got " +
                     to_string(got));
  }
}

}  // namespace

LstmState LstmCell::zero_state(Graph& g) const {
  return {g.input(Tensor({hidden_size})), g.input(Tensor({hidden_size}))};
}

LstmState LstmCell::step(Graph& g, Var x, LstmState state) const {
  check_dim("lstm_step", "input", input_size, x.shape());
  check_dim("lstm_step", "hidden state", hidden_size, state.h.shape());
  check_dim("lstm_step", "cell state", hidden_size, state.c.shape());
  const std::size_t h = hidden_size;
  Var gates = linear(g.param(*weight), concat({x, state.h}), g.param(*bias));
  Var ifo = sigmoid(slice(gates, 0, 3 * h));
  Var candidate = tanh(slice(gates, 3 * h, h));
  Var in_gate = slice(ifo, 0, h);
  Var forget_gate = slice(ifo, h, h);
  Var out_gate = slice(ifo, 2 * h, h);
  Var c = add(mul(forget_gate, state.c), mul(in_gate, candidate));
  return {mul(out_gate, tanh(c)), c};
}

LstmCell make_lstm(ParameterSet& params, const std::string& name, std::size_t in, std::size_t hidden, Rng& rng) {
  LstmCell cell;
  cell.input_size = in;
  cell.hidden_size = hidden;
  cell.weight = &params.add(name + "/weight", glorot_uniform(4 * hidden, in + hidden, rng));
  Tensor bias({4 * hidden});
  for (std::size_t i = hidden; i < 2 * hidden; ++i) bias[i] = 1.0;
  cell.bias = &params.add(name + "/bias", std::move(bias));
  return cell;
}

Var GruCell::zero_state(Graph& g) const { return g.input(Tensor({hidden_size})); }

Var GruCell::step(Graph& g, Var x, Var h) const {
  check_dim("gru_step", "input", input_size, x.shape());
  check_dim("gru_step", "hidden state", hidden_size, h.shape());
  const std::size_t n = hidden_size;
  Var projected = linear(g.param(*input), x, g.param(*bias));
  Var zr = sigmoid(add(slice(projected, 0, 2 * n), linear(g.param(*recurrent_gates), h)));
  Var update = slice(zr, 0, n);
  Var reset = slice(zr, n, n);
  Var candidate = tanh(add(slice(projected, 2 * n, n), linear(g.param(*recurrent_candidate), mul(reset, h))));
  return add(h, mul(update, sub(candidate, h)));
}

GruCell make_gru(ParameterSet& params, const std::string& name, std::size_t in, std::size_t hidden, Rng& rng) {
  GruCell cell;
  cell.input_size = in;
  cell.hidden_size = hidden;
  // Each gate block gets its own fan-in/fan-out scale.
  Tensor input({3 * hidden, in});
  for (std::size_t block = 0; block < 3; ++block) {
    Tensor part = glorot_uniform(hidden, in, rng);
    std::copy(part.values().begin(), part.values().end(), input.data() + block * hidden * in);
  }
  Tensor gates({2 * hidden, hidden});
  for (std::size_t block = 0; block < 2; ++block) {
    Tensor part = glorot_uniform(hidden, hidden, rng);
    std::copy(part.values().begin(), part.values().end(), gates.data() + block * hidden * hidden);
  }
  cell.input = &params.add(name + "/input", std::move(input));
  cell.recurrent_gates = &params.add(name + "/recurrent_gates", std::move(gates));
  cell.recurrent_candidate = &params.add(name + "/recurrent_candidate", glorot_uniform(hidden, hidden, rng));
  cell.bias = &params.add(name + "/bias", Tensor({3 * hidden}));
  return cell;
}

void copy_weights(const GruCell& from, const GruCell& to) {
  auto copy = [](const Parameter* src, Parameter* dst) {
    if (src->value.shape() != dst->value.shape()) {
      throw ShapeError("copy_weights: " + src->name + " " + to_string(src->value.shape()) + " vs " + dst->name +
                       " " + to_string(dst->value.shape()));
    }
    dst->value = src->value;
  };
  copy(from.input, to.input);
  copy(from.recurrent_gates, to.recurrent_gates);
  copy(from.recurrent_candidate, to.recurrent_candidate);
  copy(from.bias, to.bias);
}

}  // namespace wikireading::nn
