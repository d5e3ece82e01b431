#pragma once

#include <string>

#include "wikireading/nn/graph.hpp"
#include "wikireading/random.hpp"

namespace wikireading::nn {

/// Uniform in +-sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng);
/// Rows drawn from N(0, 0.1^2).
Tensor embedding_init(std::size_t rows, std::size_t cols, Rng& rng);

struct Affine {
  Parameter* weight = nullptr;
  Parameter* bias = nullptr;  // may be null

  std::size_t input_size() const { return weight->value.shape()[1]; }
  std::size_t output_size() const { return weight->value.shape()[0]; }
  Var operator()(Graph& g, Var x) const;
};

Affine make_affine(ParameterSet& params, const std::string& name, std::size_t in, std::size_t out, Rng& rng,
                   bool with_bias = true);

struct LstmState {
  Var h;
  Var c;
};

/// LSTM with input, forget and output gates. One fused weight matrix
/// [4h x (in + h)] with row blocks ordered (input, forget, output, cell).
/// The forget-gate bias starts at 1.
struct LstmCell {
  Parameter* weight = nullptr;
  Parameter* bias = nullptr;
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;

  LstmState zero_state(Graph& g) const;
  LstmState step(Graph& g, Var x, LstmState state) const;
};

LstmCell make_lstm(ParameterSet& params, const std::string& name, std::size_t in, std::size_t hidden, Rng& rng);

/// Gated recurrent unit:
///   z  = sigmoid(Wz x + Uz h + bz)
///   r  = sigmoid(Wr x + Ur h + br)
///   h~ = tanh(Wh x + Uh (r * h) + bh)
///   h' = (1 - z) * h + z * h~
/// `input` holds [Wz; Wr; Wh], `recurrent_gates` holds [Uz; Ur].
struct GruCell {
  Parameter* input = nullptr;
  Parameter* recurrent_gates = nullptr;
  Parameter* recurrent_candidate = nullptr;
  Parameter* bias = nullptr;
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;

  Var zero_state(Graph& g) const;
  Var step(Graph& g, Var x, Var h) const;
};

GruCell make_gru(ParameterSet& params, const std::string& name, std::size_t in, std::size_t hidden, Rng& rng);

/// Copies every parameter value of `from` into `to`; shapes must agree.
void copy_weights(const GruCell& from, const GruCell& to);

}  // namespace wikireading::nn
