#pragma once

#include <span>
#include <vector>

#include "wikireading/nn/layers.hpp"
#include "wikireading/nn/ops.hpp"

namespace wikireading::models::detail {

inline nn::LstmState run_lstm(nn::Graph& g, const nn::LstmCell& cell, nn::Parameter& embedding,
                              std::span<const int> ids, nn::LstmState state, std::vector<nn::Var>* outputs = nullptr) {
  if (ids.empty()) return state;
  nn::Var x = nn::embed(g, embedding, ids);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    state = cell.step(g, nn::row(x, t), state);
    if (outputs) outputs->push_back(state.h);
  }
  return state;
}

inline nn::Var run_gru(nn::Graph& g, const nn::GruCell& cell, std::span<const nn::Var> inputs, nn::Var h,
                       std::vector<nn::Var>* outputs = nullptr) {
  for (const auto& x : inputs) {
    h = cell.step(g, x, h);
    if (outputs) outputs->push_back(h);
  }
  return h;
}

inline std::vector<nn::Var> embed_rows(nn::Graph& g, nn::Parameter& embedding, std::span<const int> ids) {
  std::vector<nn::Var> rows;
  if (ids.empty()) return rows;
  nn::Var x = nn::embed(g, embedding, ids);
  rows.reserve(ids.size());
  for (std::size_t t = 0; t < ids.size(); ++t) rows.push_back(nn::row(x, t));
  return rows;
}

inline nn::Var run_gru(nn::Graph& g, const nn::GruCell& cell, nn::Parameter& embedding, std::span<const int> ids,
                       nn::Var h, std::vector<nn::Var>* outputs = nullptr) {
  const auto xs = embed_rows(g, embedding, ids);
  return run_gru(g, cell, xs, h, outputs);
}

/// Property, then a separator and the document when the document is
/// non-empty.
inline std::vector<int> reader_sequence(std::span<const int> property, std::span<const int> document, int separator) {
  std::vector<int> seq(property.begin(), property.end());
  if (!document.empty()) {
    seq.push_back(separator);
    seq.insert(seq.end(), document.begin(), document.end());
  }
  return seq;
}

}  // namespace wikireading::models::detail
