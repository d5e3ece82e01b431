#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wikireading/models/model.hpp"
#include "wikireading/nn/layers.hpp"

namespace wikireading::models {

struct Chunk {
  std::size_t begin = 0;  // token range [begin, end)
  std::size_t end = 0;
  double score = 0.0;     // harmonic mean of member probabilities
};

/// Maximal runs of positions with probability strictly above `threshold`.
std::vector<Chunk> find_chunks(std::span<const double> probabilities, double threshold);
/// Highest-scoring chunk; the earliest wins ties.
std::optional<Chunk> best_chunk(std::span<const double> probabilities, double threshold);

/// The best chunk's text, cut from `text` at the token offsets. A chunk that
/// reads as a date is rewritten in canonical form. Empty if nothing passes
/// the threshold.
DecodedAnswer decode_chunks(std::span<const double> probabilities, std::span<const data::Token> tokens,
                            std::string_view text, double threshold);
/// Same for bare tokens, joined with detokenize().
DecodedAnswer decode_chunks(std::span<const double> probabilities, std::span<const std::string> tokens,
                            double threshold);

/// LSTM over property, separator and document with a per-token sigmoid
/// output, trained on distant-supervision labels.
class RnnLabeler final : public Model {
 public:
  RnnLabeler(ModelConfig config, ModelTables tables, Rng& rng);

  eval::MethodClass method_class() const override { return eval::MethodClass::kExtraction; }
  Example encode(const data::Instance& instance) const override;
  /// Only documents containing an answer are trained on.
  bool has_target(const Example& example) const override {
    return example.answer_present && !example.document.empty();
  }
  /// Mean binary cross-entropy over document positions.
  nn::Var loss(nn::Graph& graph, const Example& example) const override;
  DecodedAnswer predict(const Example& example) const override;

  /// One logit per document token.
  nn::Var logits(nn::Graph& graph, const Example& example) const;
  std::vector<double> probabilities(const Example& example) const;

  nn::Parameter& embedding() const { return *embedding_; }
  const nn::LstmCell& cell() const { return cell_; }
  const nn::Affine& output() const { return output_; }

 private:
  nn::Parameter* embedding_;
  nn::LstmCell cell_;
  nn::Affine output_;
};

}  // namespace wikireading::models
