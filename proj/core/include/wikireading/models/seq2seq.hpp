#pragma once

#include <span>
#include <vector>

#include "wikireading/models/model.hpp"
#include "wikireading/nn/layers.hpp"

namespace wikireading::models {

/// GRU decoder over a token table: input embedding, cell and output layer.
struct Decoder {
  nn::Parameter* embedding = nullptr;
  nn::GruCell cell;
  nn::Affine output;

  /// Teacher-forced mean cross-entropy per step. Inputs are GO followed by
  /// target[0 .. n-2]; `target` should end with EOS.
  nn::Var loss(nn::Graph& graph, nn::Var state, std::span<const int> target) const;

  struct Step {
    int id;
    double probability;
  };
  /// Greedy argmax decoding from `state`, stopping after EOS (returned as the
  /// last step) or after `max_steps` other emissions. `blocked` ids are never
  /// emitted.
  std::vector<Step> greedy(nn::Graph& graph, nn::Var state, std::size_t max_steps, std::span<const int> blocked) const;
};

/// Word-level encoder-decoder. The encoder GRU reads property, separator and
/// document; the decoder GRU starts from its final state. Encoder and
/// decoder share one embedding matrix. With placeholder_seq2seq, document
/// OOV words are replaced by placeholder ids that the decoder can emit and
/// that are mapped back to the document's words.
class Seq2Seq final : public Model {
 public:
  Seq2Seq(ModelConfig config, ModelTables tables, Rng& rng);

  bool uses_placeholders() const { return config_.architecture == Architecture::kPlaceholderSeq2Seq; }
  eval::MethodClass method_class() const override {
    return uses_placeholders() ? eval::MethodClass::kPlaceholderSeq2Seq : eval::MethodClass::kWordSeq2Seq;
  }
  Example encode(const data::Instance& instance) const override;
  bool has_target(const Example& example) const override { return !example.target.empty(); }
  nn::Var loss(nn::Graph& graph, const Example& example) const override;
  DecodedAnswer predict(const Example& example) const override;

  /// Final encoder state.
  nn::Var encode_state(nn::Graph& graph, const Example& example) const;

  nn::Parameter& embedding() const { return *embedding_; }
  const nn::GruCell& encoder() const { return encoder_; }
  const Decoder& decoder() const { return decoder_; }

 private:
  nn::Parameter* embedding_;
  nn::GruCell encoder_;
  Decoder decoder_;
};

/// Character-level encoder-decoder: a property GRU gives u; a two-layer
/// document GRU whose first layer starts from zero and whose second layer
/// starts from u; a GRU decoder from the second layer's final state.
class CharSeq2Seq final : public Model {
 public:
  CharSeq2Seq(ModelConfig config, ModelTables tables, Rng& rng);

  eval::MethodClass method_class() const override { return eval::MethodClass::kCharSeq2Seq; }
  Example encode(const data::Instance& instance) const override;
  bool has_target(const Example& example) const override { return !example.target.empty(); }
  nn::Var loss(nn::Graph& graph, const Example& example) const override;
  DecodedAnswer predict(const Example& example) const override;
  /// Pretrains a character language model for config().lm_steps steps and
  /// initialises from it; nothing when lm_steps is 0.
  void pretrain(std::span<const data::Instance> training, std::uint64_t seed) override;

  nn::Var encode_state(nn::Graph& graph, const Example& example) const;

  nn::Parameter& embedding() const { return *embedding_; }
  const nn::GruCell& property_encoder() const { return property_encoder_; }
  const nn::GruCell& document_layer1() const { return document_layer1_; }
  const nn::GruCell& document_layer2() const { return document_layer2_; }
  const Decoder& decoder() const { return decoder_; }

 private:
  nn::Parameter* embedding_;
  nn::GruCell property_encoder_;
  nn::GruCell document_layer1_;
  nn::GruCell document_layer2_;
  Decoder decoder_;
};

/// Next-character GRU language model with the character decoder's shapes.
class CharLanguageModel {
 public:
  CharLanguageModel(std::size_t vocab_size, std::size_t embedding_dim, std::size_t hidden_size, Rng& rng);

  /// Mean cross-entropy of predicting each character and then EOS, reading
  /// GO followed by the sequence.
  nn::Var loss(nn::Graph& graph, std::span<const int> sequence) const;
  /// exp of the mean per-character cross-entropy over `sequences`.
  double perplexity(std::span<const std::vector<int>> sequences) const;

  /// Adam on random mini-batches of `sequences`. Returns the loss per step.
  std::vector<double> fit(std::span<const std::vector<int>> sequences, std::size_t steps, std::size_t batch_size,
                          double learning_rate, std::uint64_t seed);

  nn::ParameterSet& parameters() { return params_; }
  nn::Parameter& embedding() const { return *decoder_.embedding; }
  const nn::GruCell& cell() const { return decoder_.cell; }
  const nn::Affine& output() const { return decoder_.output; }

 private:
  nn::ParameterSet params_;
  Decoder decoder_;
};

/// Copies the language model's embedding, recurrent weights and output layer
/// into the character model: the recurrent weights go to both the first
/// document layer and the decoder. Other weights are untouched.
void init_from_lm(CharSeq2Seq& model, const CharLanguageModel& lm);

}  // namespace wikireading::models
