#pragma once

#include <map>
#include <optional>
#include <vector>

#include "wikireading/models/model.hpp"
#include "wikireading/nn/layers.hpp"

namespace wikireading::models {

/// Answer logits A y for answer vectors A [N_ans x dim(y)]; no bias.
nn::Var answer_logits(nn::Graph& graph, nn::Var joint, nn::Parameter& answer_vectors);
/// P(i | y) = exp(y . a_i) / sum_j exp(y . a_j). Throws for an empty table.
nn::Var classify_answer(nn::Graph& graph, nn::Var joint, nn::Parameter& answer_vectors);

/// Shared behaviour of models that pick one entry of the answer table.
class ClassifierModel : public Model {
 public:
  struct Scores {
    nn::Var logits;
    std::optional<nn::Var> penalty;  // added to the training loss
  };

  using Model::Model;

  eval::MethodClass method_class() const override { return eval::MethodClass::kClassifier; }
  Example encode(const data::Instance& instance) const override;
  bool has_target(const Example& example) const override { return example.answer.has_value() && accepts(example); }
  nn::Var loss(nn::Graph& graph, const Example& example) const override;
  DecodedAnswer predict(const Example& example) const override;

  /// Answer probabilities for one example.
  std::vector<double> distribution(const Example& example) const;

  /// False for inputs the architecture cannot read; predict() then abstains.
  virtual bool accepts(const Example&) const { return true; }
  virtual Scores scores(nn::Graph& graph, const Example& example) const;
  /// The joint representation y. Not every classifier has one.
  virtual nn::Var joint(nn::Graph& graph, const Example& example) const;

  nn::Parameter& answer_vectors() const { return *answers_; }

 protected:
  /// Adds the answer table parameter; call once from the derived constructor.
  void add_answer_vectors(std::size_t joint_size, Rng& rng);

  nn::Parameter* answers_ = nullptr;
};

/// Multinomial logistic regression over concatenated property and document
/// bag-of-words counts.
class SparseBow final : public ClassifierModel {
 public:
  SparseBow(ModelConfig config, ModelTables tables, Rng& rng);
  Scores scores(nn::Graph& graph, const Example& example) const override;

  nn::Parameter& weights() const { return *weights_; }  // [2V x N_ans]
  nn::Parameter& bias() const { return *bias_; }

 private:
  nn::Parameter* weights_;
  nn::Parameter* bias_;
};

/// y = concat(mean document embedding, mean property embedding).
class AveragedEmbeddings final : public ClassifierModel {
 public:
  AveragedEmbeddings(ModelConfig config, ModelTables tables, Rng& rng);
  nn::Var joint(nn::Graph& graph, const Example& example) const override;

  nn::Parameter& embedding() const { return *embedding_; }

 private:
  nn::Parameter* embedding_;
};

/// Document vectors from an unsupervised distributed bag-of-words model,
/// frozen during supervised training, concatenated with the mean property
/// embedding.
class ParagraphVector final : public ClassifierModel {
 public:
  ParagraphVector(ModelConfig config, ModelTables tables, Rng& rng);

  Example encode(const data::Instance& instance) const override;
  nn::Var joint(nn::Graph& graph, const Example& example) const override;
  /// Trains the document and output word vectors with negative sampling.
  void pretrain(std::span<const data::Instance> training, std::uint64_t seed) override;

  /// Negative-sampling loss of predicting `words` (positives) and not
  /// `negatives` from `document_vector`:
  ///   mean_t softplus(-o_t . d) + K * mean_n softplus(o_n . d)
  /// with K = |negatives| / |words|.
  nn::Var unsupervised_loss(nn::Graph& graph, nn::Var document_vector, std::span<const int> words,
                            std::span<const int> negatives) const;
  /// Fits a vector for a document outside the training set, with the output
  /// word vectors held fixed. Deterministic in the document text.
  nn::Tensor infer_vector(std::string_view document) const;

  nn::Parameter& documents() const { return *documents_; }  // [n_docs x d_in], trainable = false
  nn::Parameter& output_words() const { return *output_words_; }  // trainable = false
  nn::Parameter& embedding() const { return *embedding_; }
  std::optional<std::size_t> document_row(std::string_view document) const;

 private:
  /// Uniform over the word ids absent from `document`.
  std::vector<int> sample_negatives(std::size_t count, std::span<const int> document, Rng& rng) const;

  nn::Parameter* documents_;
  nn::Parameter* output_words_;
  nn::Parameter* embedding_;
  std::map<std::uint64_t, std::size_t> rows_;
};

/// One LSTM reads property, separator and document; y is the final hidden
/// state.
class LstmReader final : public ClassifierModel {
 public:
  LstmReader(ModelConfig config, ModelTables tables, Rng& rng);
  nn::Var joint(nn::Graph& graph, const Example& example) const override;

  nn::Parameter& embedding() const { return *embedding_; }
  const nn::LstmCell& cell() const { return cell_; }

 private:
  nn::Parameter* embedding_;
  nn::LstmCell cell_;
};

/// Property LSTM gives u; a document LSTM gives z_t; attention
/// a_t = softmax_t(v . tanh(W1 [z_t; u])), r = sum_t a_t z_t and
/// y = tanh(W2 [r; u]). Rejects empty documents.
class AttentiveReader final : public ClassifierModel {
 public:
  AttentiveReader(ModelConfig config, ModelTables tables, Rng& rng);
  bool accepts(const Example& example) const override { return !example.document.empty(); }
  nn::Var joint(nn::Graph& graph, const Example& example) const override;
  /// Attention weights over document tokens.
  std::vector<double> attention(const Example& example) const;

  nn::Parameter& embedding() const { return *embedding_; }
  nn::Parameter& attention_projection() const { return *w1_; }  // W1
  nn::Parameter& output_projection() const { return *w2_; }     // W2
  nn::Parameter& attention_vector() const { return *v_; }       // v
  const nn::LstmCell& property_cell() const { return property_cell_; }
  const nn::LstmCell& document_cell() const { return document_cell_; }

 private:
  nn::Var forward(nn::Graph& graph, const Example& example, nn::Var* weights) const;

  nn::Parameter* embedding_;
  nn::LstmCell property_cell_;
  nn::LstmCell document_cell_;
  std::optional<nn::LstmCell> backward_cell_;
  nn::Parameter* w1_;
  nn::Parameter* w2_;
  nn::Parameter* v_;
};

/// Position-encoded sentence memories with softmax attention from the
/// property encoding; y = u + sum_i p_i c_i per hop. The training loss adds
/// entropy_weight * sum_i p_i log p_i for each hop.
class MemoryNetwork final : public ClassifierModel {
 public:
  MemoryNetwork(ModelConfig config, ModelTables tables, Rng& rng);
  Example encode(const data::Instance& instance) const override;
  bool accepts(const Example& example) const override { return !example.sentences.empty(); }
  Scores scores(nn::Graph& graph, const Example& example) const override;
  nn::Var joint(nn::Graph& graph, const Example& example) const override;
  /// Attention over sentences, one vector per hop.
  std::vector<std::vector<double>> attention(const Example& example) const;

  nn::Parameter& property_embedding() const { return *u_; }  // U
  nn::Parameter& memory_embedding() const { return *m_; }    // M
  nn::Parameter& output_embedding() const { return *c_; }    // C

 private:
  nn::Var forward(nn::Graph& graph, const Example& example, std::vector<nn::Var>* attention,
                  std::vector<nn::Var>* log_attention) const;

  nn::Parameter* u_;
  nn::Parameter* m_;
  nn::Parameter* c_;
};

/// Weight of embedding component k (of `dim`) for word j (of `length`),
/// both 1-based: (1 - j/J) - (k/d)(1 - 2j/J).
double position_weight(std::size_t j, std::size_t length, std::size_t k, std::size_t dim);
/// The [length x dim] matrix of position weights.
nn::Tensor position_encoding(std::size_t length, std::size_t dim);

}  // namespace wikireading::models
