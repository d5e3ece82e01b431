#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wikireading/data/answer_table.hpp"
#include "wikireading/data/instance.hpp"
#include "wikireading/data/placeholders.hpp"
#include "wikireading/data/tokenizer.hpp"
#include "wikireading/data/vocabulary.hpp"
#include "wikireading/eval/bounds.hpp"
#include "wikireading/models/config.hpp"
#include "wikireading/nn/graph.hpp"

namespace wikireading::models {

/// An instance converted to model inputs and targets. Which fields are
/// filled depends on the architecture.
struct Example {
  std::vector<std::string> gold;
  std::vector<int> property;                // word or character ids, truncated
  std::vector<int> document;                // word or character ids, truncated
  std::vector<std::vector<int>> sentences;  // memory network
  std::string text;                         // original document
  std::vector<data::Token> tokens;          // truncated document tokens
  std::vector<int> labels;                  // labeler targets, one per document token
  bool answer_present = false;
  std::optional<std::size_t> answer;        // classifier target
  std::vector<int> target;                  // decoder target, ends with EOS
  data::PlaceholderMap placeholders;
  std::optional<std::size_t> document_row;  // paragraph vector of a training document
  nn::Tensor document_vector;               // inferred paragraph vector otherwise
};

struct DecodedAnswer {
  std::string answer;  // empty when the model abstains
  std::vector<std::string> tokens;
  std::vector<double> step_confidence;
  double confidence = 0.0;
  std::size_t unresolved_placeholders = 0;
};

/// Lookup tables fixed from the training corpus before parameters exist.
struct ModelTables {
  data::Vocabulary vocab;  // words, or characters for character models
  data::AnswerTable answers;
  std::vector<std::uint64_t> documents;  // paragraph vector rows, by document hash
};

ModelTables build_tables(const ModelConfig& config, std::span<const data::Instance> training);

class Model {
 public:
  Model(ModelConfig config, ModelTables tables);
  virtual ~Model() = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& config() const noexcept { return config_; }
  const ModelTables& tables() const noexcept { return tables_; }
  nn::ParameterSet& parameters() noexcept { return params_; }
  const nn::ParameterSet& parameters() const noexcept { return params_; }

  virtual eval::MethodClass method_class() const = 0;
  eval::BoundContext bound_context() const;

  virtual Example encode(const data::Instance& instance) const = 0;
  /// Whether the example has a target the model can be trained on.
  virtual bool has_target(const Example& example) const = 0;
  /// Training loss of one example. Requires has_target(example).
  virtual nn::Var loss(nn::Graph& graph, const Example& example) const = 0;
  virtual DecodedAnswer predict(const Example& example) const = 0;

  /// Unsupervised phase run once before supervised training. No-op by
  /// default.
  virtual void pretrain(std::span<const data::Instance> training, std::uint64_t seed);

 protected:
  ModelConfig config_;
  ModelTables tables_;
  nn::ParameterSet params_;
};

/// Builds tables from `training` and initialises parameters from `seed`.
std::unique_ptr<Model> create_model(const ModelConfig& config, std::span<const data::Instance> training,
                                    std::uint64_t seed);
std::unique_ptr<Model> create_model(const ModelConfig& config, ModelTables tables, std::uint64_t seed);

/// Checkpoint with a manifest holding the config and tables.
void save_model(const Model& model, const std::filesystem::path& path);
std::unique_ptr<Model> load_model(const std::filesystem::path& path);

std::uint64_t document_hash(std::string_view document);

// Encoding helpers shared by the architectures.

/// Tokens of `text` truncated to `limit`, with ids in `vocab`.
std::vector<int> encode_words(const data::Vocabulary& vocab, std::string_view text, std::size_t limit);
/// Characters of `text` truncated to `limit`, with ids in `vocab`.
std::vector<int> encode_chars(const data::Vocabulary& vocab, std::string_view text, std::size_t limit);

/// Splits document ids after ".", "!" and "?" tokens, dropping empty
/// sentences and keeping at most `max_sentences`.
std::vector<std::vector<int>> split_sentences(std::span<const int> document, const data::Vocabulary& vocab,
                                              std::size_t max_sentences);

}  // namespace wikireading::models
