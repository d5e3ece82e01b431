#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace wikireading::models {

enum class Architecture {
  kSparseBow,
  kAveragedEmbeddings,
  kParagraphVector,
  kLstmReader,
  kAttentiveReader,
  kMemoryNetwork,
  kRnnLabeler,
  kSeq2Seq,
  kPlaceholderSeq2Seq,
  kCharSeq2Seq,
};

inline constexpr Architecture kAllArchitectures[] = {
    Architecture::kSparseBow,       Architecture::kAveragedEmbeddings, Architecture::kParagraphVector,
    Architecture::kLstmReader,      Architecture::kAttentiveReader,    Architecture::kMemoryNetwork,
    Architecture::kRnnLabeler,      Architecture::kSeq2Seq,            Architecture::kPlaceholderSeq2Seq,
    Architecture::kCharSeq2Seq,
};

/// Stable lowercase tag, e.g. "attentive_reader".
const char* to_string(Architecture architecture);
/// Throws std::invalid_argument for an unknown tag.
Architecture parse_architecture(std::string_view tag);

bool is_classifier(Architecture architecture);

struct ModelConfig {
  Architecture architecture = Architecture::kLstmReader;

  // Word models.
  std::size_t embedding_dim = 64;      // d_in
  std::size_t joint_dim = 64;          // d_out
  std::size_t hidden_size = 128;
  std::size_t vocab_size = 5000;       // N_w
  std::size_t sparse_vocab_size = 5000;
  std::size_t answer_count = 500;      // N_ans
  std::size_t placeholder_count = 100; // N_doc
  std::size_t doc_words = 60;
  std::size_t property_words = 10;
  std::size_t answer_words = 20;       // decoder length cap

  // Character models.
  std::size_t char_vocab_size = 76;    // including reserved ids
  std::size_t char_embedding_dim = 30;
  std::size_t doc_chars = 200;
  std::size_t property_chars = 20;
  std::size_t answer_chars = 60;

  // Memory network.
  std::size_t memory_sentences = 30;
  std::size_t memory_hops = 1;
  double entropy_weight = 0.01;

  // Attentive reader.
  bool bidirectional = false;

  // RNN labeler.
  double label_threshold = 0.5;

  // Paragraph vector (unsupervised phase).
  std::size_t pv_negatives = 5;
  std::size_t pv_epochs = 20;
  std::size_t pv_infer_steps = 50;
  double pv_learning_rate = 0.05;

  // Character LM pretraining; 0 steps disables it.
  std::size_t lm_steps = 0;
  std::size_t lm_batch_size = 16;
  double lm_learning_rate = 3e-3;

  /// Full-scale structural sizes.
  static ModelConfig paper(Architecture architecture);
  /// Desk-scale sizes (the defaults above).
  static ModelConfig desk(Architecture architecture);

  bool character_mode() const { return architecture == Architecture::kCharSeq2Seq; }

  /// Throws std::invalid_argument naming the first non-positive size.
  void validate() const;

  /// Every field as a named key (architecture under "architecture").
  std::map<std::string, std::string> to_map() const;
  /// Sets one field from its text form. Returns false for an unknown key and
  /// throws std::invalid_argument for an unparsable value.
  bool set(std::string_view key, std::string_view value);
};

}  // namespace wikireading::models
