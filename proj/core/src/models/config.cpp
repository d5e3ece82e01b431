#include "wikireading/models/config.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <variant>
#include <vector>

namespace wikireading::models {

namespace {

struct Tag {
  Architecture architecture;
  const char* name;
};

constexpr Tag kTags[] = {
    {Architecture::kSparseBow, "sparse_bow"},
    {Architecture::kAveragedEmbeddings, "averaged_embeddings"},
    {Architecture::kParagraphVector, "paragraph_vector"},
    {Architecture::kLstmReader, "lstm_reader"},
    {Architecture::kAttentiveReader, "attentive_reader"},
    {Architecture::kMemoryNetwork, "memory_network"},
    {Architecture::kRnnLabeler, "rnn_labeler"},
    {Architecture::kSeq2Seq, "seq2seq"},
    {Architecture::kPlaceholderSeq2Seq, "placeholder_seq2seq"},
    {Architecture::kCharSeq2Seq, "char_seq2seq"},
};

using Field = std::variant<std::size_t ModelConfig::*, double ModelConfig::*, bool ModelConfig::*>;

const std::vector<std::pair<std::string_view, Field>>& fields() {
  static const std::vector<std::pair<std::string_view, Field>> table = {
      {"embedding_dim", &ModelConfig::embedding_dim},
      {"joint_dim", &ModelConfig::joint_dim},
      {"hidden_size", &ModelConfig::hidden_size},
      {"vocab_size", &ModelConfig::vocab_size},
      {"sparse_vocab_size", &ModelConfig::sparse_vocab_size},
      {"answer_count", &ModelConfig::answer_count},
      {"placeholder_count", &ModelConfig::placeholder_count},
      {"doc_words", &ModelConfig::doc_words},
      {"property_words", &ModelConfig::property_words},
      {"answer_words", &ModelConfig::answer_words},
      {"char_vocab_size", &ModelConfig::char_vocab_size},
      {"char_embedding_dim", &ModelConfig::char_embedding_dim},
      {"doc_chars", &ModelConfig::doc_chars},
      {"property_chars", &ModelConfig::property_chars},
      {"answer_chars", &ModelConfig::answer_chars},
      {"memory_sentences", &ModelConfig::memory_sentences},
      {"memory_hops", &ModelConfig::memory_hops},
      {"entropy_weight", &ModelConfig::entropy_weight},
      {"bidirectional", &ModelConfig::bidirectional},
      {"label_threshold", &ModelConfig::label_threshold},
      {"pv_negatives", &ModelConfig::pv_negatives},
      {"pv_epochs", &ModelConfig::pv_epochs},
      {"pv_infer_steps", &ModelConfig::pv_infer_steps},
      {"pv_learning_rate", &ModelConfig::pv_learning_rate},
      {"lm_steps", &ModelConfig::lm_steps},
      {"lm_batch_size", &ModelConfig::lm_batch_size},
      {"lm_learning_rate", &ModelConfig::lm_learning_rate},
  };
  return table;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const char* to_string(Architecture architecture) {
  for (const auto& t : kTags) {
    if (t.architecture == architecture) return t.name;
  }
  return "unknown";
}

Architecture parse_architecture(std::string_view tag) {
  for (const auto& t : kTags) {
    if (tag == t.name) return t.architecture;
  }
  throw std::invalid_argument("unknown architecture '" + std::string(tag) + "'");
}

bool is_classifier(Architecture a) {
  return a == Architecture::kSparseBow || a == Architecture::kAveragedEmbeddings ||
         a == Architecture::kParagraphVector || a == Architecture::kLstmReader ||
         a == Architecture::kAttentiveReader || a == Architecture::kMemoryNetwork;
}

ModelConfig ModelConfig::paper(Architecture architecture) {
  ModelConfig c;
  c.architecture = architecture;
  c.embedding_dim = 300;
  c.joint_dim = 300;
  c.hidden_size = 1024;
  c.vocab_size = 100000;
  c.sparse_vocab_size = 50000;
  c.answer_count = 50000;
  c.doc_words = 300;
  c.property_words = 10;
  c.char_vocab_size = 76;
  c.char_embedding_dim = 30;
  c.doc_chars = 400;
  c.property_chars = 20;
  return c;
}

ModelConfig ModelConfig::desk(Architecture architecture) {
  ModelConfig c;
  c.architecture = architecture;
  return c;
}

void ModelConfig::validate() const {
  for (const auto& [name, field] : fields()) {
    if (const auto* p = std::get_if<std::size_t ModelConfig::*>(&field)) {
      // Step counts may be zero to disable a phase.
      if (this->**p == 0 && name != "lm_steps" && name != "pv_infer_steps") {
        throw std::invalid_argument("model config: " + std::string(name) + " must be positive");
      }
    }
  }
  if (char_vocab_size <= 5) throw std::invalid_argument("model config: char_vocab_size must exceed the reserved ids");
  if (!(label_threshold > 0.0 && label_threshold < 1.0)) {
    throw std::invalid_argument("model config: label_threshold must be in (0, 1)");
  }
  if (!(entropy_weight >= 0.0)) throw std::invalid_argument("model config: entropy_weight must be >= 0");
}

std::map<std::string, std::string> ModelConfig::to_map() const {
  std::map<std::string, std::string> out;
  out["architecture"] = to_string(architecture);
  for (const auto& [name, field] : fields()) {
    std::visit(
        [&](auto member) {
          using T = std::decay_t<decltype(this->*member)>;
          if constexpr (std::is_same_v<T, std::size_t>) out[std::string(name)] = std::to_string(this->*member);
          else if constexpr (std::is_same_v<T, double>) out[std::string(name)] = format_double(this->*member);
          else out[std::string(name)] = (this->*member) ? "true" : "false";
        },
        field);
  }
  return out;
}

bool ModelConfig::set(std::string_view key, std::string_view value) {
  if (key == "architecture") {
    architecture = parse_architecture(value);
    return true;
  }
  for (const auto& [name, field] : fields()) {
    if (name != key) continue;
    auto bad = [&] {
      return std::invalid_argument("model config: bad value '" + std::string(value) + "' for " + std::string(key));
    };
    std::visit(
        [&](auto member) {
          using T = std::decay_t<decltype(this->*member)>;
          if constexpr (std::is_same_v<T, std::size_t>) {
            std::size_t v = 0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || ptr != value.data() + value.size()) throw bad();
            this->*member = v;
          } else if constexpr (std::is_same_v<T, double>) {
            std::string text(value);
            std::size_t used = 0;
            double v = 0;
            try {
              v = std::stod(text, &used);
            } catch (const std::exception&) {
              throw bad();
            }
            if (used != text.size()) throw bad();
            this->*member = v;
          } else {
            if (value == "true" || value == "1") this->*member = true;
            else if (value == "false" || value == "0") this->*member = false;
            else throw bad();
          }
        },
        field);
    return true;
  }
  return false;
}

}  // namespace wikireading::models
