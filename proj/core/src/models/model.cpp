#include "wikireading/models/model.hpp"

#include <cinttypes>
#include <cstdio>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "wikireading/models/classifiers.hpp"
#include "wikireading/models/labeler.hpp"
#include "wikireading/models/seq2seq.hpp"
#include "wikireading/nn/checkpoint.hpp"
#include "wikireading/random.hpp"

namespace wikireading::models {

Model::Model(ModelConfig config, ModelTables tables) : config_(std::move(config)), tables_(std::move(tables)) {
  config_.validate();
}

eval::BoundContext Model::bound_context() const {
  eval::BoundContext context;
  switch (method_class()) {
    case eval::MethodClass::kClassifier:
      context.answers = &tables_.answers;
      break;
    case eval::MethodClass::kExtraction:
      break;
    case eval::MethodClass::kWordSeq2Seq:
    case eval::MethodClass::kPlaceholderSeq2Seq:
      context.vocab = &tables_.vocab;
      context.max_output = config_.answer_words;
      break;
    case eval::MethodClass::kCharSeq2Seq:
      context.vocab = &tables_.vocab;
      context.max_output = config_.answer_chars;
      break;
  }
  return context;
}

void Model::pretrain(std::span<const data::Instance>, std::uint64_t) {}

std::uint64_t document_hash(std::string_view document) { return fnv1a(document); }

ModelTables build_tables(const ModelConfig& config, std::span<const data::Instance> training) {
  config.validate();
  ModelTables tables;
  switch (config.architecture) {
    case Architecture::kCharSeq2Seq:
      tables.vocab = data::build_char_vocab(training, config.char_vocab_size);
      break;
    case Architecture::kSparseBow:
      tables.vocab = data::build_vocab(training, config.sparse_vocab_size);
      break;
    case Architecture::kPlaceholderSeq2Seq:
      tables.vocab = data::build_vocab(training, config.vocab_size, config.placeholder_count);
      break;
    default:
      tables.vocab = data::build_vocab(training, config.vocab_size);
      break;
  }
  if (is_classifier(config.architecture)) tables.answers = data::AnswerTable::build(training, config.answer_count);
  if (config.architecture == Architecture::kParagraphVector) {
    std::set<std::uint64_t> seen;
    for (const auto& instance : training) {
      const auto h = document_hash(instance.document);
      if (seen.insert(h).second) tables.documents.push_back(h);
    }
  }
  return tables;
}

std::unique_ptr<Model> create_model(const ModelConfig& config, ModelTables tables, std::uint64_t seed) {
  Rng rng(mix64(seed));
  switch (config.architecture) {
    case Architecture::kSparseBow: return std::make_unique<SparseBow>(config, std::move(tables), rng);
    case Architecture::kAveragedEmbeddings: return std::make_unique<AveragedEmbeddings>(config, std::move(tables), rng);
    case Architecture::kParagraphVector: return std::make_unique<ParagraphVector>(config, std::move(tables), rng);
    case Architecture::kLstmReader: return std::make_unique<LstmReader>(config, std::move(tables), rng);
    case Architecture::kAttentiveReader: return std::make_unique<AttentiveReader>(config, std::move(tables), rng);
    case Architecture::kMemoryNetwork: return std::make_unique<MemoryNetwork>(config, std::move(tables), rng);
    case Architecture::kRnnLabeler: return std::make_unique<RnnLabeler>(config, std::move(tables), rng);
    case Architecture::kSeq2Seq:
    case Architecture::kPlaceholderSeq2Seq: return std::make_unique<Seq2Seq>(config, std::move(tables), rng);
    case Architecture::kCharSeq2Seq: return std::make_unique<CharSeq2Seq>(config, std::move(tables), rng);
  }
  throw std::invalid_argument("unknown architecture");
}

std::unique_ptr<Model> create_model(const ModelConfig& config, std::span<const data::Instance> training,
                                    std::uint64_t seed) {
  return create_model(config, build_tables(config, training), seed);
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

}  // namespace

void save_model(const Model& model, const std::filesystem::path& path) {
  const auto& t = model.tables();
  nlohmann::json documents = nlohmann::json::array();
  for (auto h : t.documents) documents.push_back(hex64(h));
  nlohmann::json manifest = {{"format", "wikireading-model"},
                             {"version", 1},
                             {"config", model.config().to_map()},
                             {"vocab", t.vocab.words()},
                             {"placeholders", t.vocab.placeholder_count()},
                             {"answers", t.answers.values()},
                             {"documents", documents}};
  nn::write_checkpoint(path, model.parameters(), manifest.dump());
}

std::unique_ptr<Model> load_model(const std::filesystem::path& path) {
  const auto checkpoint = nn::read_checkpoint(path);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(checkpoint.manifest);
  } catch (const nlohmann::json::exception& e) {
    throw data::DataError(path.string() + ": bad manifest: " + e.what());
  }
  if (manifest.value("format", "") != "wikireading-model") throw data::DataError(path.string() + ": not a model checkpoint");
  ModelConfig config;
  for (const auto& [key, value] : manifest.at("config").items()) {
    if (!config.set(key, value.get<std::string>())) throw data::DataError(path.string() + ": unknown config key " + key);
  }
  ModelTables tables;
  tables.vocab = data::Vocabulary::from_words(manifest.at("vocab").get<std::vector<std::string>>(),
                                              manifest.at("placeholders").get<std::size_t>());
  tables.answers = data::AnswerTable::from_values(manifest.at("answers").get<std::vector<std::string>>());
  for (const auto& h : manifest.at("documents")) tables.documents.push_back(std::stoull(h.get<std::string>(), nullptr, 16));
  auto model = create_model(config, std::move(tables), 0);
  nn::load_parameters(model->parameters(), checkpoint);
  return model;
}

std::vector<int> encode_words(const data::Vocabulary& vocab, std::string_view text, std::size_t limit) {
  return vocab.encode(data::truncate(data::tokenize(text), limit));
}

std::vector<int> encode_chars(const data::Vocabulary& vocab, std::string_view text, std::size_t limit) {
  return vocab.encode(data::truncate(data::split_characters(text), limit));
}

std::vector<std::vector<int>> split_sentences(std::span<const int> document, const data::Vocabulary& vocab,
                                              std::size_t max_sentences) {
  const int stops[] = {vocab.id("."), vocab.id("!"), vocab.id("?")};
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  for (int id : document) {
    current.push_back(id);
    const bool stop = id != data::Vocabulary::kOov && (id == stops[0] || id == stops[1] || id == stops[2]);
    if (stop) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  if (out.size() > max_sentences) out.resize(max_sentences);
  return out;
}

}  // namespace wikireading::models
