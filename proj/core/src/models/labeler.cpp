#include "wikireading/models/labeler.hpp"

#include <cmath>
#include <stdexcept>

#include "recurrent.hpp"
#include "wikireading/data/dates.hpp"
#include "wikireading/data/labeling.hpp"
#include "wikireading/nn/ops.hpp"

namespace wikireading::models {

using nn::Graph;
using nn::Var;

std::vector<Chunk> find_chunks(std::span<const double> probabilities, double threshold) {
  std::vector<Chunk> out;
  std::size_t i = 0;
  while (i < probabilities.size()) {
    if (!(probabilities[i] > threshold)) {
      ++i;
      continue;
    }
    Chunk c;
    c.begin = i;
    double inverse_sum = 0.0;
    while (i < probabilities.size() && probabilities[i] > threshold) inverse_sum += 1.0 / probabilities[i++];
    c.end = i;
    c.score = static_cast<double>(c.end - c.begin) / inverse_sum;
    out.push_back(c);
  }
  return out;
}

std::optional<Chunk> best_chunk(std::span<const double> probabilities, double threshold) {
  std::optional<Chunk> best;
  for (const auto& c : find_chunks(probabilities, threshold)) {
    if (!best || c.score > best->score) best = c;
  }
  return best;
}

namespace {

DecodedAnswer make_answer(std::string surface, std::span<const double> probabilities, const Chunk& chunk,
                          std::vector<std::string> tokens) {
  DecodedAnswer out;
  if (auto date = data::parse_date(surface)) surface = data::format_timestamp(*date);
  out.answer = std::move(surface);
  out.tokens = std::move(tokens);
  out.step_confidence.assign(probabilities.begin() + static_cast<std::ptrdiff_t>(chunk.begin),
                             probabilities.begin() + static_cast<std::ptrdiff_t>(chunk.end));
  out.confidence = chunk.score;
  return out;
}

}  // namespace

DecodedAnswer decode_chunks(std::span<const double> probabilities, std::span<const data::Token> tokens,
                            std::string_view text, double threshold) {
  if (probabilities.size() != tokens.size()) throw std::invalid_argument("decode_chunks: one probability per token");
  const auto chunk = best_chunk(probabilities, threshold);
  if (!chunk) return {};
  const std::size_t from = tokens[chunk->begin].begin, to = tokens[chunk->end - 1].end;
  std::vector<std::string> words;
  for (std::size_t i = chunk->begin; i < chunk->end; ++i) words.push_back(tokens[i].text);
  return make_answer(std::string(text.substr(from, to - from)), probabilities, *chunk, std::move(words));
}

DecodedAnswer decode_chunks(std::span<const double> probabilities, std::span<const std::string> tokens,
                            double threshold) {
  if (probabilities.size() != tokens.size()) throw std::invalid_argument("decode_chunks: one probability per token");
  const auto chunk = best_chunk(probabilities, threshold);
  if (!chunk) return {};
  std::vector<std::string> words(tokens.begin() + static_cast<std::ptrdiff_t>(chunk->begin),
                                 tokens.begin() + static_cast<std::ptrdiff_t>(chunk->end));
  return make_answer(data::detokenize(words), probabilities, *chunk, words);
}

RnnLabeler::RnnLabeler(ModelConfig config, ModelTables tables, Rng& rng) : Model(std::move(config), std::move(tables)) {
  embedding_ = &params_.add("embedding", nn::embedding_init(tables_.vocab.size(), config_.embedding_dim, rng));
  cell_ = nn::make_lstm(params_, "lstm", config_.embedding_dim, config_.hidden_size, rng);
  output_ = nn::make_affine(params_, "labeler/output", config_.hidden_size, 1, rng);
}

Example RnnLabeler::encode(const data::Instance& instance) const {
  Example e;
  e.gold = instance.answers;
  e.text = instance.document;
  e.property = encode_words(tables_.vocab, instance.property, config_.property_words);
  auto tokens = data::tokenize_with_offsets(instance.document);
  if (tokens.size() > config_.doc_words) tokens.resize(config_.doc_words);
  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (const auto& t : tokens) words.push_back(t.text);
  e.document = tables_.vocab.encode(words);
  auto labeled = data::label_positions(words, instance.answers);
  e.labels = std::move(labeled.labels);
  e.answer_present = labeled.answer_present;
  e.tokens = std::move(tokens);
  return e;
}

Var RnnLabeler::logits(Graph& graph, const Example& example) const {
  if (example.document.empty()) throw std::invalid_argument("rnn labeler: document is empty");
  const auto seq = detail::reader_sequence(example.property, example.document, data::Vocabulary::kSep);
  std::vector<Var> states;
  detail::run_lstm(graph, cell_, *embedding_, seq, cell_.zero_state(graph), &states);
  std::vector<Var> out;
  out.reserve(example.document.size());
  for (std::size_t t = example.property.size() + 1; t < states.size(); ++t) out.push_back(output_(graph, states[t]));
  return nn::concat(out);
}

Var RnnLabeler::loss(Graph& graph, const Example& example) const {
  return nn::sigmoid_cross_entropy(logits(graph, example), example.labels);
}

std::vector<double> RnnLabeler::probabilities(const Example& example) const {
  Graph graph;
  const auto z = logits(graph, example).value().values();
  std::vector<double> p(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) p[i] = 1.0 / (1.0 + std::exp(-z[i]));
  return p;
}

DecodedAnswer RnnLabeler::predict(const Example& example) const {
  if (example.document.empty()) return {};
  return decode_chunks(probabilities(example), example.tokens, example.text, config_.label_threshold);
}

}  // namespace wikireading::models
