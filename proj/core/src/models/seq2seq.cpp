#include "wikireading/models/seq2seq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "recurrent.hpp"
#include "wikireading/nn/ops.hpp"
#include "wikireading/random.hpp"
#include "wikireading/train/optimizer.hpp"

namespace wikireading::models {

using data::Vocabulary;
using nn::Graph;
using nn::Tensor;
using nn::Var;

namespace {

constexpr int kBlocked[] = {Vocabulary::kPad, Vocabulary::kGo, Vocabulary::kSep};

Decoder make_decoder(nn::ParameterSet& params, nn::Parameter* embedding, std::size_t vocab, std::size_t hidden,
                     Rng& rng) {
  Decoder d;
  d.embedding = embedding;
  d.cell = nn::make_gru(params, "decoder", embedding->value.dim(1), hidden, rng);
  d.output = nn::make_affine(params, "decoder/output", hidden, vocab, rng);
  return d;
}

double geometric_mean(const std::vector<Decoder::Step>& steps) {
  if (steps.empty()) return 0.0;
  double log_sum = 0.0;
  for (const auto& s : steps) log_sum += std::log(std::max(s.probability, 1e-300));
  return std::exp(log_sum / static_cast<double>(steps.size()));
}

}  // namespace

Var Decoder::loss(Graph& graph, Var state, std::span<const int> target) const {
  if (target.empty()) throw std::invalid_argument("decoder: empty target");
  std::vector<int> inputs{Vocabulary::kGo};
  inputs.insert(inputs.end(), target.begin(), target.end() - 1);
  const auto xs = detail::embed_rows(graph, *embedding, inputs);
  Var total;
  for (std::size_t t = 0; t < target.size(); ++t) {
    state = cell.step(graph, xs[t], state);
    Var step_loss = nn::cross_entropy(output(graph, state), static_cast<std::size_t>(target[t]));
    total = t == 0 ? step_loss : nn::add(total, step_loss);
  }
  return nn::scale(total, 1.0 / static_cast<double>(target.size()));
}

std::vector<Decoder::Step> Decoder::greedy(Graph& graph, Var state, std::size_t max_steps,
                                           std::span<const int> blocked) const {
  std::vector<Step> out;
  int previous = Vocabulary::kGo;
  while (out.size() <= max_steps) {
    state = cell.step(graph, nn::embed(graph, *embedding, previous), state);
    auto logits = output(graph, state).value();
    for (int b : blocked) logits[static_cast<std::size_t>(b)] = -std::numeric_limits<double>::infinity();
    if (out.size() == max_steps) {
      // Length cap reached: the only remaining choice is to stop.
      out.push_back({Vocabulary::kEos, nn::softmax_values(logits.values())[Vocabulary::kEos]});
      break;
    }
    const auto p = nn::softmax_values(logits.values());
    const auto best = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    out.push_back({best, p[static_cast<std::size_t>(best)]});
    if (best == Vocabulary::kEos) break;
    previous = best;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Seq2Seq

Seq2Seq::Seq2Seq(ModelConfig config, ModelTables tables, Rng& rng) : Model(std::move(config), std::move(tables)) {
  const std::size_t v = tables_.vocab.size();
  embedding_ = &params_.add("embedding", nn::embedding_init(v, config_.embedding_dim, rng));
  encoder_ = nn::make_gru(params_, "encoder", config_.embedding_dim, config_.hidden_size, rng);
  decoder_ = make_decoder(params_, embedding_, v, config_.hidden_size, rng);
}

Example Seq2Seq::encode(const data::Instance& instance) const {
  Example e;
  e.gold = instance.answers;
  e.text = instance.document;
  e.property = encode_words(tables_.vocab, instance.property, config_.property_words);
  const auto doc_tokens = data::truncate(data::tokenize(instance.document), config_.doc_words);
  const auto answer_tokens = data::truncate(data::tokenize(instance.training_answer()), config_.answer_words);
  if (uses_placeholders()) {
    Rng rng(mix64(document_hash(instance.document)));
    auto encoded = data::apply_placeholders(doc_tokens, answer_tokens, tables_.vocab, rng);
    e.document = std::move(encoded.document);
    e.target = std::move(encoded.answer);
    e.placeholders = std::move(encoded.placeholders);
  } else {
    e.document = tables_.vocab.encode(doc_tokens);
    e.target = tables_.vocab.encode(answer_tokens);
  }
  e.target.push_back(Vocabulary::kEos);
  return e;
}

Var Seq2Seq::encode_state(Graph& graph, const Example& example) const {
  const auto seq = detail::reader_sequence(example.property, example.document, Vocabulary::kSep);
  return detail::run_gru(graph, encoder_, *embedding_, seq, encoder_.zero_state(graph));
}

Var Seq2Seq::loss(Graph& graph, const Example& example) const {
  return decoder_.loss(graph, encode_state(graph, example), example.target);
}

DecodedAnswer Seq2Seq::predict(const Example& example) const {
  Graph graph;
  const auto steps = decoder_.greedy(graph, encode_state(graph, example), config_.answer_words, kBlocked);
  DecodedAnswer out;
  std::vector<int> ids;
  for (const auto& s : steps) {
    out.step_confidence.push_back(s.probability);
    if (s.id != Vocabulary::kEos) ids.push_back(s.id);
  }
  out.confidence = geometric_mean(steps);
  if (uses_placeholders()) {
    out.tokens = data::resolve_placeholders(ids, tables_.vocab, example.placeholders, &out.unresolved_placeholders);
  } else {
    out.tokens = tables_.vocab.decode(ids);
  }
  out.answer = data::detokenize(out.tokens);
  return out;
}

// ---------------------------------------------------------------------------
// CharSeq2Seq

CharSeq2Seq::CharSeq2Seq(ModelConfig config, ModelTables tables, Rng& rng)
    : Model(std::move(config), std::move(tables)) {
  const std::size_t v = tables_.vocab.size(), e = config_.char_embedding_dim, h = config_.hidden_size;
  embedding_ = &params_.add("char_embedding", nn::embedding_init(v, e, rng));
  property_encoder_ = nn::make_gru(params_, "property_encoder", e, h, rng);
  document_layer1_ = nn::make_gru(params_, "document_layer1", e, h, rng);
  document_layer2_ = nn::make_gru(params_, "document_layer2", h, h, rng);
  decoder_ = make_decoder(params_, embedding_, v, h, rng);
}

Example CharSeq2Seq::encode(const data::Instance& instance) const {
  Example e;
  e.gold = instance.answers;
  e.text = instance.document;
  e.property = encode_chars(tables_.vocab, instance.property, config_.property_chars);
  e.document = encode_chars(tables_.vocab, instance.document, config_.doc_chars);
  e.target = encode_chars(tables_.vocab, instance.training_answer(), config_.answer_chars);
  e.target.push_back(Vocabulary::kEos);
  return e;
}

Var CharSeq2Seq::encode_state(Graph& graph, const Example& example) const {
  Var u = detail::run_gru(graph, property_encoder_, *embedding_, example.property, property_encoder_.zero_state(graph));
  std::vector<Var> first;
  detail::run_gru(graph, document_layer1_, *embedding_, example.document, document_layer1_.zero_state(graph), &first);
  return detail::run_gru(graph, document_layer2_, first, u);
}

Var CharSeq2Seq::loss(Graph& graph, const Example& example) const {
  return decoder_.loss(graph, encode_state(graph, example), example.target);
}

DecodedAnswer CharSeq2Seq::predict(const Example& example) const {
  Graph graph;
  const auto steps = decoder_.greedy(graph, encode_state(graph, example), config_.answer_chars, kBlocked);
  DecodedAnswer out;
  for (const auto& s : steps) {
    out.step_confidence.push_back(s.probability);
    if (s.id != Vocabulary::kEos) {
      out.tokens.push_back(tables_.vocab.token(s.id));
      out.answer += out.tokens.back();
    }
  }
  out.confidence = geometric_mean(steps);
  return out;
}

void CharSeq2Seq::pretrain(std::span<const data::Instance> training, std::uint64_t seed) {
  if (config_.lm_steps == 0) return;
  // The language model reads the same input text the encoder sees.
  std::vector<std::vector<int>> sequences;
  for (const auto& instance : training) {
    auto doc = encode_chars(tables_.vocab, instance.document, config_.doc_chars);
    if (!doc.empty()) sequences.push_back(std::move(doc));
  }
  if (sequences.empty()) return;
  Rng rng(mix64(seed ^ 0x1a4c0de));
  CharLanguageModel lm(tables_.vocab.size(), config_.char_embedding_dim, config_.hidden_size, rng);
  lm.fit(sequences, config_.lm_steps, config_.lm_batch_size, config_.lm_learning_rate, mix64(seed + 1));
  init_from_lm(*this, lm);
}

// ---------------------------------------------------------------------------
// CharLanguageModel

CharLanguageModel::CharLanguageModel(std::size_t vocab_size, std::size_t embedding_dim, std::size_t hidden_size,
                                     Rng& rng) {
  auto* embedding = &params_.add("char_embedding", nn::embedding_init(vocab_size, embedding_dim, rng));
  decoder_ = make_decoder(params_, embedding, vocab_size, hidden_size, rng);
}

Var CharLanguageModel::loss(Graph& graph, std::span<const int> sequence) const {
  std::vector<int> target(sequence.begin(), sequence.end());
  target.push_back(Vocabulary::kEos);
  return decoder_.loss(graph, decoder_.cell.zero_state(graph), target);
}

double CharLanguageModel::perplexity(std::span<const std::vector<int>> sequences) const {
  double nll = 0.0;
  std::size_t count = 0;
  for (const auto& s : sequences) {
    Graph graph;
    nll += loss(graph, s).value().item() * static_cast<double>(s.size() + 1);
    count += s.size() + 1;
  }
  return count ? std::exp(nll / static_cast<double>(count)) : 1.0;
}

std::vector<double> CharLanguageModel::fit(std::span<const std::vector<int>> sequences, std::size_t steps,
                                           std::size_t batch_size, double learning_rate, std::uint64_t seed) {
  std::vector<double> curve;
  if (sequences.empty() || batch_size == 0) return curve;
  Rng rng(seed);
  train::Adam adam({learning_rate});
  for (std::size_t step = 0; step < steps; ++step) {
    params_.zero_grad();
    double total = 0.0;
    for (std::size_t b = 0; b < batch_size; ++b) {
      const auto& s = sequences[rng.below(sequences.size())];
      Graph graph;
      Var l = loss(graph, s);
      total += l.value().item();
      graph.backward(l, 1.0 / static_cast<double>(batch_size));
    }
    train::clip_gradient(params_, 5.0);
    adam.step(params_);
    curve.push_back(total / static_cast<double>(batch_size));
  }
  return curve;
}

void init_from_lm(CharSeq2Seq& model, const CharLanguageModel& lm) {
  auto copy = [](const nn::Parameter& from, nn::Parameter& to) {
    if (from.value.shape() != to.value.shape()) {
      throw nn::ShapeError("init_from_lm: " + to.name + " is " + nn::to_string(to.value.shape()) + ", language model has " +
                           nn::to_string(from.value.shape()));
    }
    to.value = from.value;
  };
  copy(lm.embedding(), model.embedding());
  nn::copy_weights(lm.cell(), model.document_layer1());
  nn::copy_weights(lm.cell(), model.decoder().cell);
  copy(*lm.output().weight, *model.decoder().output.weight);
  copy(*lm.output().bias, *model.decoder().output.bias);
}

}  // namespace wikireading::models
