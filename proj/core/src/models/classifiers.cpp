#include "wikireading/models/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "recurrent.hpp"
#include "wikireading/nn/ops.hpp"

namespace wikireading::models {

using nn::Graph;
using nn::Tensor;
using nn::Var;

nn::Var answer_logits(Graph& graph, Var joint, nn::Parameter& answer_vectors) {
  if (answer_vectors.value.dim(0) == 0) throw std::invalid_argument("answer table is empty");
  return nn::matmul(graph.param(answer_vectors), joint);
}

nn::Var classify_answer(Graph& graph, Var joint, nn::Parameter& answer_vectors) {
  return nn::softmax(answer_logits(graph, joint, answer_vectors));
}

// ---------------------------------------------------------------------------
// ClassifierModel

void ClassifierModel::add_answer_vectors(std::size_t joint_size, Rng& rng) {
  if (tables_.answers.size() == 0) throw std::invalid_argument("classifier needs a non-empty answer table");
  answers_ = &params_.add("answers", nn::glorot_uniform(tables_.answers.size(), joint_size, rng));
}

Example ClassifierModel::encode(const data::Instance& instance) const {
  Example e;
  e.gold = instance.answers;
  e.text = instance.document;
  e.property = encode_words(tables_.vocab, instance.property, config_.property_words);
  e.document = encode_words(tables_.vocab, instance.document, config_.doc_words);
  e.answer = tables_.answers.target(instance);
  return e;
}

ClassifierModel::Scores ClassifierModel::scores(Graph& graph, const Example& example) const {
  return {answer_logits(graph, joint(graph, example), *answers_), std::nullopt};
}

Var ClassifierModel::joint(Graph&, const Example&) const {
  throw std::logic_error("this classifier has no joint representation");
}

Var ClassifierModel::loss(Graph& graph, const Example& example) const {
  if (!example.answer) throw std::invalid_argument("example has no answer in the answer table");
  auto s = scores(graph, example);
  Var loss = nn::cross_entropy(s.logits, *example.answer);
  return s.penalty ? nn::add(loss, *s.penalty) : loss;
}

std::vector<double> ClassifierModel::distribution(const Example& example) const {
  Graph graph;
  const auto logits = scores(graph, example).logits;
  return nn::softmax_values(logits.value().values());
}

DecodedAnswer ClassifierModel::predict(const Example& example) const {
  DecodedAnswer out;
  if (!accepts(example)) return out;
  const auto p = distribution(example);
  const auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  out.answer = tables_.answers.value(best);
  out.tokens = {out.answer};
  out.step_confidence = {p[best]};
  out.confidence = p[best];
  return out;
}

// ---------------------------------------------------------------------------
// SparseBow

SparseBow::SparseBow(ModelConfig config, ModelTables tables, Rng&)
    : ClassifierModel(std::move(config), std::move(tables)) {
  if (tables_.answers.size() == 0) throw std::invalid_argument("classifier needs a non-empty answer table");
  const std::size_t v = tables_.vocab.size();
  weights_ = &params_.add("bow/weights", Tensor({2 * v, tables_.answers.size()}));
  bias_ = &params_.add("bow/bias", Tensor({tables_.answers.size()}));
}

ClassifierModel::Scores SparseBow::scores(Graph& graph, const Example& example) const {
  const int v = static_cast<int>(tables_.vocab.size());
  std::vector<int> features(example.property.begin(), example.property.end());
  for (int id : example.document) features.push_back(v + id);
  Var b = graph.param(*bias_);
  if (features.empty()) return {nn::add(b, graph.input(Tensor({tables_.answers.size()}))), std::nullopt};
  return {nn::add(nn::sum_rows(nn::embed(graph, *weights_, features)), b), std::nullopt};
}

// ---------------------------------------------------------------------------
// AveragedEmbeddings

namespace {

Var mean_embedding(Graph& graph, nn::Parameter& table, std::span<const int> ids) {
  if (ids.empty()) return graph.input(Tensor({table.value.dim(1)}));
  return nn::mean_rows(nn::embed(graph, table, ids));
}

}  // namespace

AveragedEmbeddings::AveragedEmbeddings(ModelConfig config, ModelTables tables, Rng& rng)
    : ClassifierModel(std::move(config), std::move(tables)) {
  embedding_ = &params_.add("embedding", nn::embedding_init(tables_.vocab.size(), config_.embedding_dim, rng));
  add_answer_vectors(2 * config_.embedding_dim, rng);
}

Var AveragedEmbeddings::joint(Graph& graph, const Example& example) const {
  return nn::concat({mean_embedding(graph, *embedding_, example.document),
                     mean_embedding(graph, *embedding_, example.property)});
}

// ---------------------------------------------------------------------------
// ParagraphVector

ParagraphVector::ParagraphVector(ModelConfig config, ModelTables tables, Rng& rng)
    : ClassifierModel(std::move(config), std::move(tables)) {
  const std::size_t d = config_.embedding_dim;
  documents_ = &params_.add("pv/documents", nn::embedding_init(tables_.documents.size(), d, rng), false);
  output_words_ = &params_.add("pv/output_words", Tensor({tables_.vocab.size(), d}), false);
  embedding_ = &params_.add("embedding", nn::embedding_init(tables_.vocab.size(), d, rng));
  add_answer_vectors(2 * d, rng);
  for (std::size_t i = 0; i < tables_.documents.size(); ++i) rows_.emplace(tables_.documents[i], i);
}

std::optional<std::size_t> ParagraphVector::document_row(std::string_view document) const {
  if (auto it = rows_.find(document_hash(document)); it != rows_.end()) return it->second;
  return std::nullopt;
}

Example ParagraphVector::encode(const data::Instance& instance) const {
  Example e = ClassifierModel::encode(instance);
  e.document_row = document_row(instance.document);
  if (!e.document_row) e.document_vector = infer_vector(instance.document);
  return e;
}

Var ParagraphVector::joint(Graph& graph, const Example& example) const {
  Var doc = example.document_row ? nn::embed(graph, *documents_, static_cast<int>(*example.document_row))
                                 : graph.input(example.document_vector);
  return nn::concat({doc, mean_embedding(graph, *embedding_, example.property)});
}

std::vector<int> ParagraphVector::sample_negatives(std::size_t count, std::span<const int> document, Rng& rng) const {
  const int first = tables_.vocab.first_word_id();
  const auto words = static_cast<std::uint64_t>(tables_.vocab.word_count());
  const std::set<int> own(document.begin(), document.end());
  std::vector<int> candidates;
  for (int id = first; id < first + static_cast<int>(words); ++id) {
    if (!own.count(id)) candidates.push_back(id);
  }
  // A document using every word falls back to the whole table.
  if (candidates.empty()) {
    for (int id = first; id < first + static_cast<int>(words); ++id) candidates.push_back(id);
  }
  std::vector<int> out(count);
  for (auto& id : out) id = candidates.empty() ? data::Vocabulary::kOov : candidates[rng.below(candidates.size())];
  return out;
}

namespace {

Var negative_sampling_loss(Var document_vector, Var positive_rows, std::optional<Var> negative_rows) {
  const std::vector<int> ones(positive_rows.value().dim(0), 1);
  Var positive = nn::sigmoid_cross_entropy(nn::matmul(positive_rows, document_vector), ones);
  if (!negative_rows) return positive;
  const std::size_t n = negative_rows->value().dim(0);
  const std::vector<int> zeros(n, 0);
  Var negative = nn::sigmoid_cross_entropy(nn::matmul(*negative_rows, document_vector), zeros);
  return nn::add(positive, nn::scale(negative, static_cast<double>(n) / static_cast<double>(ones.size())));
}

Tensor gather_rows(const Tensor& table, std::span<const int> ids) {
  const std::size_t d = table.dim(1);
  Tensor out({ids.size(), d});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= table.dim(0)) throw std::out_of_range("row id out of range");
    std::copy_n(table.data() + static_cast<std::size_t>(ids[i]) * d, d, out.data() + i * d);
  }
  return out;
}

}  // namespace

Var ParagraphVector::unsupervised_loss(Graph& graph, Var document_vector, std::span<const int> words,
                                       std::span<const int> negatives) const {
  if (words.empty()) throw std::invalid_argument("paragraph vector: no words to predict");
  std::optional<Var> negative_rows;
  if (!negatives.empty()) negative_rows = nn::embed(graph, *output_words_, negatives);
  return negative_sampling_loss(document_vector, nn::embed(graph, *output_words_, words), negative_rows);
}

namespace {

// Plain SGD on the rows a sparse lookup touched, then clears their gradient.
void sgd_rows(nn::Parameter& table, const std::set<int>& rows, double lr) {
  const std::size_t d = table.value.dim(1);
  for (int r : rows) {
    double* v = table.value.data() + static_cast<std::size_t>(r) * d;
    double* g = table.grad.data() + static_cast<std::size_t>(r) * d;
    for (std::size_t k = 0; k < d; ++k) {
      v[k] -= lr * g[k];
      g[k] = 0.0;
    }
  }
}

}  // namespace

void ParagraphVector::pretrain(std::span<const data::Instance> training, std::uint64_t seed) {
  Rng rng(mix64(seed ^ 0x9a7a9a7aULL));
  // One word list per known document, in row order.
  std::vector<std::vector<int>> docs(tables_.documents.size());
  for (const auto& instance : training) {
    if (auto row = document_row(instance.document); row && docs[*row].empty()) {
      docs[*row] = encode_words(tables_.vocab, instance.document, config_.doc_words);
    }
  }
  std::vector<std::size_t> order(docs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const double lr = config_.pv_learning_rate;
  for (std::size_t epoch = 0; epoch < config_.pv_epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t row : order) {
      const auto& words = docs[row];
      if (words.empty()) continue;
      const auto negatives = sample_negatives(words.size() * config_.pv_negatives, words, rng);
      Graph graph;
      Var d = nn::embed(graph, *documents_, static_cast<int>(row));
      graph.backward(unsupervised_loss(graph, d, words, negatives));
      std::set<int> touched(words.begin(), words.end());
      touched.insert(negatives.begin(), negatives.end());
      sgd_rows(*output_words_, touched, lr);
      sgd_rows(*documents_, {static_cast<int>(row)}, lr);
    }
  }
}

nn::Tensor ParagraphVector::infer_vector(std::string_view document) const {
  const std::size_t d = config_.embedding_dim;
  Rng rng(mix64(document_hash(document)));
  Tensor vec({d});
  for (auto& v : vec.values()) v = rng.normal(0.0, 0.1);
  const auto words = encode_words(tables_.vocab, document, config_.doc_words);
  if (words.empty()) return vec;
  for (std::size_t step = 0; step < config_.pv_infer_steps; ++step) {
    const auto negatives = sample_negatives(words.size() * config_.pv_negatives, words, rng);
    Graph graph;
    Var x = graph.input(vec);
    std::optional<Var> negative_rows;
    if (!negatives.empty()) negative_rows = graph.input(gather_rows(output_words_->value, negatives));
    graph.backward(negative_sampling_loss(x, graph.input(gather_rows(output_words_->value, words)), negative_rows));
    const auto& g = graph.grad(x.id);
    for (std::size_t k = 0; k < d; ++k) vec[k] -= config_.pv_learning_rate * g[k];
  }
  return vec;
}

// ---------------------------------------------------------------------------
// LstmReader

LstmReader::LstmReader(ModelConfig config, ModelTables tables, Rng& rng)
    : ClassifierModel(std::move(config), std::move(tables)) {
  embedding_ = &params_.add("embedding", nn::embedding_init(tables_.vocab.size(), config_.embedding_dim, rng));
  cell_ = nn::make_lstm(params_, "lstm", config_.embedding_dim, config_.hidden_size, rng);
  add_answer_vectors(config_.hidden_size, rng);
}

Var LstmReader::joint(Graph& graph, const Example& example) const {
  const auto seq = detail::reader_sequence(example.property, example.document, data::Vocabulary::kSep);
  return detail::run_lstm(graph, cell_, *embedding_, seq, cell_.zero_state(graph)).h;
}

// ---------------------------------------------------------------------------
// AttentiveReader

AttentiveReader::AttentiveReader(ModelConfig config, ModelTables tables, Rng& rng)
    : ClassifierModel(std::move(config), std::move(tables)) {
  const std::size_t e = config_.embedding_dim, h = config_.hidden_size, j = config_.joint_dim;
  embedding_ = &params_.add("embedding", nn::embedding_init(tables_.vocab.size(), e, rng));
  property_cell_ = nn::make_lstm(params_, "property_lstm", e, h, rng);
  document_cell_ = nn::make_lstm(params_, "document_lstm", e, h, rng);
  if (config_.bidirectional) backward_cell_ = nn::make_lstm(params_, "document_lstm_backward", e, h, rng);
  const std::size_t z = config_.bidirectional ? 2 * h : h;
  w1_ = &params_.add("attention/w1", nn::glorot_uniform(j, z + h, rng));
  const Tensor v_init = nn::glorot_uniform(1, j, rng);
  v_ = &params_.add("attention/v", Tensor({j}, {v_init.values().begin(), v_init.values().end()}));
  w2_ = &params_.add("attention/w2", nn::glorot_uniform(j, z + h, rng));
  add_answer_vectors(j, rng);
}

Var AttentiveReader::forward(Graph& graph, const Example& example, Var* weights) const {
  if (example.document.empty()) throw std::invalid_argument("attentive reader: document is empty");
  Var u = detail::run_lstm(graph, property_cell_, *embedding_, example.property, property_cell_.zero_state(graph)).h;
  std::vector<Var> z;
  detail::run_lstm(graph, document_cell_, *embedding_, example.document, document_cell_.zero_state(graph), &z);
  if (backward_cell_) {
    std::vector<int> reversed(example.document.rbegin(), example.document.rend());
    std::vector<Var> back;
    detail::run_lstm(graph, *backward_cell_, *embedding_, reversed, backward_cell_->zero_state(graph), &back);
    for (std::size_t t = 0; t < z.size(); ++t) z[t] = nn::concat({z[t], back[z.size() - 1 - t]});
  }
  Var w1 = graph.param(*w1_), v = graph.param(*v_);
  std::vector<Var> logits;
  logits.reserve(z.size());
  for (const auto& zt : z) logits.push_back(nn::dot(v, nn::tanh(nn::matmul(w1, nn::concat({zt, u})))));
  Var alpha = nn::softmax(nn::concat(logits));
  if (weights) *weights = alpha;
  Var r = nn::weighted_sum(alpha, z);
  return nn::tanh(nn::matmul(graph.param(*w2_), nn::concat({r, u})));
}

Var AttentiveReader::joint(Graph& graph, const Example& example) const { return forward(graph, example, nullptr); }

std::vector<double> AttentiveReader::attention(const Example& example) const {
  Graph graph;
  Var alpha;
  forward(graph, example, &alpha);
  const auto v = alpha.value().values();
  return {v.begin(), v.end()};
}

// ---------------------------------------------------------------------------
// MemoryNetwork

double position_weight(std::size_t j, std::size_t length, std::size_t k, std::size_t dim) {
  const double jj = static_cast<double>(j) / static_cast<double>(length);
  const double kk = static_cast<double>(k) / static_cast<double>(dim);
  return (1.0 - jj) - kk * (1.0 - 2.0 * jj);
}

nn::Tensor position_encoding(std::size_t length, std::size_t dim) {
  Tensor t({length, dim});
  for (std::size_t j = 0; j < length; ++j) {
    for (std::size_t k = 0; k < dim; ++k) t.at(j, k) = position_weight(j + 1, length, k + 1, dim);
  }
  return t;
}

namespace {

Var encode_sentence(Graph& graph, nn::Parameter& table, std::span<const int> ids) {
  if (ids.empty()) return graph.input(Tensor({table.value.dim(1)}));
  Var words = nn::embed(graph, table, ids);
  return nn::sum_rows(nn::mul(words, graph.input(position_encoding(ids.size(), table.value.dim(1)))));
}

}  // namespace

MemoryNetwork::MemoryNetwork(ModelConfig config, ModelTables tables, Rng& rng)
    : ClassifierModel(std::move(config), std::move(tables)) {
  const std::size_t v = tables_.vocab.size(), d = config_.embedding_dim;
  u_ = &params_.add("memory/property_embedding", nn::embedding_init(v, d, rng));
  m_ = &params_.add("memory/memory_embedding", nn::embedding_init(v, d, rng));
  c_ = &params_.add("memory/output_embedding", nn::embedding_init(v, d, rng));
  add_answer_vectors(d, rng);
}

Example MemoryNetwork::encode(const data::Instance& instance) const {
  Example e = ClassifierModel::encode(instance);
  e.sentences = split_sentences(e.document, tables_.vocab, config_.memory_sentences);
  return e;
}

Var MemoryNetwork::forward(Graph& graph, const Example& example, std::vector<Var>* attention,
                           std::vector<Var>* log_attention) const {
  if (example.sentences.empty()) throw std::invalid_argument("memory network: document has no sentences");
  Var u = encode_sentence(graph, *u_, example.property);
  std::vector<Var> memories, outputs;
  for (const auto& s : example.sentences) {
    memories.push_back(encode_sentence(graph, *m_, s));
    outputs.push_back(encode_sentence(graph, *c_, s));
  }
  for (std::size_t hop = 0; hop < config_.memory_hops; ++hop) {
    std::vector<Var> logits;
    for (const auto& m : memories) logits.push_back(nn::dot(u, m));
    Var joined = nn::concat(logits);
    Var p = nn::softmax(joined);
    if (attention) attention->push_back(p);
    if (log_attention) log_attention->push_back(nn::log_softmax(joined));
    u = nn::add(u, nn::weighted_sum(p, outputs));
  }
  return u;
}

Var MemoryNetwork::joint(Graph& graph, const Example& example) const {
  return forward(graph, example, nullptr, nullptr);
}

ClassifierModel::Scores MemoryNetwork::scores(Graph& graph, const Example& example) const {
  std::vector<Var> p, log_p;
  Var y = forward(graph, example, &p, &log_p);
  Scores s{answer_logits(graph, y, *answers_), std::nullopt};
  if (config_.entropy_weight > 0.0) {
    Var penalty = nn::sum(nn::mul(p[0], log_p[0]));
    for (std::size_t hop = 1; hop < p.size(); ++hop) penalty = nn::add(penalty, nn::sum(nn::mul(p[hop], log_p[hop])));
    s.penalty = nn::scale(penalty, config_.entropy_weight);
  }
  return s;
}

std::vector<std::vector<double>> MemoryNetwork::attention(const Example& example) const {
  Graph graph;
  std::vector<Var> p;
  forward(graph, example, &p, nullptr);
  std::vector<std::vector<double>> out;
  for (const auto& hop : p) out.emplace_back(hop.value().values().begin(), hop.value().values().end());
  return out;
}

}  // namespace wikireading::models
