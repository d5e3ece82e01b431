#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "oracles.hpp"
#include "toy.hpp"
#include "wikireading/data/synthetic.hpp"
#include "wikireading/data/tokenizer.hpp"
#include "wikireading/eval/bounds.hpp"
#include "wikireading/eval/metrics.hpp"
#include "wikireading/models/classifiers.hpp"
#include "wikireading/models/labeler.hpp"
#include "wikireading/models/seq2seq.hpp"
#include "wikireading/nn/ops.hpp"
#include "wikireading/random.hpp"
#include "wikireading/train/optimizer.hpp"

using namespace wikireading;
using models::Architecture;
using nn::Graph;
using nn::Tensor;
using nn::Var;
using data::Vocabulary;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> values_of(Var v) {
  const auto s = v.value().values();
  return {s.begin(), s.end()};
}

std::vector<double> softmax(const std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) total += (p[i] = std::exp(z[i] - m));
  for (auto& x : p) x /= total;
  return p;
}

/// Plain Adam on one example until `steps` updates are done.
void overfit(models::Model& model, const models::Example& example, int steps, double lr) {
  train::Adam adam({lr});
  for (int i = 0; i < steps; ++i) {
    model.parameters().zero_grad();
    Graph g;
    g.backward(model.loss(g, example));
    adam.step(model.parameters());
  }
}

/// Deterministic, varied values for hand-set parameters.
void set_pattern(nn::Parameter& p, double scale) {
  for (std::size_t i = 0; i < p.value.size(); ++i) {
    p.value[i] = scale * std::sin(1.7 * static_cast<double>(i) + 0.3);
  }
}

std::unique_ptr<models::Model> toy_model(Architecture a, std::uint64_t seed = 11) {
  return models::create_model(toy::config(a), toy::corpus(), seed);
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

TEST(Config, FullScalePreset) {
  const auto c = models::ModelConfig::paper(Architecture::kAttentiveReader);
  EXPECT_EQ(c.embedding_dim, 300u);
  EXPECT_EQ(c.joint_dim, 300u);
  EXPECT_EQ(c.vocab_size, 100000u);
  EXPECT_EQ(c.answer_count, 50000u);
  EXPECT_EQ(c.hidden_size, 1024u);
  EXPECT_EQ(c.doc_words, 300u);
  EXPECT_EQ(c.property_words, 10u);
  const auto chars = models::ModelConfig::paper(Architecture::kCharSeq2Seq);
  EXPECT_EQ(chars.char_vocab_size, 76u);
  EXPECT_EQ(chars.char_embedding_dim, 30u);
  EXPECT_EQ(chars.doc_chars, 400u);
  EXPECT_EQ(chars.property_chars, 20u);
  EXPECT_NO_THROW(c.validate());
  EXPECT_NO_THROW(models::ModelConfig::desk(Architecture::kSeq2Seq).validate());
}

TEST(Config, RejectsNonPositiveSizes) {
  auto c = models::ModelConfig::desk(Architecture::kLstmReader);
  c.hidden_size = 0;
  try {
    c.validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("hidden_size"), std::string::npos);
  }
  c = models::ModelConfig::desk(Architecture::kLstmReader);
  c.label_threshold = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Config, MapRoundTrip) {
  auto c = models::ModelConfig::desk(Architecture::kMemoryNetwork);
  c.entropy_weight = 0.125;
  c.memory_hops = 3;
  c.bidirectional = true;
  models::ModelConfig d;
  for (const auto& [k, v] : c.to_map()) EXPECT_TRUE(d.set(k, v)) << k;
  EXPECT_EQ(d.to_map(), c.to_map());
  EXPECT_FALSE(d.set("no_such_key", "1"));
  EXPECT_THROW(d.set("hidden_size", "many"), std::invalid_argument);
}

TEST(Config, ArchitectureTags) {
  for (auto a : models::kAllArchitectures) EXPECT_EQ(models::parse_architecture(models::to_string(a)), a);
  EXPECT_THROW(models::parse_architecture("transformer"), std::invalid_argument);
  EXPECT_TRUE(models::is_classifier(Architecture::kMemoryNetwork));
  EXPECT_FALSE(models::is_classifier(Architecture::kRnnLabeler));
}

// ---------------------------------------------------------------------------
// Every architecture

class EveryArchitecture : public ::testing::TestWithParam<Architecture> {};

TEST_P(EveryArchitecture, GradientsMatchFiniteDifferences) {
  auto model = toy_model(GetParam());
  const auto corpus = toy::corpus();
  std::size_t checked = 0;
  for (const auto& instance : corpus) {
    const auto example = model->encode(instance);
    if (!model->has_target(example)) continue;
    ASSERT_LE(data::tokenize(instance.document).size(), 5u);
    const auto report = oracle::check_gradients(model->parameters(), toy::example_loss(*model, example));
    EXPECT_TRUE(report.mismatches.empty()) << models::to_string(GetParam()) << ": " << report.describe();
    checked += report.checked;
    break;
  }
  EXPECT_GT(checked, 0u);
}

TEST_P(EveryArchitecture, SaveLoadReproducesPredictions) {
  auto model = toy_model(GetParam());
  model->pretrain(toy::corpus(), 3);
  const auto path = std::filesystem::temp_directory_path() / ("wr_model_" + std::string(models::to_string(GetParam())));
  models::save_model(*model, path);
  auto loaded = models::load_model(path);
  EXPECT_EQ(loaded->config().to_map(), model->config().to_map());
  EXPECT_EQ(loaded->tables().vocab.words(), model->tables().vocab.words());
  for (const auto& instance : toy::corpus()) {
    const auto a = model->predict(model->encode(instance));
    const auto b = loaded->predict(loaded->encode(instance));
    EXPECT_EQ(a.answer, b.answer);
    EXPECT_NEAR(a.confidence, b.confidence, 1e-4);
  }
  std::filesystem::remove(path);
}

TEST_P(EveryArchitecture, CreationIsDeterministic) {
  auto a = toy_model(GetParam(), 5), b = toy_model(GetParam(), 5), c = toy_model(GetParam(), 6);
  bool differs = false;
  auto pa = a->parameters().begin(), pb = b->parameters().begin(), pc = c->parameters().begin();
  for (; pa != a->parameters().end(); ++pa, ++pb, ++pc) {
    EXPECT_EQ((*pa)->value, (*pb)->value);
    differs = differs || (*pa)->value != (*pc)->value;
  }
  // The sparse model starts from zeros regardless of seed.
  if (GetParam() != Architecture::kSparseBow) EXPECT_TRUE(differs);
}

TEST_P(EveryArchitecture, PredictionsStayUnderMethodBound) {
  auto model = toy_model(GetParam());
  const auto corpus = toy::corpus();
  std::vector<std::vector<std::string>> predictions;
  for (const auto& instance : corpus) {
    const auto answer = model->predict(model->encode(instance)).answer;
    predictions.push_back(answer.empty() ? std::vector<std::string>{} : std::vector<std::string>{answer});
  }
  const double bound = eval::method_bound(model->method_class(), corpus, model->bound_context());
  EXPECT_LE(eval::mean_f1(predictions, corpus), bound + 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Models, EveryArchitecture, ::testing::ValuesIn(models::kAllArchitectures),
                         [](const auto& info) { return std::string(models::to_string(info.param)); });

// ---------------------------------------------------------------------------
// Answer classification

TEST(ClassifyAnswer, ZeroJointIsUniform) {
  nn::ParameterSet params;
  Rng rng(1);
  auto& a = params.add("a", nn::glorot_uniform(5, 3, rng));
  Graph g;
  for (double p : values_of(models::classify_answer(g, g.input(Tensor({3})), a))) EXPECT_NEAR(p, 0.2, 1e-15);
}

TEST(ClassifyAnswer, LargeMarginWins) {
  nn::ParameterSet params;
  auto& a = params.add("a", Tensor::matrix({{100, 0}, {0, 1}, {0, -1}}));
  Graph g;
  EXPECT_NEAR(values_of(models::classify_answer(g, g.input(Tensor::vector({1, 0})), a))[0], 1.0, 1e-12);
}

TEST(ClassifyAnswer, ClosedForm) {
  nn::ParameterSet params;
  auto& a = params.add("a", Tensor::matrix({{0}, {std::log(2.0)}, {std::log(4.0)}}));
  Graph g;
  const auto p = values_of(models::classify_answer(g, g.input(Tensor::vector({1})), a));
  EXPECT_NEAR(p[0], 1.0 / 7, 1e-12);
  EXPECT_NEAR(p[1], 2.0 / 7, 1e-12);
  EXPECT_NEAR(p[2], 4.0 / 7, 1e-12);
}

TEST(ClassifyAnswer, EmptyAnswerTableRejected) {
  const auto corpus = toy::corpus();
  for (auto a : models::kAllArchitectures) {
    if (!models::is_classifier(a)) continue;
    auto tables = models::build_tables(toy::config(a), corpus);
    tables.answers = data::AnswerTable();
    EXPECT_THROW(models::create_model(toy::config(a), std::move(tables), 1), std::invalid_argument)
        << models::to_string(a);
  }
}

TEST(Classifiers, DistributionsSumToOne) {
  for (auto a : models::kAllArchitectures) {
    if (!models::is_classifier(a)) continue;
    auto model = toy_model(a);
    auto& classifier = dynamic_cast<models::ClassifierModel&>(*model);
    for (const auto& instance : toy::corpus()) {
      const auto p = classifier.distribution(classifier.encode(instance));
      EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-6);
    }
  }
}

// ---------------------------------------------------------------------------
// Sparse bag of words

TEST(SparseBow, ZeroWeightsGiveUniform) {
  auto model = toy_model(Architecture::kSparseBow);
  auto& bow = dynamic_cast<models::SparseBow&>(*model);
  const auto p = bow.distribution(bow.encode(toy::corpus()[0]));
  for (double x : p) EXPECT_DOUBLE_EQ(x, 1.0 / static_cast<double>(p.size()));
}

TEST(SparseBow, DocumentOrderDoesNotMatter) {
  auto model = toy_model(Architecture::kSparseBow);
  auto& bow = dynamic_cast<models::SparseBow&>(*model);
  set_pattern(bow.weights(), 0.5);
  set_pattern(bow.bias(), 0.1);
  auto e = bow.encode(toy::corpus()[0]);
  const auto before = bow.distribution(e);
  std::reverse(e.document.begin(), e.document.end());
  EXPECT_EQ(bow.distribution(e), before);
}

TEST(SparseBow, HandSetWeights) {
  auto config = toy::config(Architecture::kSparseBow);
  config.sparse_vocab_size = 2;
  const std::vector<data::Instance> corpus{data::make_instance("a a b", "p", {"x"}),
                                           data::make_instance("b a", "p", {"y"})};
  auto model = models::create_model(config, corpus, 1);
  auto& bow = dynamic_cast<models::SparseBow&>(*model);
  const auto& vocab = bow.tables().vocab;
  ASSERT_EQ(vocab.words(), (std::vector<std::string>{"a", "b"}));
  const int v = static_cast<int>(vocab.size()), a = vocab.id("a"), b = vocab.id("b"), oov = Vocabulary::kOov;
  // Answers x and y; property "p" is out of vocabulary.
  auto& w = bow.weights();
  w.value.at(static_cast<std::size_t>(oov), 0) = 0.5;
  w.value.at(static_cast<std::size_t>(v + a), 0) = 1.0;
  w.value.at(static_cast<std::size_t>(v + b), 1) = 2.0;
  bow.bias().value[1] = -0.25;
  const auto p = bow.distribution(bow.encode(data::make_instance("a a b", "p", {"x"})));
  // x: 0.5 + 2 * 1.0, y: 2.0 - 0.25
  const double zx = 2.5, zy = 1.75;
  EXPECT_NEAR(p[0], std::exp(zx) / (std::exp(zx) + std::exp(zy)), 1e-12);
}

// ---------------------------------------------------------------------------
// Averaged embeddings

TEST(AveragedEmbeddings, Means) {
  auto model = toy_model(Architecture::kAveragedEmbeddings);
  auto& avg = dynamic_cast<models::AveragedEmbeddings&>(*model);
  const auto& vocab = avg.tables().vocab;
  const int ann = vocab.id("Ann"), bo = vocab.id("Bo");
  auto& emb = avg.embedding();
  for (std::size_t k = 0; k < emb.value.dim(1); ++k) {
    emb.value.at(static_cast<std::size_t>(ann), k) = k == 0 ? 1.0 : 0.0;
    emb.value.at(static_cast<std::size_t>(bo), k) = k == 1 ? 1.0 : 0.0;
  }
  models::Example e;
  e.property = {vocab.id("author")};
  e.document = {ann};
  {
    Graph g;
    const auto y = values_of(avg.joint(g, e));
    EXPECT_EQ(y[0], 1.0);
    EXPECT_EQ(y[1], 0.0);
  }
  e.document = {ann, bo};
  Graph g1, g2;
  const auto y = values_of(avg.joint(g1, e));
  EXPECT_DOUBLE_EQ(y[0], 0.5);
  EXPECT_DOUBLE_EQ(y[1], 0.5);
  EXPECT_EQ(y.size(), 2 * avg.config().embedding_dim);
  e.document = {bo, ann};
  EXPECT_EQ(values_of(avg.joint(g2, e)), y);
}

// ---------------------------------------------------------------------------
// Paragraph vector

TEST(ParagraphVector, UnsupervisedLossGradient) {
  auto model = toy_model(Architecture::kParagraphVector);
  auto& pv = dynamic_cast<models::ParagraphVector&>(*model);
  set_pattern(pv.output_words(), 0.3);
  const std::vector<int> words{pv.tables().vocab.id("Ann"), pv.tables().vocab.id("wrote")};
  const std::vector<int> negatives{pv.tables().vocab.id("jazz"), pv.tables().vocab.id("rock"),
                                   pv.tables().vocab.id("Bo")};
  nn::ParameterSet vec;
  auto& d = vec.add("d", Tensor::vector({0.2, -0.4, 0.1, 0.3, -0.2, 0.5, 0.0, 0.1}));
  const auto report = oracle::check_gradients(vec, [&](Graph& g, bool backward) {
    auto loss = pv.unsupervised_loss(g, g.param(d), words, negatives);
    if (backward) g.backward(loss);
    return loss.value().item();
  });
  EXPECT_TRUE(report.mismatches.empty()) << report.describe();
}

TEST(ParagraphVector, DocumentVectorsFrozenDuringSupervisedTraining) {
  auto model = toy_model(Architecture::kParagraphVector);
  auto& pv = dynamic_cast<models::ParagraphVector&>(*model);
  pv.pretrain(toy::corpus(), 1);
  const auto documents = pv.documents().value;
  const auto output = pv.output_words().value;
  const auto embedding = pv.embedding().value;
  overfit(pv, pv.encode(toy::corpus()[0]), 5, 0.01);
  EXPECT_EQ(pv.documents().value, documents);
  EXPECT_EQ(pv.output_words().value, output);
  EXPECT_NE(pv.embedding().value, embedding);
}

TEST(ParagraphVector, DisjointDocumentsDriftApart) {
  auto config = toy::config(Architecture::kParagraphVector);
  config.pv_epochs = 200;
  const std::vector<data::Instance> corpus{data::make_instance("ab cd ef gh ij", "p", {"x"}),
                                           data::make_instance("kl mn op qr st", "p", {"y"})};
  auto model = models::create_model(config, corpus, 4);
  auto& pv = dynamic_cast<models::ParagraphVector&>(*model);
  auto cosine = [&] {
    const auto& d = pv.documents().value;
    const std::size_t n = d.dim(1);
    double dot = 0, a = 0, b = 0;
    for (std::size_t k = 0; k < n; ++k) {
      dot += d.at(0, k) * d.at(1, k);
      a += d.at(0, k) * d.at(0, k);
      b += d.at(1, k) * d.at(1, k);
    }
    return dot / std::sqrt(a * b);
  };
  // Start the two documents close together.
  auto& d = pv.documents().value;
  for (std::size_t k = 0; k < d.dim(1); ++k) d.at(1, k) = d.at(0, k) + 0.3 * d.at(1, k);
  const double before = cosine();
  ASSERT_GT(before, 0.5);
  pv.pretrain(corpus, 2);
  EXPECT_LT(cosine(), before - 0.5);
}

TEST(ParagraphVector, InferenceIsDeterministic) {
  auto model = toy_model(Architecture::kParagraphVector);
  auto& pv = dynamic_cast<models::ParagraphVector&>(*model);
  pv.pretrain(toy::corpus(), 1);
  EXPECT_EQ(pv.infer_vector("Cy wrote Kim ."), pv.infer_vector("Cy wrote Kim ."));
  const auto unseen = pv.encode(data::make_instance("Cy wrote Kim .", "author", {"Cy"}));
  EXPECT_FALSE(unseen.document_row);
  EXPECT_EQ(unseen.document_vector.size(), pv.config().embedding_dim);
  EXPECT_TRUE(pv.encode(toy::corpus()[0]).document_row);
}

// ---------------------------------------------------------------------------
// LSTM reader

TEST(LstmReader, EmptyDocumentReadsPropertyOnly) {
  auto model = toy_model(Architecture::kLstmReader);
  auto& reader = dynamic_cast<models::LstmReader&>(*model);
  models::Example e;
  e.property = {reader.tables().vocab.id("author"), Vocabulary::kOov};
  Graph g;
  auto state = reader.cell().zero_state(g);
  for (int id : e.property) state = reader.cell().step(g, nn::embed(g, reader.embedding(), id), state);
  Graph h;
  EXPECT_EQ(reader.joint(h, e).value(), state.h.value());
}

TEST(LstmReader, TruncatesBeforeReading) {
  auto model = toy_model(Architecture::kLstmReader);
  const auto e = model->encode(data::make_instance("a b c d e f g h", "author", {"Ann"}));
  EXPECT_EQ(e.document.size(), model->config().doc_words);
}

TEST(LstmReader, WordOrderMatters) {
  auto model = toy_model(Architecture::kLstmReader);
  auto& reader = dynamic_cast<models::LstmReader&>(*model);
  auto e = reader.encode(toy::corpus()[0]);
  overfit(reader, e, 20, 0.01);
  Graph g1, g2;
  const auto y = reader.joint(g1, e).value();
  std::swap(e.document[0], e.document[2]);
  EXPECT_NE(reader.joint(g2, e).value(), y);
}

// ---------------------------------------------------------------------------
// Attentive reader

namespace {

struct ScalarLstm {
  double w[4][2];
  double b[4];
  void step(double x, double& h, double& c) const {
    double gate[4];
    for (int r = 0; r < 4; ++r) gate[r] = w[r][0] * x + w[r][1] * h + b[r];
    const double i = sigmoid(gate[0]), f = sigmoid(gate[1]), o = sigmoid(gate[2]), g = std::tanh(gate[3]);
    c = f * c + i * g;
    h = o * std::tanh(c);
  }
};

ScalarLstm scalar_lstm(const nn::LstmCell& cell) {
  ScalarLstm s{};
  for (int r = 0; r < 4; ++r) {
    s.w[r][0] = cell.weight->value.at(static_cast<std::size_t>(r), 0);
    s.w[r][1] = cell.weight->value.at(static_cast<std::size_t>(r), 1);
    s.b[r] = cell.bias->value[static_cast<std::size_t>(r)];
  }
  return s;
}

models::AttentiveReader& attentive(std::unique_ptr<models::Model>& model) {
  return dynamic_cast<models::AttentiveReader&>(*model);
}

}  // namespace

TEST(AttentiveReader, ScalarOracle) {
  auto config = toy::config(Architecture::kAttentiveReader);
  config.embedding_dim = 1;
  config.hidden_size = 1;
  config.joint_dim = 1;
  auto model = models::create_model(config, toy::corpus(), 2);
  auto& reader = attentive(model);
  double scale = 0.4;
  for (auto& p : reader.parameters()) set_pattern(*p, scale += 0.2);
  const auto& vocab = reader.tables().vocab;
  models::Example e;
  e.property = {vocab.id("genre")};
  e.document = {vocab.id("Ann"), vocab.id("sings"), vocab.id("jazz")};

  auto emb = [&](int id) { return reader.embedding().value[static_cast<std::size_t>(id)]; };
  const auto prop = scalar_lstm(reader.property_cell()), doc = scalar_lstm(reader.document_cell());
  double u = 0, cu = 0;
  prop.step(emb(e.property[0]), u, cu);
  std::vector<double> z;
  double h = 0, c = 0;
  for (int id : e.document) {
    doc.step(emb(id), h, c);
    z.push_back(h);
  }
  const auto& w1 = reader.attention_projection().value;
  const auto& w2 = reader.output_projection().value;
  const double v = reader.attention_vector().value[0];
  std::vector<double> logits;
  for (double zt : z) logits.push_back(v * std::tanh(w1[0] * zt + w1[1] * u));
  const auto alpha = softmax(logits);
  double r = 0;
  for (std::size_t t = 0; t < z.size(); ++t) r += alpha[t] * z[t];
  const double y = std::tanh(w2[0] * r + w2[1] * u);

  const auto attention = reader.attention(e);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_NEAR(attention[t], alpha[t], 1e-12);
  Graph g;
  EXPECT_NEAR(reader.joint(g, e).value()[0], y, 1e-12);
}

TEST(AttentiveReader, ZeroAttentionVectorIsUniform) {
  auto model = toy_model(Architecture::kAttentiveReader);
  auto& reader = attentive(model);
  reader.attention_vector().value.fill(0.0);
  for (double a : reader.attention(reader.encode(toy::corpus()[1]))) EXPECT_NEAR(a, 0.25, 1e-15);
}

TEST(AttentiveReader, OneTokenDocument) {
  auto model = toy_model(Architecture::kAttentiveReader);
  auto& reader = attentive(model);
  models::Example e;
  e.property = {reader.tables().vocab.id("author")};
  e.document = {reader.tables().vocab.id("Ann")};
  EXPECT_EQ(reader.attention(e), std::vector<double>{1.0});
  e.document.clear();
  Graph g;
  EXPECT_THROW(reader.joint(g, e), std::invalid_argument);
  EXPECT_FALSE(reader.has_target(e));
  EXPECT_TRUE(reader.predict(e).answer.empty());
}

TEST(AttentiveReader, AttentionIsADistribution) {
  for (bool bidirectional : {false, true}) {
    auto config = toy::config(Architecture::kAttentiveReader);
    config.bidirectional = bidirectional;
    auto model = models::create_model(config, toy::corpus(), 8);
    auto& reader = attentive(model);
    for (const auto& instance : toy::corpus()) {
      const auto e = reader.encode(instance);
      const auto a = reader.attention(e);
      EXPECT_EQ(a.size(), e.document.size());
      for (double x : a) EXPECT_GE(x, 0.0);
      EXPECT_NEAR(std::accumulate(a.begin(), a.end(), 0.0), 1.0, 1e-6);
    }
  }
}

// ---------------------------------------------------------------------------
// Memory network

TEST(MemoryNetwork, PositionWeights) {
  // One-word sentence: weight k / d on component k.
  for (std::size_t k = 1; k <= 4; ++k) EXPECT_DOUBLE_EQ(models::position_weight(1, 1, k, 4), k / 4.0);
  const auto t = models::position_encoding(3, 2);
  for (std::size_t j = 1; j <= 3; ++j) {
    for (std::size_t k = 1; k <= 2; ++k) {
      const double jj = j / 3.0, kk = k / 2.0;
      EXPECT_NEAR(t.at(j - 1, k - 1), 1 - jj - kk + 2 * kk * jj, 1e-15);
    }
  }
}

namespace {

struct MemoryFixture {
  std::unique_ptr<models::Model> model;
  models::MemoryNetwork* net;
  int p, a, b;

  MemoryFixture() {
    auto config = toy::config(Architecture::kMemoryNetwork);
    config.embedding_dim = 2;
    config.memory_hops = 1;
    const std::vector<data::Instance> corpus{data::make_instance("a . b .", "p", {"x"})};
    model = models::create_model(config, corpus, 1);
    net = dynamic_cast<models::MemoryNetwork*>(model.get());
    const auto& vocab = net->tables().vocab;
    p = vocab.id("p");
    a = vocab.id("a");
    b = vocab.id("b");
  }

  void set_row(nn::Parameter& table, int id, double x, double y) const {
    table.value.at(static_cast<std::size_t>(id), 0) = x;
    table.value.at(static_cast<std::size_t>(id), 1) = y;
  }
};

}  // namespace

TEST(MemoryNetwork, TwoSentenceOracle) {
  MemoryFixture f;
  f.set_row(f.net->property_embedding(), f.p, 1, 0);
  f.set_row(f.net->memory_embedding(), f.a, 2, 0);
  f.set_row(f.net->memory_embedding(), f.b, 0, 2);
  f.set_row(f.net->output_embedding(), f.a, 2, 2);
  f.set_row(f.net->output_embedding(), f.b, 4, 0);
  models::Example e;
  e.property = {f.p};
  e.sentences = {{f.a}, {f.b}};
  // One-word encodings scale component k by k / 2: u = [0.5, 0], m = [1, 0], [0, 2], c = [1, 2], [2, 0].
  const double p1 = std::exp(0.5) / (std::exp(0.5) + 1.0), p2 = 1.0 - p1;
  Graph g;
  const auto y = f.net->joint(g, e).value();
  EXPECT_NEAR(y[0], 0.5 + p1 * 1 + p2 * 2, 1e-12);
  EXPECT_NEAR(y[1], 0.0 + p1 * 2 + p2 * 0, 1e-12);
  const auto attention = f.net->attention(e);
  ASSERT_EQ(attention.size(), 1u);
  EXPECT_NEAR(attention[0][0], p1, 1e-12);
}

TEST(MemoryNetwork, SingleSentence) {
  MemoryFixture f;
  models::Example e;
  e.property = {f.p};
  e.sentences = {{f.a, f.b}};
  EXPECT_EQ(f.net->attention(e)[0], std::vector<double>{1.0});
  Graph g;
  const auto y = f.net->joint(g, e).value();
  const auto enc = [&](nn::Parameter& t, const std::vector<int>& ids, std::size_t k) {
    double s = 0;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      s += models::position_weight(j + 1, ids.size(), k + 1, 2) * t.value.at(static_cast<std::size_t>(ids[j]), k);
    }
    return s;
  };
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_NEAR(y[k], enc(f.net->property_embedding(), {f.p}, k) + enc(f.net->output_embedding(), {f.a, f.b}, k),
                1e-12);
  }
}

TEST(MemoryNetwork, IdenticalMemoriesGetUniformAttention) {
  MemoryFixture f;
  models::Example e;
  e.property = {f.p};
  e.sentences = {{f.a}, {f.a}, {f.a}};
  const auto attention = f.net->attention(e);
  for (double x : attention[0]) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
  e.sentences.clear();
  Graph g;
  EXPECT_THROW(f.net->joint(g, e), std::invalid_argument);
}

TEST(MemoryNetwork, EntropyPenaltyFollowsWeight) {
  auto config = toy::config(Architecture::kMemoryNetwork);
  config.memory_hops = 1;
  config.entropy_weight = 0.0;
  auto plain = models::create_model(config, toy::corpus(), 3);
  config.entropy_weight = 0.5;
  auto weighted = models::create_model(config, toy::corpus(), 3);
  auto& net = dynamic_cast<models::MemoryNetwork&>(*weighted);
  const auto e = net.encode(toy::corpus()[0]);
  ASSERT_GE(e.sentences.size(), 2u);
  double plogp = 0;
  const auto attention = net.attention(e);
  for (double p : attention[0]) plogp += p * std::log(p);
  Graph g1, g2;
  const double diff = weighted->loss(g1, e).value().item() - plain->loss(g2, e).value().item();
  EXPECT_NEAR(diff, 0.5 * plogp, 1e-12);
  EXPECT_LT(diff, 0.0);
}

TEST(MemoryNetwork, SentenceSplitting) {
  const std::vector<data::Instance> corpus{data::make_instance("a b . c ! d ? e", "p", {"x"})};
  const auto vocab = data::build_vocab(corpus, 100);
  const auto ids = vocab.encode(data::tokenize("a b . c ! d ? e"));
  const auto s = models::split_sentences(ids, vocab, 30);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0].size(), 3u);
  EXPECT_EQ(s[3], (std::vector<int>{vocab.id("e")}));
  EXPECT_EQ(models::split_sentences(ids, vocab, 2).size(), 2u);
  EXPECT_TRUE(models::split_sentences(std::vector<int>{}, vocab, 3).empty());
}

// ---------------------------------------------------------------------------
// RNN labeler

TEST(Chunks, Examples) {
  const std::vector<double> a{0.9, 0.9, 0.1};
  const auto c = models::best_chunk(a, 0.5);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->begin, 0u);
  EXPECT_EQ(c->end, 2u);
  EXPECT_NEAR(c->score, 0.9, 1e-12);

  const std::vector<double> b{1.0, 0.5};
  EXPECT_NEAR(models::find_chunks(b, 0.4)[0].score, 2.0 / 3.0, 1e-12);

  const std::vector<double> two{0.6, 0.1, 0.8, 0.8, 0.2, 0.6};
  const auto best = models::best_chunk(two, 0.5);
  EXPECT_EQ(best->begin, 2u);
  EXPECT_EQ(models::find_chunks(two, 0.5).size(), 3u);

  const std::vector<double> tie{0.7, 0.1, 0.7};
  EXPECT_EQ(models::best_chunk(tie, 0.5)->begin, 0u);
  const std::vector<double> at_threshold{0.5, 0.5};
  EXPECT_FALSE(models::best_chunk(at_threshold, 0.5));
}

TEST(Chunks, DecodeCutsSourceTextAndCanonicalizesDates) {
  const std::string text = "Aired from January 20, 2008 onward";
  const auto tokens = data::tokenize_with_offsets(text);
  std::vector<double> p(tokens.size(), 0.1);
  for (std::size_t i = 2; i <= 5; ++i) p[i] = 0.9;
  EXPECT_EQ(models::decode_chunks(p, tokens, text, 0.5).answer, "20 January 2008");
  std::fill(p.begin(), p.end(), 0.1);
  p[0] = p[1] = 0.95;
  const auto d = models::decode_chunks(p, tokens, text, 0.5);
  EXPECT_EQ(d.answer, "Aired from");
  EXPECT_NEAR(d.confidence, 0.95, 1e-12);
  std::fill(p.begin(), p.end(), 0.1);
  EXPECT_TRUE(models::decode_chunks(p, tokens, text, 0.5).answer.empty());
  const std::vector<std::string> words{"New", "York", ",", "USA"};
  EXPECT_EQ(models::decode_chunks(std::vector<double>{0.9, 0.9, 0.9, 0.9}, words, 0.5).answer, "New York, USA");
}

TEST(RnnLabeler, ZeroOutputWeightsGiveOneHalf) {
  auto model = toy_model(Architecture::kRnnLabeler);
  auto& labeler = dynamic_cast<models::RnnLabeler&>(*model);
  labeler.output().weight->value.fill(0.0);
  labeler.output().bias->value.fill(0.0);
  const auto e = labeler.encode(toy::corpus()[0]);
  const auto p = labeler.probabilities(e);
  EXPECT_EQ(p.size(), e.document.size());
  for (double x : p) EXPECT_EQ(x, 0.5);
  EXPECT_TRUE(labeler.predict(e).answer.empty());
}

TEST(RnnLabeler, LossFloorWhenPredictionsMatchLabels) {
  Graph g;
  const std::vector<int> labels{0, 1, 1, 0};
  const auto loss = nn::sigmoid_cross_entropy(g.input(Tensor::vector({-40, 40, 40, -40})), labels);
  EXPECT_LT(loss.value().item(), 1e-15);
  EXPECT_GE(loss.value().item(), 0.0);
}

TEST(RnnLabeler, FourTokenGradient) {
  auto model = toy_model(Architecture::kRnnLabeler);
  const auto e = model->encode(data::make_instance("Ann wrote Rex .", "author", {"Ann"}));
  ASSERT_EQ(e.document.size(), 4u);
  EXPECT_EQ(e.labels, (std::vector<int>{1, 0, 0, 0}));
  const auto report = oracle::check_gradients(model->parameters(), toy::example_loss(*model, e));
  EXPECT_TRUE(report.mismatches.empty()) << report.describe();
}

TEST(RnnLabeler, OverfitsOneInstance) {
  auto model = toy_model(Architecture::kRnnLabeler);
  const auto e = model->encode(toy::corpus()[5]);
  ASSERT_TRUE(model->has_target(e));
  overfit(*model, e, 150, 0.05);
  EXPECT_EQ(model->predict(e).answer, "4 July 1776");
}

// ---------------------------------------------------------------------------
// Word sequence models

TEST(Seq2Seq, EncoderAndDecoderShareEmbedding) {
  auto model = toy_model(Architecture::kSeq2Seq);
  auto& s = dynamic_cast<models::Seq2Seq&>(*model);
  EXPECT_EQ(s.decoder().embedding, &s.embedding());
  Graph g;
  const int id = s.tables().vocab.id("Ann");
  const Tensor from_decoder = nn::embed(g, *s.decoder().embedding, id).value();
  const Tensor from_encoder = nn::embed(g, s.embedding(), id).value();
  EXPECT_EQ(from_decoder, from_encoder);
  EXPECT_NE(s.encoder().input, s.decoder().cell.input);
}

TEST(Seq2Seq, ImmediateEosGivesEmptyAnswer) {
  auto model = toy_model(Architecture::kSeq2Seq);
  auto& s = dynamic_cast<models::Seq2Seq&>(*model);
  s.decoder().output.weight->value.fill(0.0);
  s.decoder().output.bias->value.fill(0.0);
  s.decoder().output.bias->value[Vocabulary::kEos] = 10.0;
  const auto d = s.predict(s.encode(toy::corpus()[0]));
  EXPECT_TRUE(d.answer.empty());
  EXPECT_EQ(d.step_confidence.size(), 1u);
}

TEST(Seq2Seq, LengthCapStopsDecoding) {
  auto model = toy_model(Architecture::kSeq2Seq);
  auto& s = dynamic_cast<models::Seq2Seq&>(*model);
  s.decoder().output.weight->value.fill(0.0);
  s.decoder().output.bias->value.fill(0.0);
  s.decoder().output.bias->value[static_cast<std::size_t>(s.tables().vocab.id("Ann"))] = 10.0;
  const auto d = s.predict(s.encode(toy::corpus()[0]));
  EXPECT_EQ(d.tokens.size(), s.config().answer_words);
}

TEST(Seq2Seq, OverfitsOneInstance) {
  auto model = toy_model(Architecture::kSeq2Seq);
  const auto e = model->encode(toy::corpus()[5]);
  overfit(*model, e, 150, 0.05);
  EXPECT_EQ(model->predict(e).answer, "4 July 1776");
}

TEST(PlaceholderSeq2Seq, CopiesOutOfVocabularyName) {
  const auto instance = data::make_instance("Zed wrote Qux .", "author", {"Zed"});
  auto placeholder = toy_model(Architecture::kPlaceholderSeq2Seq);
  auto plain = toy_model(Architecture::kSeq2Seq);
  ASSERT_FALSE(plain->tables().vocab.contains("Zed"));
  const auto e = placeholder->encode(instance);
  overfit(*placeholder, e, 150, 0.05);
  EXPECT_EQ(placeholder->predict(e).answer, "Zed");
  const auto ep = plain->encode(instance);
  overfit(*plain, ep, 150, 0.05);
  EXPECT_NE(plain->predict(ep).answer, "Zed");
}

TEST(PlaceholderSeq2Seq, UnmappedPlaceholderResolvesToOov) {
  auto model = toy_model(Architecture::kPlaceholderSeq2Seq);
  auto& s = dynamic_cast<models::Seq2Seq&>(*model);
  s.decoder().output.weight->value.fill(0.0);
  s.decoder().output.bias->value.fill(0.0);
  s.decoder().output.bias->value[static_cast<std::size_t>(s.tables().vocab.placeholder_id(3))] = 10.0;
  auto e = s.encode(toy::corpus()[0]);
  e.placeholders.clear();
  const auto d = s.predict(e);
  EXPECT_EQ(d.unresolved_placeholders, s.config().answer_words);
  EXPECT_EQ(d.tokens.front(), Vocabulary::kOovMarker);
}

TEST(PlaceholderSeq2Seq, ResolutionAgreesWithMap) {
  auto model = toy_model(Architecture::kPlaceholderSeq2Seq);
  const auto& vocab = model->tables().vocab;
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto e = model->encode(data::make_instance("Q" + std::to_string(trial) + " met R" + std::to_string(trial) +
                                                         " and Q" + std::to_string(trial),
                                                     "author", {"Ann"}));
    std::vector<int> decoded;
    for (int k = 0; k < 6; ++k) decoded.push_back(vocab.placeholder_id(rng.below(vocab.placeholder_count())));
    const auto words = data::resolve_placeholders(decoded, vocab, e.placeholders);
    for (std::size_t i = 0; i < decoded.size(); ++i) {
      const auto it = e.placeholders.find(decoded[i]);
      EXPECT_EQ(words[i], it == e.placeholders.end() ? std::string(Vocabulary::kOovMarker) : it->second);
    }
  }
}

// ---------------------------------------------------------------------------
// Character sequence model

TEST(CharSeq2Seq, FullScaleCharacterVocabulary) {
  const auto config = models::ModelConfig::paper(Architecture::kCharSeq2Seq);
  const auto tables = models::build_tables(config, toy::corpus());
  EXPECT_LE(tables.vocab.size(), 76u);
  EXPECT_EQ(config.char_vocab_size, 76u);
}

TEST(CharSeq2Seq, EmptyPropertyStartsSecondLayerAtZero) {
  auto model = toy_model(Architecture::kCharSeq2Seq);
  auto& s = dynamic_cast<models::CharSeq2Seq&>(*model);
  auto e = s.encode(toy::corpus()[1]);
  e.property.clear();
  Graph g;
  Var h1 = s.document_layer1().zero_state(g), h2 = s.document_layer2().zero_state(g);
  for (int id : e.document) {
    h1 = s.document_layer1().step(g, nn::embed(g, s.embedding(), id), h1);
    h2 = s.document_layer2().step(g, h1, h2);
  }
  Graph h;
  EXPECT_EQ(s.encode_state(h, e).value(), h2.value());
}

TEST(CharSeq2Seq, OverfitsOneInstance) {
  auto model = toy_model(Architecture::kCharSeq2Seq);
  const auto e = model->encode(toy::corpus()[0]);
  overfit(*model, e, 250, 0.05);
  EXPECT_EQ(model->predict(e).answer, "Ann");
}

TEST(CharLanguageModel, InitCopiesWeights) {
  auto model = toy_model(Architecture::kCharSeq2Seq);
  auto& s = dynamic_cast<models::CharSeq2Seq&>(*model);
  const auto property_before = s.property_encoder().input->value;
  const auto layer2_before = s.document_layer2().input->value;
  Rng rng(9);
  models::CharLanguageModel lm(s.tables().vocab.size(), s.config().char_embedding_dim, s.config().hidden_size, rng);
  models::init_from_lm(s, lm);
  for (const auto* cell : {&s.document_layer1(), &s.decoder().cell}) {
    EXPECT_EQ(cell->input->value, lm.cell().input->value);
    EXPECT_EQ(cell->recurrent_gates->value, lm.cell().recurrent_gates->value);
    EXPECT_EQ(cell->recurrent_candidate->value, lm.cell().recurrent_candidate->value);
    EXPECT_EQ(cell->bias->value, lm.cell().bias->value);
  }
  EXPECT_EQ(s.embedding().value, lm.embedding().value);
  EXPECT_EQ(s.decoder().output.weight->value, lm.output().weight->value);
  EXPECT_EQ(s.property_encoder().input->value, property_before);
  EXPECT_EQ(s.document_layer2().input->value, layer2_before);

  models::CharLanguageModel wrong(s.tables().vocab.size() + 1, s.config().char_embedding_dim, s.config().hidden_size,
                                  rng);
  EXPECT_THROW(models::init_from_lm(s, wrong), nn::ShapeError);
}

TEST(CharLanguageModel, HeldOutPerplexityFalls) {
  data::SyntheticSpec spec;
  spec.documents = 40;
  spec.relational = {{"author", 1, 2}};
  const auto corpus = data::generate_synthetic(spec, 21).instances;
  const auto vocab = data::build_char_vocab(corpus, 40);
  std::vector<std::vector<int>> train, held_out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (i < 30 ? train : held_out).push_back(models::encode_chars(vocab, corpus[i].document, 30));
  }
  Rng rng(1);
  models::CharLanguageModel lm(vocab.size(), 8, 16, rng);
  const double before = lm.perplexity(held_out);
  const auto curve = lm.fit(train, 150, 8, 1e-2, 5);
  EXPECT_EQ(curve.size(), 150u);
  EXPECT_LT(lm.perplexity(held_out), 0.6 * before);
}
