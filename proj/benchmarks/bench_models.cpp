#include <benchmark/benchmark.h>

#include "wikireading/data/synthetic.hpp"
#include "wikireading/models/model.hpp"

namespace wr = wikireading;

namespace {

const std::vector<wr::data::Instance>& corpus() {
  static const auto instances = [] {
    wr::data::SyntheticSpec spec;
    spec.documents = 50;
    spec.categorical = {{"genre", 3, {8, 1, 1}}};
    spec.relational = {{"author", 1, 1}};
    spec.dates = {{"date of birth"}};
    spec.filler_sentences = 2;
    return wr::data::generate_synthetic(spec, 1).instances;
  }();
  return instances;
}

wr::models::Architecture architecture(const benchmark::State& state) {
  return wr::models::kAllArchitectures[static_cast<std::size_t>(state.range(0))];
}

void BM_LossAndGradient(benchmark::State& state) {
  const auto arch = architecture(state);
  state.SetLabel(wr::models::to_string(arch));
  auto model = wr::models::create_model(wr::models::ModelConfig::desk(arch), corpus(), 1);
  std::vector<wr::models::Example> examples;
  for (const auto& i : corpus()) {
    auto e = model->encode(i);
    if (model->has_target(e)) examples.push_back(std::move(e));
  }
  std::size_t next = 0;
  for (auto _ : state) {
    wr::nn::Graph g;
    auto loss = model->loss(g, examples[next++ % examples.size()]);
    g.backward(loss);
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_Predict(benchmark::State& state) {
  const auto arch = architecture(state);
  state.SetLabel(wr::models::to_string(arch));
  auto model = wr::models::create_model(wr::models::ModelConfig::desk(arch), corpus(), 1);
  std::vector<wr::models::Example> examples;
  for (const auto& i : corpus()) examples.push_back(model->encode(i));
  std::size_t next = 0;
  for (auto _ : state) {
    auto answer = model->predict(examples[next++ % examples.size()]);
    benchmark::DoNotOptimize(answer);
  }
  state.SetItemsProcessed(state.iterations());
}

BENCHMARK(BM_LossAndGradient)->DenseRange(0, std::size(wr::models::kAllArchitectures) - 1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Predict)->DenseRange(0, std::size(wr::models::kAllArchitectures) - 1)->Unit(benchmark::kMicrosecond);

}  // namespace
