#include <benchmark/benchmark.h>

#include "wikireading/nn/graph.hpp"
#include "wikireading/nn/layers.hpp"
#include "wikireading/nn/ops.hpp"
#include "wikireading/random.hpp"

namespace nn = wikireading::nn;

namespace {

void BM_MatVecForwardBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  wikireading::Rng rng(1);
  nn::ParameterSet params;
  auto& w = params.add("w", nn::glorot_uniform(n, n, rng));
  auto& x = params.add("x", nn::embedding_init(1, n, rng));
  for (auto _ : state) {
    nn::Graph g;
    auto y = nn::sum(nn::tanh(nn::linear(g.param(w), nn::row(g.param(x), 0))));
    g.backward(y);
    benchmark::DoNotOptimize(w.grad.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n));
}
BENCHMARK(BM_MatVecForwardBackward)->Arg(64)->Arg(128)->Arg(256);

void BM_SoftmaxCrossEntropy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  wikireading::Rng rng(2);
  nn::ParameterSet params;
  auto& logits = params.add("logits", nn::embedding_init(1, n, rng));
  for (auto _ : state) {
    nn::Graph g;
    auto loss = nn::cross_entropy(nn::row(g.param(logits), 0), n / 2);
    g.backward(loss);
    benchmark::DoNotOptimize(logits.grad.data());
  }
}
BENCHMARK(BM_SoftmaxCrossEntropy)->Arg(500)->Arg(5000);

void BM_EmbedLookup(benchmark::State& state) {
  wikireading::Rng rng(3);
  nn::ParameterSet params;
  auto& table = params.add("table", nn::embedding_init(5000, 64, rng));
  std::vector<int> ids(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(rng.below(5000));
  for (auto _ : state) {
    nn::Graph g;
    auto loss = nn::sum(nn::embed(g, table, ids));
    g.backward(loss);
    benchmark::DoNotOptimize(table.grad.data());
  }
}
BENCHMARK(BM_EmbedLookup)->Arg(60)->Arg(200);

}  // namespace
