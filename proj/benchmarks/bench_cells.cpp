#include <benchmark/benchmark.h>

#include "wikireading/nn/graph.hpp"
#include "wikireading/nn/layers.hpp"
#include "wikireading/nn/ops.hpp"
#include "wikireading/random.hpp"

namespace nn = wikireading::nn;

namespace {

// Arguments: sequence length, hidden size. Input size is 64.
void BM_LstmSequence(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const auto hidden = static_cast<std::size_t>(state.range(1));
  wikireading::Rng rng(1);
  nn::ParameterSet params;
  const auto cell = nn::make_lstm(params, "lstm", 64, hidden, rng);
  auto& inputs = params.add("inputs", nn::embedding_init(steps, 64, rng));
  for (auto _ : state) {
    params.zero_grad();
    nn::Graph g;
    auto x = g.param(inputs);
    auto s = cell.zero_state(g);
    for (std::size_t t = 0; t < steps; ++t) s = cell.step(g, nn::row(x, t), s);
    g.backward(nn::sum(s.h));
    benchmark::DoNotOptimize(cell.weight->grad.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(steps));
}
BENCHMARK(BM_LstmSequence)->Args({60, 128})->Args({200, 128})->Args({60, 256});

void BM_GruSequence(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const auto hidden = static_cast<std::size_t>(state.range(1));
  wikireading::Rng rng(2);
  nn::ParameterSet params;
  const auto cell = nn::make_gru(params, "gru", 64, hidden, rng);
  auto& inputs = params.add("inputs", nn::embedding_init(steps, 64, rng));
  for (auto _ : state) {
    params.zero_grad();
    nn::Graph g;
    auto x = g.param(inputs);
    auto h = cell.zero_state(g);
    for (std::size_t t = 0; t < steps; ++t) h = cell.step(g, nn::row(x, t), h);
    g.backward(nn::sum(h));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(steps));
}
BENCHMARK(BM_GruSequence)->Args({60, 128})->Args({200, 128});

}  // namespace
