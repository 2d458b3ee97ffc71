#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "hateprobe/embedding.hpp"
#include "hateprobe/scoring_kernels.hpp"

using namespace hateprobe;

namespace {

std::vector<kernels::TokenPair> make_pairs(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> word(0, 199), len(3, 25);
  auto sentence = [&] {
    std::vector<std::string> out(static_cast<std::size_t>(len(rng)));
    for (auto& w : out) w = "w" + std::to_string(word(rng));
    return out;
  };
  std::vector<kernels::TokenPair> pairs(n);
  for (auto& p : pairs) {
    p.candidate = sentence();
    p.reference = sentence();
  }
  return pairs;
}

void BM_BleuSerial(benchmark::State& state) {
  auto pairs = make_pairs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::bleu_batch(pairs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BleuParallel(benchmark::State& state) {
  auto pairs = make_pairs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::bleu_batch(pairs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BertScoreSerial(benchmark::State& state) {
  auto pairs = make_pairs(static_cast<std::size_t>(state.range(0)));
  HashEmbeddingProvider provider(256, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::bertscore_batch(pairs, provider));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BertScoreParallel(benchmark::State& state) {
  auto pairs = make_pairs(static_cast<std::size_t>(state.range(0)));
  HashEmbeddingProvider provider(256, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::bertscore_batch(pairs, provider));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_BleuSerial)->Arg(2000)->Arg(20000);
BENCHMARK(BM_BleuParallel)->Arg(2000)->Arg(20000);
BENCHMARK(BM_BertScoreSerial)->Arg(500)->Arg(2000);
BENCHMARK(BM_BertScoreParallel)->Arg(500)->Arg(2000);

BENCHMARK_MAIN();
