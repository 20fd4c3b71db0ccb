#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "simtsel/chunking.hpp"
#include "simtsel/ngram_lm.hpp"
#include "simtsel/sampling.hpp"

namespace {

simtsel::NgramModel make_model(uint64_t vocab, int sentences) {
  simtsel::SplitMix64 rng(3);
  simtsel::NgramModel model(3);
  for (int i = 0; i < sentences; ++i) {
    model.add(bench::synth_sentence(rng, 12 + rng.below(16), vocab));
  }
  return model;
}

void BM_TrainNgram(benchmark::State& state) {
  simtsel::SplitMix64 rng(5);
  std::vector<simtsel::Sentence> corpus;
  for (int i = 0; i < 1024; ++i) {
    corpus.push_back(bench::synth_sentence(rng, 20, 5000));
  }
  for (auto _ : state) {
    simtsel::NgramModel model(3);
    for (const auto& sentence : corpus) model.add(sentence);
    benchmark::DoNotOptimize(model);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(corpus.size()));
}
BENCHMARK(BM_TrainNgram);

void BM_SegmentLm(benchmark::State& state) {
  auto model = make_model(2000, 4000);
  simtsel::SplitMix64 rng(9);
  std::vector<simtsel::Sentence> sentences;
  for (int i = 0; i < 256; ++i) {
    sentences.push_back(
        bench::synth_sentence(rng, static_cast<size_t>(state.range(0)), 2000));
  }
  size_t at = 0;
  for (auto _ : state) {
    auto segmentation = simtsel::segment_lm(sentences[at], model);
    benchmark::DoNotOptimize(segmentation);
    at = (at + 1) % sentences.size();
  }
}
BENCHMARK(BM_SegmentLm)->Arg(10)->Arg(20)->Arg(40);

void BM_PrefixAvgLogProb(benchmark::State& state) {
  auto model = make_model(2000, 4000);
  simtsel::SplitMix64 rng(13);
  auto sentence = bench::synth_sentence(rng, 20, 2000);
  for (auto _ : state) {
    double value = model.prefix_avg_log_prob(sentence);
    benchmark::DoNotOptimize(value);
  }
}
BENCHMARK(BM_PrefixAvgLogProb);

}  // namespace
