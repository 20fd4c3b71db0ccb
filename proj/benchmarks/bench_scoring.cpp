#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "simtsel/scoring.hpp"
#include "simtsel/sampling.hpp"

namespace {

void BM_ScoreChunkAlign(benchmark::State& state) {
  simtsel::SplitMix64 rng(17);
  std::vector<simtsel::AlignmentSet> alignments;
  for (int i = 0; i < 256; ++i) {
    alignments.push_back(bench::synth_alignment(rng, 20, 24));
  }
  size_t at = 0;
  for (auto _ : state) {
    auto score = simtsel::score_chunk_align(alignments[at], 0.5);
    benchmark::DoNotOptimize(score);
    at = (at + 1) % alignments.size();
  }
}
BENCHMARK(BM_ScoreChunkAlign);

void BM_ScoreMono(benchmark::State& state) {
  simtsel::SplitMix64 rng(19);
  std::vector<simtsel::AlignmentSet> alignments;
  for (int i = 0; i < 256; ++i) {
    alignments.push_back(bench::synth_alignment(rng, 20, 24));
  }
  size_t at = 0;
  for (auto _ : state) {
    auto score = simtsel::score_mono(alignments[at], 3, 0.5);
    benchmark::DoNotOptimize(score);
    at = (at + 1) % alignments.size();
  }
}
BENCHMARK(BM_ScoreMono);

void BM_SelectTop(benchmark::State& state) {
  simtsel::SplitMix64 rng(23);
  std::vector<simtsel::ScoreRecord> records;
  uint64_t n = static_cast<uint64_t>(state.range(0));
  records.reserve(n * 10);
  for (uint64_t i = 0; i < n * 10; ++i) {
    records.push_back(
        {i, static_cast<double>(rng.below(1u << 20)) / (1u << 20)});
  }
  for (auto _ : state) {
    auto picked = simtsel::select_top(records, n, simtsel::Direction::lower);
    benchmark::DoNotOptimize(picked);
  }
}
BENCHMARK(BM_SelectTop)->Arg(1000)->Arg(10000);

void BM_RandomSample(benchmark::State& state) {
  for (auto _ : state) {
    auto picked = simtsel::random_sample(1000000, 10000, 42);
    benchmark::DoNotOptimize(picked);
  }
}
BENCHMARK(BM_RandomSample);

}  // namespace
