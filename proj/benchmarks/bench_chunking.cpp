#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "simtsel/chunking.hpp"
#include "simtsel/corpus.hpp"
#include "simtsel/sampling.hpp"

namespace {

void BM_ExtractChunksAlign(benchmark::State& state) {
  simtsel::SplitMix64 rng(7);
  std::vector<simtsel::AlignmentSet> alignments;
  for (int i = 0; i < 256; ++i) {
    uint32_t src_len = static_cast<uint32_t>(state.range(0));
    alignments.push_back(bench::synth_alignment(rng, src_len, src_len + 4));
  }
  size_t at = 0;
  for (auto _ : state) {
    auto partition = simtsel::extract_chunks_align(alignments[at]);
    benchmark::DoNotOptimize(partition);
    at = (at + 1) % alignments.size();
  }
}
BENCHMARK(BM_ExtractChunksAlign)->Arg(10)->Arg(20)->Arg(40)->Arg(80);

void BM_ParseAlignmentLine(benchmark::State& state) {
  simtsel::SplitMix64 rng(11);
  auto alignment = bench::synth_alignment(
      rng, static_cast<uint32_t>(state.range(0)),
      static_cast<uint32_t>(state.range(0)));
  std::string line = simtsel::format_alignment(alignment);
  for (auto _ : state) {
    auto parsed = simtsel::parse_alignment_line(line);
    benchmark::DoNotOptimize(parsed);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(line.size()));
}
BENCHMARK(BM_ParseAlignmentLine)->Arg(20)->Arg(80);

}  // namespace
