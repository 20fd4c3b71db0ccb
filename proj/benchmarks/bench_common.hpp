#ifndef SIMTSEL_BENCH_COMMON_HPP
#define SIMTSEL_BENCH_COMMON_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "simtsel/corpus.hpp"
#include "simtsel/sampling.hpp"

namespace bench {

// Deterministic synthetic data so runs are comparable across machines.
inline simtsel::Sentence synth_sentence(simtsel::SplitMix64& rng, size_t len,
                                        uint64_t vocab) {
  simtsel::Sentence sentence;
  sentence.reserve(len);
  for (size_t i = 0; i < len; ++i) {
    sentence.push_back("w" + std::to_string(rng.below(vocab)));
  }
  return sentence;
}

// Mostly monotone alignment with occasional reordering, the shape real
// aligner output takes.
inline simtsel::AlignmentSet synth_alignment(simtsel::SplitMix64& rng,
                                             uint32_t src_len,
                                             uint32_t tgt_len) {
  std::vector<simtsel::AlignmentLink> links;
  links.reserve(tgt_len);
  for (uint32_t j = 0; j < tgt_len; ++j) {
    uint32_t base = static_cast<uint32_t>(
        static_cast<uint64_t>(j) * src_len / tgt_len);
    uint32_t jitter = static_cast<uint32_t>(rng.below(3));
    uint32_t i = base + jitter;
    if (i >= src_len) i = src_len - 1;
    links.push_back({i, j});
  }
  return simtsel::AlignmentSet(std::move(links));
}

}  // namespace bench

#endif
