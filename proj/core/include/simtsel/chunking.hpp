#ifndef SIMTSEL_CHUNKING_HPP
#define SIMTSEL_CHUNKING_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "simtsel/corpus.hpp"
#include "simtsel/ngram_lm.hpp"

namespace simtsel {

struct IndexRange {
  uint32_t lo = 0;
  uint32_t hi = 0;  // inclusive

  bool contains(uint32_t v) const { return lo <= v && v <= hi; }
  bool contains(const IndexRange& other) const {
    return lo <= other.lo && other.hi <= hi;
  }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

// One minimal block: the links it owns plus their source/target index spans.
struct ChunkGroup {
  std::vector<AlignmentLink> links;  // sorted by (src, tgt)
  IndexRange src;
  IndexRange tgt;

  friend bool operator==(const ChunkGroup&, const ChunkGroup&) = default;
};

// Grouping of alignment links into minimal consistent blocks. Invariants:
// groups are disjoint, their union is the input set, and no link outside a
// group touches the group's source or target span.
struct ChunkPartition {
  std::vector<ChunkGroup> groups;  // sorted by source span start

  size_t chunk_count() const { return groups.size(); }
  size_t link_count() const;

  friend bool operator==(const ChunkPartition&, const ChunkPartition&) = default;
};

// Groups links by iterated span closure: a group absorbs any link whose
// source index falls inside the group's current source span or whose target
// index falls inside its target span, groups merging when their spans
// collide, until nothing moves. The result is the finest partition whose
// groups all hold the closure invariant, so it does not depend on seed or
// iteration order.
ChunkPartition extract_chunks_align(const AlignmentSet& alignment);

// Exhaustive reference: enumerates every (source span, target span) pair,
// keeps the ones where a link is inside the source span exactly when it is
// inside the target span (spans with no link dropped), then returns the
// partition of the links into the largest number of such blocks (that
// partition is unique). Only for small instances.
struct OracleBounds {
  size_t max_links = 12;
  uint32_t max_index = 8;  // largest admissible source/target index
};
ChunkPartition oracle_minimal_blocks(const AlignmentSet& alignment,
                                     const OracleBounds& bounds = {});

// Contiguous token spans covering a sentence, in order.
struct LmSegmentation {
  struct Span {
    uint32_t begin = 0;  // token index, inclusive
    uint32_t end = 0;    // exclusive
    friend bool operator==(const Span&, const Span&) = default;
  };
  std::vector<Span> spans;

  size_t chunk_count() const { return spans.size(); }
  friend bool operator==(const LmSegmentation&, const LmSegmentation&) = default;
};

// Greedy left-to-right segmentation: the current span keeps its running
// average token log probability (each span scored from a fresh
// begin-of-sentence context); a token whose addition strictly lowers that
// average closes the span and starts the next one. The final span always
// counts, so 1 <= chunk_count <= |x|.
LmSegmentation segment_lm(const Sentence& sentence, const NgramModel& model);

// Same decision rule over externally supplied per-token log probabilities
// (token_scores[t] = log P(x_t | x_<t)); spans average the given values.
LmSegmentation segment_from_scores(std::span<const double> token_scores);

}  // namespace simtsel

#endif
