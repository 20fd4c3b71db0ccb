#include "simtsel/chunking.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

#include "simtsel/error.hpp"
#include "text_io.hpp"

namespace simtsel {

size_t ChunkPartition::link_count() const {
  size_t n = 0;
  for (const auto& group : groups) n += group.links.size();
  return n;
}

namespace {

// Range overlap is necessary for one group's span to contain a link of the
// other, so disjoint ranges skip the exact scan.
bool ranges_overlap(const IndexRange& a, const IndexRange& b) {
  return a.lo <= b.hi && b.lo <= a.hi;
}

bool groups_touch(const ChunkGroup& a, const ChunkGroup& b) {
  if (!ranges_overlap(a.src, b.src) && !ranges_overlap(a.tgt, b.tgt)) {
    return false;
  }
  for (const auto& link : b.links) {
    if (a.src.contains(link.src) || a.tgt.contains(link.tgt)) return true;
  }
  for (const auto& link : a.links) {
    if (b.src.contains(link.src) || b.tgt.contains(link.tgt)) return true;
  }
  return false;
}

void merge_into(ChunkGroup& dst, ChunkGroup& src) {
  dst.links.insert(dst.links.end(), src.links.begin(), src.links.end());
  dst.src.lo = std::min(dst.src.lo, src.src.lo);
  dst.src.hi = std::max(dst.src.hi, src.src.hi);
  dst.tgt.lo = std::min(dst.tgt.lo, src.tgt.lo);
  dst.tgt.hi = std::max(dst.tgt.hi, src.tgt.hi);
}

}  // namespace

ChunkPartition extract_chunks_align(const AlignmentSet& alignment) {
  const auto& links = alignment.links();
  ChunkPartition out;
  if (links.empty()) return out;
  auto& groups = out.groups;
  groups.reserve(links.size());
  for (const auto& link : links) {
    groups.push_back({{link},
                      {link.src, link.src},
                      {link.tgt, link.tgt}});
  }
  // Pairwise merge to a fixed point: a group must own every link its spans
  // touch, so a link of one group inside another group's span collapses the
  // two. The fixed point is the finest partition whose groups all hold the
  // closure invariant; that partition is unique (the common refinement of
  // two closed partitions is closed), so iteration order cannot matter.
  bool merged = true;
  while (merged) {
    merged = false;
    for (size_t a = 0; a < groups.size(); ++a) {
      for (size_t b = a + 1; b < groups.size(); ++b) {
        if (!groups_touch(groups[a], groups[b])) continue;
        merge_into(groups[a], groups[b]);
        groups.erase(groups.begin() + b);
        merged = true;
        --b;
      }
    }
  }
  for (auto& group : groups) {
    std::sort(group.links.begin(), group.links.end());
  }
  // A closed group owns every link inside its source span, so source spans
  // are disjoint across groups and this order is total.
  std::sort(groups.begin(), groups.end(),
            [](const ChunkGroup& a, const ChunkGroup& b) {
              return a.src.lo < b.src.lo;
            });
  return out;
}

namespace {

// Maximizes the number of valid blocks partitioning a link subset. Blocks
// are bitmasks over the link list; a state is the set of still-unassigned
// links, and the block covering the lowest unassigned link is tried in every
// variant. -1 marks subsets no disjoint blocks cover exactly.
struct PartitionSearch {
  const std::vector<uint64_t>& blocks;
  std::unordered_map<uint64_t, int> memo;

  int best_parts(uint64_t subset) {
    if (subset == 0) return 0;
    auto it = memo.find(subset);
    if (it != memo.end()) return it->second;
    int low = std::countr_zero(subset);
    int best = -1;
    for (uint64_t block : blocks) {
      if ((block & subset) != block || !((block >> low) & 1)) continue;
      int rest = best_parts(subset & ~block);
      if (rest >= 0 && rest + 1 > best) best = rest + 1;
    }
    memo.emplace(subset, best);
    return best;
  }
};

}  // namespace

ChunkPartition oracle_minimal_blocks(const AlignmentSet& alignment,
                                     const OracleBounds& bounds) {
  const auto& links = alignment.links();
  if (links.size() > bounds.max_links) {
    throw Error(ErrorCategory::bounds,
                "oracle limited to " + detail::format_u64(bounds.max_links) +
                    " links, got " + detail::format_u64(links.size()));
  }
  if (links.size() > 63) {
    throw Error(ErrorCategory::bounds, "oracle limited to 63 links");
  }
  ChunkPartition out;
  if (links.empty()) return out;
  uint32_t max_src = 0;
  uint32_t max_tgt = 0;
  for (const auto& link : links) {
    max_src = std::max(max_src, link.src);
    max_tgt = std::max(max_tgt, link.tgt);
  }
  if (max_src > bounds.max_index || max_tgt > bounds.max_index) {
    throw Error(ErrorCategory::bounds,
                "oracle limited to indices up to " +
                    detail::format_u64(bounds.max_index));
  }

  // A span pair is a valid block when links fall inside the source span
  // exactly when they fall inside the target span (and at least one does).
  // Blocks are kept as link masks; span slack collapses in the dedup.
  std::vector<uint64_t> blocks;
  for (uint32_t slo = 0; slo <= max_src; ++slo) {
    for (uint32_t shi = slo; shi <= max_src; ++shi) {
      for (uint32_t tlo = 0; tlo <= max_tgt; ++tlo) {
        for (uint32_t thi = tlo; thi <= max_tgt; ++thi) {
          IndexRange src{slo, shi};
          IndexRange tgt{tlo, thi};
          bool ok = true;
          uint64_t mask = 0;
          for (size_t i = 0; i < links.size(); ++i) {
            bool in_src = src.contains(links[i].src);
            bool in_tgt = tgt.contains(links[i].tgt);
            if (in_src != in_tgt) {
              ok = false;
              break;
            }
            if (in_src) mask |= uint64_t{1} << i;
          }
          if (ok && mask != 0) blocks.push_back(mask);
        }
      }
    }
  }
  std::sort(blocks.begin(), blocks.end());
  blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());

  // The chunks are the partition of the links into the largest number of
  // valid blocks. Intersections of valid blocks are valid or empty, so the
  // common refinement of two such partitions is again one; the largest is
  // therefore unique, and peeling any count-optimal block reproduces it.
  PartitionSearch search{blocks, {}};
  uint64_t remaining = (uint64_t{1} << links.size()) - 1;
  while (remaining != 0) {
    int parts = search.best_parts(remaining);
    // The all-links block is always valid, so the top-level search cannot
    // fail; optimal-path states inherit feasibility.
    if (parts < 1) {
      throw Error(ErrorCategory::internal, "oracle found no block partition");
    }
    int low = std::countr_zero(remaining);
    bool peeled = false;
    for (uint64_t block : blocks) {
      if ((block & remaining) != block || !((block >> low) & 1)) continue;
      if (search.best_parts(remaining & ~block) != parts - 1) continue;
      ChunkGroup group;
      for (size_t i = 0; i < links.size(); ++i) {
        if ((block >> i) & 1) group.links.push_back(links[i]);
      }
      group.src = {group.links.front().src, group.links.front().src};
      group.tgt = {group.links.front().tgt, group.links.front().tgt};
      for (const auto& link : group.links) {
        group.src.lo = std::min(group.src.lo, link.src);
        group.src.hi = std::max(group.src.hi, link.src);
        group.tgt.lo = std::min(group.tgt.lo, link.tgt);
        group.tgt.hi = std::max(group.tgt.hi, link.tgt);
      }
      out.groups.push_back(std::move(group));
      remaining &= ~block;
      peeled = true;
      break;
    }
    if (!peeled) {
      throw Error(ErrorCategory::internal, "oracle could not peel a block");
    }
  }
  std::sort(out.groups.begin(), out.groups.end(),
            [](const ChunkGroup& a, const ChunkGroup& b) {
              return a.src.lo < b.src.lo;
            });
  return out;
}

namespace {

// Shared segmentation loop. A token closes the current span when its score
// sits strictly below the span's running mean (the mean drops exactly when
// the newcomer is below it). The mean updates incrementally; an equal score
// leaves it bit-identical, so constant-score inputs stay one span.
template <typename ScoreAt, typename Restart>
LmSegmentation segment_by_mean(size_t len, ScoreAt score_at, Restart restart) {
  LmSegmentation seg;
  if (len == 0) return seg;
  uint32_t begin = 0;
  double mean = score_at(0);
  size_t span_len = 1;
  for (size_t pos = 1; pos < len; ++pos) {
    double score = score_at(pos);
    if (score < mean) {
      seg.spans.push_back({begin, static_cast<uint32_t>(pos)});
      begin = static_cast<uint32_t>(pos);
      restart(pos);
      mean = score_at(pos);
      span_len = 1;
    } else {
      ++span_len;
      mean += (score - mean) / static_cast<double>(span_len);
    }
  }
  seg.spans.push_back({begin, static_cast<uint32_t>(len)});
  return seg;
}

}  // namespace

LmSegmentation segment_lm(const Sentence& sentence, const NgramModel& model) {
  auto ids = model.intern(sentence);
  // context = begin-of-sentence marker plus the current span's tokens; every
  // span is scored as if it started the sentence.
  std::vector<uint32_t> context;
  context.push_back(NgramModel::kBosId);
  auto score_at = [&](size_t pos) {
    double s = model.cond_log_prob_ids(context, ids[pos]);
    context.push_back(ids[pos]);
    return s;
  };
  // The span opener is rescored from scratch after a restart; the tentative
  // score it got while closing the old span dies with the cleared context.
  auto restart = [&](size_t pos) {
    (void)pos;
    context.clear();
    context.push_back(NgramModel::kBosId);
  };
  return segment_by_mean(ids.size(), score_at, restart);
}

LmSegmentation segment_from_scores(std::span<const double> token_scores) {
  return segment_by_mean(
      token_scores.size(), [&](size_t pos) { return token_scores[pos]; },
      [](size_t) {});
}

}  // namespace simtsel
