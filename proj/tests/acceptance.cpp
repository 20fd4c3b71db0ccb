// Acceptance harness: numbered end-to-end checks over the library and the
// CLI, one PASS or FAIL line each. Run with a criterion number or "all".

#include <sys/statvfs.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "simtsel/align_stats.hpp"
#include "simtsel/chunking.hpp"
#include "simtsel/corpus.hpp"
#include "simtsel/diagnostics.hpp"
#include "simtsel/error.hpp"
#include "simtsel/ngram_lm.hpp"
#include "simtsel/pipeline.hpp"
#include "simtsel/sampling.hpp"
#include "simtsel/scoring.hpp"
#include "test_util.hpp"

namespace {

using namespace simtsel;
using Clock = std::chrono::steady_clock;

constexpr double kRelTol = 1e-9;
constexpr double kCorrTol = 1e-6;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool rel_close(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

// Collects named value checks; the first failure becomes the FAIL detail.
class Checker {
 public:
  void close(const std::string& name, double got, double want,
             double tol = kRelTol) {
    ++checks_;
    if (!rel_close(got, want, tol)) {
      record(name + ": got " + std::to_string(got) + ", want " +
             std::to_string(want));
    }
  }
  void that(const std::string& name, bool ok) {
    ++checks_;
    if (!ok) record(name);
  }
  bool passed() const { return detail_.empty(); }
  int checks() const { return checks_; }
  const std::string& detail() const { return detail_; }

 private:
  void record(const std::string& what) {
    if (detail_.empty()) detail_ = what;
  }
  std::string detail_;
  int checks_ = 0;
};

std::vector<AlignmentLink> grid_links(uint32_t mask) {
  std::vector<AlignmentLink> links;
  for (uint32_t bit = 0; bit < 16; ++bit) {
    if (mask & (1u << bit)) links.push_back({bit / 4, bit % 4});
  }
  return links;
}

struct SpanPair {
  IndexRange src;
  IndexRange tgt;
};

SpanPair spans_of(const std::vector<AlignmentLink>& links) {
  SpanPair sp{{links[0].src, links[0].src}, {links[0].tgt, links[0].tgt}};
  for (const auto& link : links) {
    sp.src.lo = std::min(sp.src.lo, link.src);
    sp.src.hi = std::max(sp.src.hi, link.src);
    sp.tgt.lo = std::min(sp.tgt.lo, link.tgt);
    sp.tgt.hi = std::max(sp.tgt.hi, link.tgt);
  }
  return sp;
}

// A subset is a consistent block of the full set when the links inside its
// spans are exactly the subset.
bool closed_against(const std::vector<AlignmentLink>& all,
                    const std::vector<AlignmentLink>& subset) {
  SpanPair sp = spans_of(subset);
  size_t inside = 0;
  for (const auto& link : all) {
    bool in_src = sp.src.contains(link.src);
    bool in_tgt = sp.tgt.contains(link.tgt);
    if (in_src != in_tgt) return false;
    if (in_src) ++inside;
  }
  return inside == subset.size();
}

// ------------------------------------------------------------- criterion 1

bool criterion1(std::string& detail) {
  auto start = Clock::now();
  OracleBounds bounds;
  bounds.max_links = 16;
  for (uint32_t mask = 0; mask < (1u << 16); ++mask) {
    AlignmentSet set(grid_links(mask));
    auto fast = extract_chunks_align(set);
    auto slow = oracle_minimal_blocks(set, bounds);
    if (!(fast == slow)) {
      detail = "partition differs from the oracle at mask " +
               std::to_string(mask);
      return false;
    }
  }
  double secs = seconds_since(start);
  if (secs >= 60.0) {
    detail = "agreed on all subsets but took " + std::to_string(secs) + "s";
    return false;
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "closure equals the oracle on all 65536 4x4 subsets in %.1fs",
                secs);
  detail = buf;
  return true;
}

// ------------------------------------------------------------- criterion 2

bool criterion2(std::string& detail) {
  SplitMix64 rng(7);
  std::vector<AlignmentLink> s_half, t_half;
  for (int trial = 0; trial < 10000; ++trial) {
    uint32_t src_len = 1 + static_cast<uint32_t>(rng.below(10));
    uint32_t tgt_len = 1 + static_cast<uint32_t>(rng.below(10));
    auto set = testutil::random_alignment(rng, src_len, tgt_len, 15);
    auto partition = extract_chunks_align(set);

    std::vector<AlignmentLink> covered;
    for (const auto& group : partition.groups) {
      covered.insert(covered.end(), group.links.begin(), group.links.end());
    }
    std::sort(covered.begin(), covered.end());
    if (covered != set.links()) {
      detail = "groups do not partition the links at trial " +
               std::to_string(trial);
      return false;
    }

    for (const auto& group : partition.groups) {
      if (!closed_against(set.links(), group.links)) {
        detail = "group not closed at trial " + std::to_string(trial);
        return false;
      }
      auto sp = spans_of(group.links);
      if (!(sp.src == group.src) || !(sp.tgt == group.tgt)) {
        detail = "group spans not tight at trial " + std::to_string(trial);
        return false;
      }
      size_t m = group.links.size();
      if (m < 2 || m > 20) continue;
      // Try every split with link 0 pinned to one side; a group is minimal
      // exactly when no split gives two consistent blocks.
      for (uint32_t sub = 0; sub + 1 < (1u << (m - 1)); ++sub) {
        s_half.clear();
        t_half.clear();
        s_half.push_back(group.links[0]);
        for (size_t i = 1; i < m; ++i) {
          ((sub >> (i - 1)) & 1 ? s_half : t_half).push_back(group.links[i]);
        }
        if (closed_against(set.links(), s_half) &&
            closed_against(set.links(), t_half)) {
          detail = "group splits into two blocks at trial " +
                   std::to_string(trial);
          return false;
        }
      }
    }
  }
  detail = "10000 random alignments: groups closed, tight, and unsplittable";
  return true;
}

// ------------------------------------------------------------- criterion 3

bool criterion3(std::string& detail) {
  Checker check;

  AlignmentSet two_blocks({{0, 0}, {0, 1}, {2, 2}, {2, 3}});
  check.close("chunk score of two 2-link blocks",
              *score_chunk_align(two_blocks, 0.5), 1.0);
  for (uint32_t n = 1; n <= 6; ++n) {
    std::vector<AlignmentLink> diag;
    for (uint32_t i = 0; i < n; ++i) diag.push_back({i, i});
    check.close("chunk score of diagonal " + std::to_string(n),
                *score_chunk_align(AlignmentSet(std::move(diag)), 0.5),
                std::pow(static_cast<double>(n), -0.5));
  }

  NgramModel uniform(1);
  uniform.add({"a", "b", "c", "d"});
  check.close("lm chunk score of a single token",
              *score_chunk_lm({"a"}, uniform, 0.5), 1.0);
  check.close("lm chunk score of 16 uniform tokens",
              *score_chunk_lm(Sentence(16, "a"), uniform, 0.5), 4.0);
  std::vector<double> steps{-1, -1, -1, -2, -2, -2, -3, -3, -3};
  check.close("external chunk score with three spans",
              *score_chunk_lm_external(Sentence(9, "w"), steps, 0.5), 1.0);

  AlignmentSet diagonal({{0, 0}, {1, 1}, {2, 2}});
  for (uint32_t k : kDiagnosticOffsets) {
    check.that("mono score of a diagonal at k=" + std::to_string(k),
               *score_mono(diagonal, k, 0.5) == 0.0);
  }
  check.close("mono score of one anticipating link",
              *score_mono(AlignmentSet({{5, 1}}), 3, 0.5), 1.0);
  AlignmentSet four({{0, 0}, {1, 1}, {2, 2}, {5, 1}});
  check.close("mono score with one anticipation in four links",
              *score_mono(four, 3, 0.5), 0.0625);
  check.close("mono score at alpha 1 is the anticipation rate",
              *score_mono(four, 3, 1.0), 0.25);

  auto unigram_table = UnigramTable::train({{"a", "a", "a", "a", "b"}});
  check.close("smoothed unigram probability", unigram_table.prob("b"), 0.25);
  check.close("rarity score of four rare tokens",
              *score_rarity(Sentence(4, "b"), unigram_table, 0.5),
              2.772588722239781);
  check.close("rarity score at alpha 1 is the mean negative log prob",
              *score_rarity(Sentence(4, "b"), unigram_table, 1.0),
              -std::log(0.25));

  TranslationTable counts;
  {
    ParallelRecord r;
    r.source = {"e"};
    r.target = Sentence{"A"};
    r.alignment = AlignmentSet({{0, 0}});
    counts.add(r);
    r.target = Sentence{"B"};
    counts.add(r);
    r.source = {"sure"};
    r.target = Sentence{"T"};
    counts.add(r);
  }
  auto entropies = EntropyTable::from_counts(counts);
  check.close("entropy of a 50/50 translation choice", entropies.entropy("e"),
              std::log(2.0));
  check.that("entropy of a deterministic translation",
             entropies.entropy("sure") == 0.0);
  check.close("uncertainty score of one binary-choice token",
              *score_uncertainty({"e"}, entropies, 0.5), std::log(2.0));
  check.close("uncertainty score with an unknown token",
              *score_uncertainty({"e", "mystery"}, entropies, 0.5),
              0.49012907173427356);

  TranslationTable skew_counts;
  {
    ParallelRecord r;
    r.source = {"z"};
    r.target = Sentence{"Z1"};
    r.alignment = AlignmentSet({{0, 0}});
    for (int i = 0; i < 3; ++i) skew_counts.add(r);
    r.target = Sentence{"Z2"};
    skew_counts.add(r);
  }
  check.close("entropy of a 3-to-1 translation choice",
              EntropyTable::from_counts(skew_counts).entropy("z"),
              0.5623351446188083);

  check.that("visible prefix at the first step", visible_prefix_len(1, 3, 10) == 3);
  check.that("visible prefix clamps to the sentence",
             visible_prefix_len(20, 3, 10) == 10);

  DiagnosticsAccumulator diag_acc;
  for (int i = 0; i < 3; ++i) {
    ParallelRecord r;
    r.source = Sentence(3, "s");
    r.target = Sentence(3, "t");
    r.alignment = AlignmentSet({{0, 0}, {1, 1}, {2, 2}});
    diag_acc.add(r);
  }
  auto report = diag_acc.finish();
  for (size_t slot = 0; slot < kDiagnosticOffsets.size(); ++slot) {
    check.that("diagonal anticipation rate at slot " + std::to_string(slot),
               *report.anticipation_rate[slot] == 0.0);
    check.that("diagonal hallucination rate at slot " + std::to_string(slot),
               *report.hallucination_rate[slot] == 0.0);
  }
  check.close("diagonal links per chunk", *report.mean_links_per_chunk, 1.0);

  DiagnosticsAccumulator far_acc;
  {
    ParallelRecord r;
    r.source = Sentence(6, "s");
    r.target = Sentence(2, "t");
    r.alignment = AlignmentSet({{0, 0}, {5, 1}});
    far_acc.add(r);
  }
  auto far = far_acc.finish();
  check.close("hallucination of a distant link at k=1",
              *far.hallucination_rate[0], 0.5);
  check.close("hallucination of a distant link at k=3",
              *far.hallucination_rate[1], 0.5);
  check.that("distant link grounded at k=5", *far.hallucination_rate[2] == 0.0);

  NgramModel tri(3);
  tri.add({"a", "b"});
  check.that("seen unigram after begin-of-sentence scores zero",
             tri.prefix_avg_log_prob(std::vector<std::string>{"a"}) == 0.0);
  check.that("seen bigram after begin-of-sentence scores zero",
             tri.prefix_avg_log_prob(std::vector<std::string>{"a", "b"}) ==
                 0.0);
  check.close("double backoff charges lambda twice",
              tri.prefix_avg_log_prob(std::vector<std::string>{"b"}),
              std::log(0.16));
  check.close("unknown word backs off to the smoothed unigram",
              tri.prefix_avg_log_prob(std::vector<std::string>{"zz"}),
              std::log(0.08));
  NgramModel uni(1);
  uni.add({"a"});
  check.close("order-1 model scores with the smoothed unigram",
              uni.prefix_avg_log_prob(std::vector<std::string>{"a"}),
              std::log(2.0 / 3.0));

  if (!check.passed()) {
    detail = check.detail();
    return false;
  }
  detail = std::to_string(check.checks()) +
           " analytic examples within relative 1e-9";
  return true;
}

// ------------------------------------------------------------- criterion 4

bool criterion4(std::string& detail) {
  Checker check;

  // Same links-per-chunk ratio, twice the length: score must drop.
  AlignmentSet short_two({{0, 0}, {0, 1}, {2, 2}, {2, 3}});
  AlignmentSet long_four({{0, 0}, {0, 1}, {2, 2}, {2, 3}, {4, 4}, {4, 5},
                          {6, 6}, {6, 7}});
  double s_short = *score_chunk_align(short_two, 0.5);
  double s_long = *score_chunk_align(long_four, 0.5);
  check.close("short chunk score", s_short, 1.0);
  check.close("long chunk score", s_long, std::sqrt(8.0) / 4.0);
  check.that("longer sentence scores strictly lower at equal density",
             s_long < s_short);

  // Same anticipation rate, twice the links: score must drop.
  AlignmentSet sparse({{5, 0}, {0, 1}});
  AlignmentSet dense({{5, 0}, {6, 1}, {0, 2}, {1, 3}});
  double m_sparse = *score_mono(sparse, 3, 0.5);
  double m_dense = *score_mono(dense, 3, 0.5);
  check.close("sparse anticipation rate", *score_mono(sparse, 3, 1.0), 0.5);
  check.close("dense anticipation rate", *score_mono(dense, 3, 1.0), 0.5);
  check.close("sparse mono score", m_sparse, 0.25);
  check.close("dense mono score", m_dense, 0.125);
  check.that("denser sentence scores strictly lower at equal rate",
             m_dense < m_sparse);

  // Doubling a sentence multiplies rarity by sqrt(2) at alpha 0.5.
  auto table = UnigramTable::train({{"a", "a", "a", "a", "b"}});
  double r4 = *score_rarity(Sentence(4, "b"), table, 0.5);
  double r8 = *score_rarity(Sentence(8, "b"), table, 0.5);
  check.close("duplicated sentence rarity", r8, r4 * std::sqrt(2.0));
  check.that("longer sentence scores strictly higher rarity", r8 > r4);

  if (!check.passed()) {
    detail = check.detail();
    return false;
  }
  detail = "length bias favors longer sentences on all three families";
  return true;
}

// ------------------------------------------------------------- criterion 5

bool criterion5(std::string& detail) {
  SplitMix64 rng(31);
  for (int corpus = 0; corpus < 1000; ++corpus) {
    DiagnosticsAccumulator acc;
    for (int line = 0; line < 20; ++line) {
      uint32_t src_len = 1 + static_cast<uint32_t>(rng.below(9));
      uint32_t tgt_len = 1 + static_cast<uint32_t>(rng.below(9));
      ParallelRecord record;
      record.source = Sentence(src_len, "s");
      record.target = Sentence(tgt_len, "t");
      record.alignment = testutil::random_alignment(rng, src_len, tgt_len, 12);
      acc.add(record);
    }
    auto report = acc.finish();
    for (size_t slot = 1; slot < kDiagnosticOffsets.size(); ++slot) {
      if (report.anticipation_rate[slot] &&
          *report.anticipation_rate[slot] >
              *report.anticipation_rate[slot - 1]) {
        detail = "anticipation rate rose with k in corpus " +
                 std::to_string(corpus);
        return false;
      }
      if (report.hallucination_rate[slot] &&
          *report.hallucination_rate[slot] >
              *report.hallucination_rate[slot - 1]) {
        detail = "hallucination rate rose with k in corpus " +
                 std::to_string(corpus);
        return false;
      }
    }
  }
  detail = "both sweep statistics non-increasing in k over 1000 corpora";
  return true;
}

// ------------------------------------------------------------- criterion 6

void write_synthetic_corpus(const std::string& src_path,
                            const std::string& tgt_path,
                            const std::string& aln_path, uint64_t lines,
                            uint64_t len_lo, uint64_t len_span, uint64_t vocab,
                            uint64_t seed) {
  SplitMix64 rng(seed);
  std::ofstream src(src_path, std::ios::binary);
  std::ofstream tgt(tgt_path, std::ios::binary);
  std::ofstream aln(aln_path, std::ios::binary);
  std::string line;
  for (uint64_t i = 0; i < lines; ++i) {
    uint64_t src_len = len_lo + rng.below(len_span);
    uint64_t tgt_len = len_lo + rng.below(len_span);
    line.clear();
    for (uint64_t j = 0; j < src_len; ++j) {
      if (j > 0) line += ' ';
      line += 'w';
      line += std::to_string(rng.below(vocab));
    }
    line += '\n';
    src << line;
    line.clear();
    for (uint64_t j = 0; j < tgt_len; ++j) {
      if (j > 0) line += ' ';
      line += 'v';
      line += std::to_string(rng.below(vocab));
    }
    line += '\n';
    tgt << line;
    line.clear();
    if (i % 10 != 9) {
      // Mostly monotone links with small jitter; some source tokens drop out.
      bool first = true;
      for (uint64_t s = 0; s < src_len; ++s) {
        if (rng.below(5) == 0) continue;
        uint64_t base = s * tgt_len / src_len + rng.below(3);
        uint64_t t = std::min(base > 0 ? base - 1 : 0, tgt_len - 1);
        if (!first) line += ' ';
        line += std::to_string(s);
        line += '-';
        line += std::to_string(t);
        first = false;
      }
    }
    line += '\n';
    aln << line;
  }
  if (!src.flush() || !tgt.flush() || !aln.flush()) {
    throw Error(ErrorCategory::io, "failed writing the synthetic corpus");
  }
}

std::string quote_arg(const std::string& s) { return "'" + s + "'"; }

bool criterion6(std::string& detail) {
  testutil::TempDir dir;
  auto src = dir.file("synth.src");
  auto tgt = dir.file("synth.tgt");
  auto aln = dir.file("synth.aln");
  write_synthetic_corpus(src, tgt, aln, 10000, 3, 10, 50, 12345);

  auto run = [&detail](const std::string& args) {
    auto result = testutil::run_cli(args);
    if (result.exit_code != 0) {
      detail = "CLI failed (" + std::to_string(result.exit_code) + "): " +
               result.output.substr(0, 200);
      return false;
    }
    return true;
  };

  std::string shared = " --source " + quote_arg(src) + " --target " +
                       quote_arg(tgt) + " --align " + quote_arg(aln);
  auto chunk_path = dir.file("chunk.tsv");
  auto mono_path = dir.file("mono.tsv");
  if (!run("score --metric chunk-align" + shared + " --out " +
           quote_arg(chunk_path))) {
    return false;
  }
  if (!run("score --metric mono" + shared + " --out " + quote_arg(mono_path))) {
    return false;
  }

  auto sel_path = dir.file("combined.sel");
  std::string sample_cmd = "sample --combined --chunk-scores " +
                           quote_arg(chunk_path) + " --mono-scores " +
                           quote_arg(mono_path) + " --n 1000 --ratio 1.6 --out ";
  if (!run(sample_cmd + quote_arg(sel_path))) return false;

  std::ifstream sel_in(sel_path, std::ios::binary);
  auto selection = read_selection(sel_in, sel_path);
  if (selection.indices.size() != 1000) {
    detail = "selected " + std::to_string(selection.indices.size()) +
             " indices, want 1000";
    return false;
  }
  for (size_t i = 1; i < selection.indices.size(); ++i) {
    if (selection.indices[i] <= selection.indices[i - 1]) {
      detail = "selection indices not strictly ascending";
      return false;
    }
  }
  if (selection.indices.back() >= 10000) {
    detail = "selection index out of corpus range";
    return false;
  }

  std::ifstream chunk_in(chunk_path, std::ios::binary);
  auto chunk = read_score_file(chunk_in, chunk_path);
  std::ifstream mono_in(mono_path, std::ios::binary);
  auto mono = read_score_file(mono_in, mono_path);
  auto expected =
      combined_select(chunk.records, mono.records, 1000, parse_ratio("1.6"));
  if (selection.indices != expected) {
    detail = "selection differs from the in-process pipeline";
    return false;
  }
  auto stage1 = select_top(chunk.records, 1600, Direction::lower);
  if (!std::includes(stage1.begin(), stage1.end(), selection.indices.begin(),
                     selection.indices.end())) {
    detail = "selection is not a subset of the 1600-record stage 1";
    return false;
  }

  auto sel2_path = dir.file("combined2.sel");
  if (!run(sample_cmd + quote_arg(sel2_path))) return false;
  if (testutil::read_file(sel2_path) != testutil::read_file(sel_path)) {
    detail = "rerunning the sampler changed the selection bytes";
    return false;
  }

  auto chunk_bytes = testutil::read_file(chunk_path);
  for (unsigned workers : {1u, 4u, 8u}) {
    auto path = dir.file("chunk.w" + std::to_string(workers) + ".tsv");
    if (!run("score --metric chunk-align" + shared + " --workers " +
             std::to_string(workers) + " --out " + quote_arg(path))) {
      return false;
    }
    if (testutil::read_file(path) != chunk_bytes) {
      detail = "worker count " + std::to_string(workers) +
               " changed the score bytes";
      return false;
    }
  }

  detail = "combined CLI selection exact, subset-consistent, and "
           "byte-stable across reruns and worker counts";
  return true;
}

// ------------------------------------------------------------- criterion 7

bool criterion7(std::string& detail) {
  Checker check;
  SplitMix64 rng(83);

  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Sentence> corpus;
    uint64_t sentences = 1 + rng.below(8);
    for (uint64_t s = 0; s < sentences; ++s) {
      Sentence sentence;
      uint64_t len = 1 + rng.below(12);
      for (uint64_t t = 0; t < len; ++t) {
        sentence.push_back("t" + std::to_string(rng.below(9)));
      }
      corpus.push_back(std::move(sentence));
    }
    auto table = UnigramTable::train(corpus);
    double total = table.prob("** never a token **");
    for (auto token : table.tokens()) total += table.prob(token);
    check.close("unigram distribution sums to one", total, 1.0);
  }

  // Every token equally likely: segmentation never splits.
  NgramModel uniform(1);
  uniform.add({"u0", "u1", "u2", "u3", "u4", "u5", "u6", "u7"});
  for (int trial = 0; trial < 50; ++trial) {
    Sentence sentence;
    uint64_t len = 1 + rng.below(20);
    for (uint64_t t = 0; t < len; ++t) {
      sentence.push_back("u" + std::to_string(rng.below(8)));
    }
    check.that("uniform model yields one span",
               segment_lm(sentence, uniform).chunk_count() == 1);
  }

  std::vector<Sentence> train_corpus;
  for (int s = 0; s < 30; ++s) {
    Sentence sentence;
    uint64_t len = 1 + rng.below(10);
    for (uint64_t t = 0; t < len; ++t) {
      sentence.push_back("t" + std::to_string(rng.below(12)));
    }
    train_corpus.push_back(std::move(sentence));
  }
  NgramModel model(3);
  for (const auto& sentence : train_corpus) model.add(sentence);
  for (int trial = 0; trial < 200; ++trial) {
    Sentence sentence;
    uint64_t len = 1 + rng.below(15);
    for (uint64_t t = 0; t < len; ++t) {
      // An out-of-vocabulary token lands in the mix now and then.
      sentence.push_back(rng.below(10) == 0
                             ? "oov"
                             : "t" + std::to_string(rng.below(12)));
    }
    auto segmentation = segment_lm(sentence, model);
    size_t c = segmentation.chunk_count();
    check.that("span count within 1..len", c >= 1 && c <= sentence.size());
    bool covers = !segmentation.spans.empty() &&
                  segmentation.spans.front().begin == 0 &&
                  segmentation.spans.back().end == sentence.size();
    for (size_t i = 1; covers && i < segmentation.spans.size(); ++i) {
      covers = segmentation.spans[i].begin == segmentation.spans[i - 1].end;
    }
    check.that("spans tile the sentence in order", covers);
  }

  std::ostringstream first;
  model.save(first);
  std::istringstream reload_in(first.str());
  auto reloaded = NgramModel::load(reload_in);
  std::ostringstream second;
  reloaded.save(second);
  check.that("model save, load, save round-trips bytes",
             first.str() == second.str());
  for (int trial = 0; trial < 50; ++trial) {
    Sentence prefix;
    uint64_t len = 1 + rng.below(8);
    for (uint64_t t = 0; t < len; ++t) {
      prefix.push_back("t" + std::to_string(rng.below(14)));
    }
    check.that("reloaded model scores bit-identically",
               model.prefix_avg_log_prob(prefix) ==
                   reloaded.prefix_avg_log_prob(prefix));
  }

  std::ostringstream uni_first;
  model.unigram().save(uni_first);
  std::istringstream uni_in(uni_first.str());
  auto uni_reloaded = UnigramTable::load(uni_in);
  std::ostringstream uni_second;
  uni_reloaded.save(uni_second);
  check.that("unigram save, load, save round-trips bytes",
             uni_first.str() == uni_second.str());

  if (!check.passed()) {
    detail = check.detail();
    return false;
  }
  detail = "unigram normalization, segmentation bounds, and bit-exact model "
           "round-trips";
  return true;
}

// ------------------------------------------------------------- criterion 8

bool criterion8(std::string& detail) {
  Checker check;

  std::vector<std::vector<std::optional<double>>> columns{
      {1.0, 2.0, 3.0},
      {1.0, 2.0, 4.0},
  };
  auto matrix = metric_correlations({"x", "y"}, columns);
  check.close("three-point correlation", *matrix.values[0][1],
              0.9819805060619659, kCorrTol);
  check.that("three-point symmetry",
             *matrix.values[0][1] == *matrix.values[1][0]);
  check.close("three-point diagonal", *matrix.values[0][0], 1.0, kCorrTol);

  SplitMix64 rng(17);
  auto uniform = [&rng] {
    return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
  };
  std::vector<std::vector<std::optional<double>>> random_columns(3);
  for (auto& column : random_columns) {
    for (int row = 0; row < 50; ++row) column.push_back(uniform());
  }
  auto random_matrix =
      metric_correlations({"a", "b", "c"}, random_columns);
  for (size_t i = 0; i < 3; ++i) {
    check.close("random diagonal " + std::to_string(i),
                *random_matrix.values[i][i], 1.0, kCorrTol);
    for (size_t j = 0; j < 3; ++j) {
      check.that("random symmetry " + std::to_string(i) + "," +
                     std::to_string(j),
                 *random_matrix.values[i][j] == *random_matrix.values[j][i]);
      check.that("random range " + std::to_string(i) + "," +
                     std::to_string(j),
                 std::abs(*random_matrix.values[i][j]) <= 1.0 + kCorrTol);
    }
  }

  if (!check.passed()) {
    detail = check.detail();
    return false;
  }
  detail = "correlation matrix exact on the hand case, symmetric with unit "
           "diagonal";
  return true;
}

// ------------------------------------------------------------- criterion 9

uint64_t vm_hwm_kb() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      return std::strtoull(line.c_str() + 6, nullptr, 10);
    }
  }
  return 0;
}

bool criterion9(std::string& detail) {
  testutil::TempDir dir;
  {
    struct statvfs fs{};
    if (statvfs(dir.path().c_str(), &fs) == 0) {
      uint64_t free_bytes =
          static_cast<uint64_t>(fs.f_bavail) * fs.f_frsize;
      if (free_bytes < (1ull << 29)) {
        detail = "need 512MiB free in the temp filesystem, have " +
                 std::to_string(free_bytes >> 20) + "MiB";
        return false;
      }
    }
  }

  auto src = dir.file("big.src");
  auto tgt = dir.file("big.tgt");
  auto aln = dir.file("big.aln");
  write_synthetic_corpus(src, tgt, aln, 1000000, 10, 21, 100, 777);

  uint64_t hwm_before = vm_hwm_kb();
  auto start = Clock::now();

  ParallelReader reader(src, tgt, aln);
  auto out_path = dir.file("big.scores");
  std::ofstream out(out_path, std::ios::binary);
  ScoreFileHeader header;
  header.metric = "chunk-align";
  ScoreWriter writer(out, header);
  uint64_t scored = 0;
  map_ordered<std::optional<double>>(
      reader, 0, kDefaultBlockSize,
      [](const ParallelRecord& record) {
        return score_chunk_align(*record.alignment, 0.5);
      },
      [&](uint64_t index, std::optional<double> score) {
        writer.write({index, score});
        ++scored;
      });
  out.flush();

  double secs = seconds_since(start);
  uint64_t hwm_after = vm_hwm_kb();

  if (scored != 1000000) {
    detail = "scored " + std::to_string(scored) + " records, want 1000000";
    return false;
  }
  if (secs > 120.0) {
    detail = "scoring took " + std::to_string(secs) + "s, limit 120s";
    return false;
  }
  uint64_t grew_kb = hwm_after > hwm_before ? hwm_after - hwm_before : 0;
  if (hwm_before > 0 && grew_kb > (256ull << 10)) {
    detail = "peak memory grew " + std::to_string(grew_kb >> 10) +
             "MiB during scoring, limit 256MiB";
    return false;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "1M sentences chunk-scored in %.1fs, peak memory grew %lluMiB",
                secs, static_cast<unsigned long long>(grew_kb >> 10));
  detail = buf;
  return true;
}

using CriterionFn = bool (*)(std::string&);

struct Criterion {
  int number;
  CriterionFn fn;
};

constexpr Criterion kCriteria[] = {
    {1, criterion1}, {2, criterion2}, {3, criterion3},
    {4, criterion4}, {5, criterion5}, {6, criterion6},
    {7, criterion7}, {8, criterion8}, {9, criterion9},
};

}  // namespace

int main(int argc, char** argv) {
  std::string which = argc > 1 ? argv[1] : "all";
  bool all_pass = true;
  bool ran_any = false;
  for (const auto& criterion : kCriteria) {
    if (which != "all" && which != std::to_string(criterion.number)) continue;
    ran_any = true;
    std::string detail;
    bool pass = false;
    try {
      pass = criterion.fn(detail);
    } catch (const std::exception& error) {
      detail = std::string("unexpected error: ") + error.what();
    }
    std::printf("criterion %d: %s (%s)\n", criterion.number,
                pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && pass;
  }
  if (!ran_any) {
    std::fprintf(stderr, "usage: %s [1..9|all]\n", argv[0]);
    return 2;
  }
  return all_pass ? 0 : 1;
}
