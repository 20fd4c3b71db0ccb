#ifndef SIMTSEL_NGRAM_LM_HPP
#define SIMTSEL_NGRAM_LM_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "simtsel/corpus.hpp"

namespace simtsel {

namespace detail {

struct StringHash {
  using is_transparent = void;
  size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

struct StringEq {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const noexcept {
    return a == b;
  }
};

template <typename V>
using StringMap = std::unordered_map<std::string, V, StringHash, StringEq>;

}  // namespace detail

// Source-side unigram counts with add-one smoothing:
//   p(x) = (count(x) + 1) / (total + vocab + 1)
// The extra unit of probability mass is the single OOV outcome, so the
// distribution over vocab + OOV sums to 1.
class UnigramTable {
 public:
  void add(const Sentence& sentence);

  uint64_t count(std::string_view token) const;
  uint64_t total() const { return total_; }
  size_t vocab_size() const { return counts_.size(); }
  uint64_t sentences() const { return sentences_; }
  std::vector<std::string_view> tokens() const;  // unsorted

  double prob(std::string_view token) const;
  double log_prob(std::string_view token) const;

  void save(std::ostream& out) const;
  static UnigramTable load(std::istream& in);

  // Convenience for tests and small corpora; throws Error(config) when the
  // corpus is empty.
  static UnigramTable train(const std::vector<Sentence>& corpus);

 private:
  detail::StringMap<uint64_t> counts_;
  uint64_t total_ = 0;
  uint64_t sentences_ = 0;
};

// Count-based n-gram model scored with stupid backoff:
//   P(w | ctx) = count(ctx w) / count(ctx)          if ctx w was seen
//              = lambda * P(w | shortened ctx)      otherwise
// bottoming out at the add-one smoothed unigram. Sentences are padded with a
// single begin-of-sentence marker, so the first word is scored against it.
// Only score ordering matters to the consumers; everything is natural log.
class NgramModel {
 public:
  explicit NgramModel(unsigned order, double backoff = 0.4);

  void add(const Sentence& sentence);

  unsigned order() const { return order_; }
  double backoff() const { return backoff_; }
  uint64_t sentences() const { return sentences_; }
  const UnigramTable& unigram() const { return unigram_; }
  uint64_t ngram_types(unsigned k) const;

  // Average per-token log probability of the prefix, scoring token t against
  // the preceding prefix tokens (begin-of-sentence padded). The restart
  // behaviour of chunk segmentation relies on exactly these semantics.
  double prefix_avg_log_prob(std::span<const std::string> prefix) const;

  void save(std::ostream& out) const;
  static NgramModel load(std::istream& in);

  // Internal token ids; exposed so segmentation can intern a sentence once.
  // Id 0 is the begin-of-sentence marker; unknown tokens map to the shared
  // OOV id (their smoothed probability does not depend on the spelling).
  static constexpr uint32_t kBosId = 0;
  static constexpr uint32_t kUnkId = 1;
  std::vector<uint32_t> intern(std::span<const std::string> tokens) const;
  double cond_log_prob_ids(std::span<const uint32_t> context, uint32_t token) const;
  double oov_log_prob() const;

 private:
  uint64_t lookup(std::string_view key) const;
  uint32_t intern_or_add(const std::string& token);
  void count_ngrams(const std::vector<uint32_t>& padded);

  unsigned order_;
  double backoff_;
  double log_backoff_;
  uint64_t sentences_ = 0;
  UnigramTable unigram_;
  detail::StringMap<uint32_t> vocab_;            // token -> id (>= 2)
  std::vector<const std::string*> id_to_token_;  // id -> token, BOS/UNK null
  detail::StringMap<uint64_t> counts_;           // packed id key -> count
  std::vector<uint64_t> types_per_order_;
};

}  // namespace simtsel

#endif
