#ifndef SIMTSEL_ALIGN_STATS_HPP
#define SIMTSEL_ALIGN_STATS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "simtsel/corpus.hpp"
#include "simtsel/ngram_lm.hpp"

namespace simtsel {

// Per-source-token translation counts harvested from alignment links.
// table[x][y] = number of links pairing source token x with target token y.
class TranslationTable {
 public:
  void add(const ParallelRecord& record);

  uint64_t link_count(std::string_view source, std::string_view target) const;
  uint64_t marginal(std::string_view source) const;
  size_t source_types() const { return table_.size(); }
  uint64_t total_links() const { return total_links_; }
  uint64_t records() const { return records_; }

  // (target, count) rows for one source token, sorted by target token.
  std::vector<std::pair<std::string_view, uint64_t>> distribution(
      std::string_view source) const;
  std::vector<std::string_view> sources() const;  // unsorted

  void save(std::ostream& out) const;
  static TranslationTable load(std::istream& in);

 private:
  detail::StringMap<detail::StringMap<uint64_t>> table_;
  uint64_t total_links_ = 0;
  uint64_t records_ = 0;
};

// Entropy of the per-token translation distribution, natural log. Tokens
// never seen in the table fall back to a configurable default (0 unless
// overridden: unseen words are treated as uninformative, not uncertain).
class EntropyTable {
 public:
  static EntropyTable from_counts(const TranslationTable& table);

  double entropy(std::string_view token) const;
  bool contains(std::string_view token) const;
  size_t size() const { return entropy_.size(); }

  double unknown_entropy() const { return unknown_; }
  void set_unknown_entropy(double value) { unknown_ = value; }

  void save(std::ostream& out) const;
  static EntropyTable load(std::istream& in);

 private:
  detail::StringMap<double> entropy_;
  double unknown_ = 0.0;
};

}  // namespace simtsel

#endif
