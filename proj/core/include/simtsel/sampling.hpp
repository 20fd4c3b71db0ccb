#ifndef SIMTSEL_SAMPLING_HPP
#define SIMTSEL_SAMPLING_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simtsel/scoring.hpp"

namespace simtsel {

// Oversampling ratio kept as an exact fraction of the decimal the user
// typed, so stage sizes never pick up float rounding (1.6 * 5 is a hair
// above 8 in binary; ceil would say 9).
struct Ratio {
  uint64_t num = 1;
  uint64_t den = 1;
  std::string text;  // original spelling, echoed in provenance

  friend bool operator==(const Ratio&, const Ratio&) = default;
};

Ratio parse_ratio(std::string_view text);  // decimal > 1, e.g. "1.6"
uint64_t oversample_size(const Ratio& ratio, uint64_t n);  // ceil(num*n/den)

// Indices of the n best-scoring records under the direction, ties broken by
// smaller index, result in ascending index order. Throws a shortfall error
// when fewer than n records are scorable.
std::vector<uint64_t> select_top(std::span<const ScoreRecord> scores,
                                 uint64_t n, Direction direction);

// Two-stage pipeline: oversample ceil(ratio*n) records by the chunk scores
// (lower preferred), then keep the n best of those by the monotonicity
// scores (lower preferred). Both score lists must cover the same records in
// the same order.
std::vector<uint64_t> combined_select(std::span<const ScoreRecord> chunk_scores,
                                      std::span<const ScoreRecord> mono_scores,
                                      uint64_t n, const Ratio& ratio);

// Uniform sample without replacement, fully determined by the seed. Uses
// SplitMix64 plus a partial Fisher-Yates shuffle, so the same seed gives the
// same indices on every platform. Result in ascending order.
std::vector<uint64_t> random_sample(uint64_t corpus_size, uint64_t n,
                                    uint64_t seed);

class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next();
  // Uniform value in [0, bound) via bitmask rejection; bound >= 1.
  uint64_t below(uint64_t bound);

 private:
  uint64_t state_;
};

// Selection file: one tab-separated header line ("simtsel-selection v=1"
// plus key=value provenance), then one selected index per line, ascending.
void write_selection(std::ostream& out, std::span<const uint64_t> indices,
                     std::span<const std::pair<std::string, std::string>>
                         provenance);

struct SelectionFile {
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<uint64_t> indices;
};

SelectionFile read_selection(std::istream& in, std::string_view what);

}  // namespace simtsel

#endif
