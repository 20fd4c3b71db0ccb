#ifndef SIMTSEL_SCORING_HPP
#define SIMTSEL_SCORING_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simtsel/align_stats.hpp"
#include "simtsel/chunking.hpp"
#include "simtsel/corpus.hpp"
#include "simtsel/ngram_lm.hpp"

namespace simtsel {

enum class Direction { lower, higher };

std::string_view to_string(Direction direction);
Direction parse_direction(std::string_view text);

// The five selection metrics. Chunk and monotonicity metrics prefer low
// scores (short chunks, few anticipations); rarity and uncertainty prefer
// high scores (rare words, many translation choices).
struct MetricKind {
  enum class Family { chunk_align, chunk_lm, mono, rarity, uncertainty };

  Family family = Family::chunk_align;
  uint32_t k = 3;  // anticipation offset, mono only

  Direction preferred_direction() const;
  std::string_view name() const;
  friend bool operator==(const MetricKind&, const MetricKind&) = default;
};

MetricKind::Family parse_metric_family(std::string_view name);

// The length exponent shared by all metrics; (0, 1], default 0.5. Values
// below 1 bias every metric toward longer sentences at equal per-token
// quality.
void validate_alpha(double alpha);

// All scorers return nullopt when the record cannot be scored (empty
// sentence, empty or missing alignment); such records are reported as NA and
// never selected.
std::optional<double> score_chunk_align(const AlignmentSet& alignment,
                                        double alpha);
std::optional<double> score_chunk_lm(const Sentence& sentence,
                                     const NgramModel& model, double alpha);
std::optional<double> score_chunk_lm_external(
    const Sentence& sentence, std::span<const double> token_scores,
    double alpha);
std::optional<double> score_mono(const AlignmentSet& alignment, uint32_t k,
                                 double alpha);
std::optional<double> score_rarity(const Sentence& sentence,
                                   const UnigramTable& unigram, double alpha);
std::optional<double> score_uncertainty(const Sentence& sentence,
                                        const EntropyTable& entropies,
                                        double alpha);

struct ScoreRecord {
  uint64_t index = 0;
  std::optional<double> score;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

// Score file: one tab-separated header line (format tag, metric, alpha, k,
// direction, model fingerprints), then "index TAB score" with NA for
// unscorable records.
struct ScoreFileHeader {
  std::string metric;
  double alpha = 0.5;
  uint32_t k = 3;
  Direction direction = Direction::lower;
  std::string models = "-";  // comma-joined name:fnv64hex, or "-"
};

class ScoreWriter {
 public:
  ScoreWriter(std::ostream& out, const ScoreFileHeader& header);
  void write(const ScoreRecord& record);

 private:
  std::ostream& out_;
};

struct ScoreFile {
  ScoreFileHeader header;
  std::vector<ScoreRecord> records;
};

ScoreFile read_score_file(std::istream& in, std::string_view what);

}  // namespace simtsel

#endif
