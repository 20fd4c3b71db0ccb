#ifndef SIMTSEL_DIAGNOSTICS_HPP
#define SIMTSEL_DIAGNOSTICS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simtsel/corpus.hpp"

namespace simtsel {

// Number of source tokens visible when emitting target word t (1-based)
// under a wait-k schedule: min(k + t - 1, src_len).
uint64_t visible_prefix_len(uint64_t t, uint64_t k, uint64_t src_len);

// The wait offsets the report sweeps.
inline constexpr std::array<uint32_t, 5> kDiagnosticOffsets{1, 3, 5, 7, 9};

struct DiagnosticsReport {
  uint64_t sentences = 0;
  uint64_t source_tokens = 0;
  uint64_t target_tokens = 0;
  uint64_t links = 0;

  // Pooled over every link in the corpus (micro average).
  std::array<std::optional<double>, 5> anticipation_rate;
  std::optional<double> mean_anticipation;  // mean of the five rates

  // Mean links-per-chunk over sentences with at least one chunk.
  std::optional<double> mean_links_per_chunk;
  uint64_t chunk_sentences = 0;
  uint64_t chunk_skipped = 0;  // empty alignment

  // Mean of per-sentence hallucination rates (macro average): a target word
  // counts as hallucinated when none of its links reaches a source word
  // visible at its emission step.
  std::array<std::optional<double>, 5> hallucination_rate;
  uint64_t hallucination_sentences = 0;
  uint64_t hallucination_skipped = 0;  // empty target
};

// Per-record statistics with commutative merge; every record must carry an
// alignment (and therefore a target).
class DiagnosticsAccumulator {
 public:
  void add(const ParallelRecord& record);
  void merge(const DiagnosticsAccumulator& other);
  DiagnosticsReport finish() const;

 private:
  uint64_t sentences_ = 0;
  uint64_t source_tokens_ = 0;
  uint64_t target_tokens_ = 0;
  uint64_t links_ = 0;
  std::array<uint64_t, 5> anticipations_{};
  double chunk_sum_ = 0.0;
  uint64_t chunk_sentences_ = 0;
  uint64_t chunk_skipped_ = 0;
  std::array<double, 5> hallucination_sum_{};
  uint64_t hallucination_sentences_ = 0;
  uint64_t hallucination_skipped_ = 0;
};

// JSON rendering; run metadata lands under a "run" key in the given order.
std::string report_json(
    const DiagnosticsReport& report,
    const std::vector<std::pair<std::string, std::string>>& run_info);

struct CorrelationMatrix {
  std::vector<std::string> names;
  // names.size() x names.size(); nullopt marks a zero-variance pairing.
  std::vector<std::vector<std::optional<double>>> values;
  uint64_t rows_used = 0;
  uint64_t rows_dropped = 0;  // rows with any unscorable entry
};

// Pearson correlation over the rows where every column has a score.
CorrelationMatrix metric_correlations(
    const std::vector<std::string>& names,
    const std::vector<std::vector<std::optional<double>>>& columns);

std::string correlation_table(const CorrelationMatrix& matrix);
std::string correlation_json(
    const CorrelationMatrix& matrix,
    const std::vector<std::pair<std::string, std::string>>& run_info);

}  // namespace simtsel

#endif
