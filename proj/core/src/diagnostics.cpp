#include "simtsel/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "simtsel/chunking.hpp"
#include "simtsel/error.hpp"
#include "text_io.hpp"

namespace simtsel {

uint64_t visible_prefix_len(uint64_t t, uint64_t k, uint64_t src_len) {
  return std::min(k + t - 1, src_len);
}

void DiagnosticsAccumulator::add(const ParallelRecord& record) {
  if (!record.alignment || !record.target) {
    throw Error(ErrorCategory::config,
                "record " + detail::format_u64(record.index) +
                    ": diagnostics need targets and alignments");
  }
  ++sentences_;
  source_tokens_ += record.source.size();
  const auto& alignment = *record.alignment;
  links_ += alignment.size();

  for (const auto& link : alignment.links()) {
    for (size_t slot = 0; slot < kDiagnosticOffsets.size(); ++slot) {
      if (static_cast<uint64_t>(link.src) >=
          static_cast<uint64_t>(link.tgt) + kDiagnosticOffsets[slot]) {
        ++anticipations_[slot];
      }
    }
  }

  if (alignment.empty()) {
    ++chunk_skipped_;
  } else {
    auto partition = extract_chunks_align(alignment);
    chunk_sum_ += static_cast<double>(alignment.size()) /
                  static_cast<double>(partition.chunk_count());
    ++chunk_sentences_;
  }

  const Sentence& target = *record.target;
  target_tokens_ += target.size();
  if (target.empty()) {
    ++hallucination_skipped_;
    return;
  }
  // Leftmost linked source index per target position; a word is hallucinated
  // at offset k exactly when that index is outside the visible prefix.
  constexpr uint32_t kUnlinked = UINT32_MAX;
  std::vector<uint32_t> leftmost(target.size(), kUnlinked);
  for (const auto& link : alignment.links()) {
    if (link.tgt >= target.size()) {
      throw Error(ErrorCategory::bounds,
                  "record " + detail::format_u64(record.index) +
                      ": link outside the target sentence");
    }
    leftmost[link.tgt] = std::min(leftmost[link.tgt], link.src);
  }
  for (size_t slot = 0; slot < kDiagnosticOffsets.size(); ++slot) {
    uint64_t k = kDiagnosticOffsets[slot];
    uint64_t hallucinated = 0;
    for (size_t j = 0; j < target.size(); ++j) {
      uint64_t visible = visible_prefix_len(j + 1, k, record.source.size());
      if (leftmost[j] == kUnlinked || leftmost[j] >= visible) ++hallucinated;
    }
    hallucination_sum_[slot] += static_cast<double>(hallucinated) /
                                static_cast<double>(target.size());
  }
  ++hallucination_sentences_;
}

void DiagnosticsAccumulator::merge(const DiagnosticsAccumulator& other) {
  sentences_ += other.sentences_;
  source_tokens_ += other.source_tokens_;
  target_tokens_ += other.target_tokens_;
  links_ += other.links_;
  for (size_t i = 0; i < anticipations_.size(); ++i) {
    anticipations_[i] += other.anticipations_[i];
  }
  chunk_sum_ += other.chunk_sum_;
  chunk_sentences_ += other.chunk_sentences_;
  chunk_skipped_ += other.chunk_skipped_;
  for (size_t i = 0; i < hallucination_sum_.size(); ++i) {
    hallucination_sum_[i] += other.hallucination_sum_[i];
  }
  hallucination_sentences_ += other.hallucination_sentences_;
  hallucination_skipped_ += other.hallucination_skipped_;
}

DiagnosticsReport DiagnosticsAccumulator::finish() const {
  DiagnosticsReport report;
  report.sentences = sentences_;
  report.source_tokens = source_tokens_;
  report.target_tokens = target_tokens_;
  report.links = links_;
  if (links_ > 0) {
    double sum = 0.0;
    for (size_t i = 0; i < anticipations_.size(); ++i) {
      double rate = static_cast<double>(anticipations_[i]) /
                    static_cast<double>(links_);
      report.anticipation_rate[i] = rate;
      sum += rate;
    }
    report.mean_anticipation =
        sum / static_cast<double>(kDiagnosticOffsets.size());
  }
  report.chunk_sentences = chunk_sentences_;
  report.chunk_skipped = chunk_skipped_;
  if (chunk_sentences_ > 0) {
    report.mean_links_per_chunk =
        chunk_sum_ / static_cast<double>(chunk_sentences_);
  }
  report.hallucination_sentences = hallucination_sentences_;
  report.hallucination_skipped = hallucination_skipped_;
  if (hallucination_sentences_ > 0) {
    for (size_t i = 0; i < hallucination_sum_.size(); ++i) {
      report.hallucination_rate[i] =
          hallucination_sum_[i] / static_cast<double>(hallucination_sentences_);
    }
  }
  return report;
}

namespace {

nlohmann::ordered_json optional_json(const std::optional<double>& value) {
  if (!value) return nullptr;
  return *value;
}

nlohmann::ordered_json per_offset_json(
    const std::array<std::optional<double>, 5>& values) {
  nlohmann::ordered_json obj;
  for (size_t i = 0; i < kDiagnosticOffsets.size(); ++i) {
    obj["k" + std::to_string(kDiagnosticOffsets[i])] = optional_json(values[i]);
  }
  return obj;
}

}  // namespace

std::string report_json(
    const DiagnosticsReport& report,
    const std::vector<std::pair<std::string, std::string>>& run_info) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json run;
  for (const auto& [key, value] : run_info) run[key] = value;
  doc["run"] = std::move(run);
  doc["counts"] = {
      {"sentences", report.sentences},
      {"source_tokens", report.source_tokens},
      {"target_tokens", report.target_tokens},
      {"links", report.links},
  };
  doc["anticipation"] = {
      {"aggregation", "micro"},
      {"rate", per_offset_json(report.anticipation_rate)},
      {"mean", optional_json(report.mean_anticipation)},
  };
  doc["chunk_length"] = {
      {"mean_links_per_chunk", optional_json(report.mean_links_per_chunk)},
      {"sentences", report.chunk_sentences},
      {"skipped_empty_alignment", report.chunk_skipped},
  };
  doc["hallucination"] = {
      {"aggregation", "macro"},
      {"rate", per_offset_json(report.hallucination_rate)},
      {"sentences", report.hallucination_sentences},
      {"skipped_empty_target", report.hallucination_skipped},
  };
  return doc.dump(2) + "\n";
}

CorrelationMatrix metric_correlations(
    const std::vector<std::string>& names,
    const std::vector<std::vector<std::optional<double>>>& columns) {
  if (names.size() != columns.size() || names.empty()) {
    throw Error(ErrorCategory::config,
                "need one name per score column, got " +
                    detail::format_u64(names.size()) + " names and " +
                    detail::format_u64(columns.size()) + " columns");
  }
  size_t rows = columns[0].size();
  for (const auto& column : columns) {
    if (column.size() != rows) {
      throw Error(ErrorCategory::mismatch,
                  "score columns have different lengths");
    }
  }

  CorrelationMatrix result;
  result.names = names;
  std::vector<std::vector<double>> kept(columns.size());
  for (size_t row = 0; row < rows; ++row) {
    bool complete = true;
    for (const auto& column : columns) {
      if (!column[row]) {
        complete = false;
        break;
      }
    }
    if (!complete) {
      ++result.rows_dropped;
      continue;
    }
    for (size_t c = 0; c < columns.size(); ++c) {
      kept[c].push_back(*columns[c][row]);
    }
    ++result.rows_used;
  }
  if (result.rows_used < 2) {
    throw Error(ErrorCategory::config,
                "need at least 2 fully scored rows, have " +
                    detail::format_u64(result.rows_used));
  }

  size_t n = columns.size();
  std::vector<double> mean(n, 0.0);
  for (size_t c = 0; c < n; ++c) {
    double sum = 0.0;
    for (double v : kept[c]) sum += v;
    mean[c] = sum / static_cast<double>(result.rows_used);
  }
  std::vector<double> variance(n, 0.0);
  for (size_t c = 0; c < n; ++c) {
    double sum = 0.0;
    for (double v : kept[c]) sum += (v - mean[c]) * (v - mean[c]);
    variance[c] = sum;
  }

  result.values.assign(n, std::vector<std::optional<double>>(n));
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = a; b < n; ++b) {
      if (variance[a] == 0.0 || variance[b] == 0.0) continue;  // stays NA
      double cov = 0.0;
      for (size_t row = 0; row < result.rows_used; ++row) {
        cov += (kept[a][row] - mean[a]) * (kept[b][row] - mean[b]);
      }
      double r = cov / std::sqrt(variance[a] * variance[b]);
      result.values[a][b] = r;
      result.values[b][a] = r;
    }
  }
  return result;
}

std::string correlation_table(const CorrelationMatrix& matrix) {
  size_t width = 10;  // fits "-0.123456"
  for (const auto& name : matrix.names) width = std::max(width, name.size());

  auto pad = [width](std::string_view text) {
    std::string cell(width, ' ');
    std::copy(text.begin(), text.end(),
              cell.begin() + static_cast<long>(width - text.size()));
    return cell;
  };
  auto cell_value = [&](const std::optional<double>& value) {
    if (!value) return pad("NA");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", *value);
    return pad(buf);
  };

  std::string out = pad("");
  for (const auto& name : matrix.names) out += "  " + pad(name);
  out += "\n";
  for (size_t a = 0; a < matrix.names.size(); ++a) {
    out += pad(matrix.names[a]);
    for (size_t b = 0; b < matrix.names.size(); ++b) {
      out += "  " + cell_value(matrix.values[a][b]);
    }
    out += "\n";
  }
  out += "rows used=" + detail::format_u64(matrix.rows_used) +
         " dropped=" + detail::format_u64(matrix.rows_dropped) + "\n";
  return out;
}

std::string correlation_json(
    const CorrelationMatrix& matrix,
    const std::vector<std::pair<std::string, std::string>>& run_info) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json run;
  for (const auto& [key, value] : run_info) run[key] = value;
  doc["run"] = std::move(run);
  doc["metrics"] = matrix.names;
  doc["rows_used"] = matrix.rows_used;
  doc["rows_dropped"] = matrix.rows_dropped;
  nlohmann::ordered_json grid = nlohmann::ordered_json::array();
  for (const auto& row : matrix.values) {
    nlohmann::ordered_json line = nlohmann::ordered_json::array();
    for (const auto& value : row) line.push_back(optional_json(value));
    grid.push_back(std::move(line));
  }
  doc["pearson"] = std::move(grid);
  return doc.dump(2) + "\n";
}

}  // namespace simtsel
