#include "simtsel/scoring.hpp"

#include <cmath>
#include <ostream>

#include "simtsel/error.hpp"
#include "text_io.hpp"

namespace simtsel {

std::string_view to_string(Direction direction) {
  return direction == Direction::lower ? "lower" : "higher";
}

Direction parse_direction(std::string_view text) {
  if (text == "lower") return Direction::lower;
  if (text == "higher") return Direction::higher;
  throw Error(ErrorCategory::config,
              "unknown direction '" + std::string(text) +
                  "' (expected lower or higher)");
}

Direction MetricKind::preferred_direction() const {
  switch (family) {
    case Family::chunk_align:
    case Family::chunk_lm:
    case Family::mono:
      return Direction::lower;
    case Family::rarity:
    case Family::uncertainty:
      return Direction::higher;
  }
  throw Error(ErrorCategory::internal, "unhandled metric family");
}

std::string_view MetricKind::name() const {
  switch (family) {
    case Family::chunk_align:
      return "chunk-align";
    case Family::chunk_lm:
      return "chunk-lm";
    case Family::mono:
      return "mono";
    case Family::rarity:
      return "rarity";
    case Family::uncertainty:
      return "uncertainty";
  }
  throw Error(ErrorCategory::internal, "unhandled metric family");
}

MetricKind::Family parse_metric_family(std::string_view name) {
  if (name == "chunk-align") return MetricKind::Family::chunk_align;
  if (name == "chunk-lm") return MetricKind::Family::chunk_lm;
  if (name == "mono") return MetricKind::Family::mono;
  if (name == "rarity") return MetricKind::Family::rarity;
  if (name == "uncertainty") return MetricKind::Family::uncertainty;
  throw Error(ErrorCategory::config,
              "unknown metric '" + std::string(name) +
                  "' (expected chunk-align, chunk-lm, mono, rarity, or "
                  "uncertainty)");
}

void validate_alpha(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw Error(ErrorCategory::config,
                "alpha must be in (0, 1], got " + detail::format_double(alpha));
  }
}

std::optional<double> score_chunk_align(const AlignmentSet& alignment,
                                        double alpha) {
  if (alignment.empty()) return std::nullopt;
  auto partition = extract_chunks_align(alignment);
  return std::pow(static_cast<double>(alignment.size()), alpha) /
         static_cast<double>(partition.chunk_count());
}

std::optional<double> score_chunk_lm(const Sentence& sentence,
                                     const NgramModel& model, double alpha) {
  if (sentence.empty()) return std::nullopt;
  auto segmentation = segment_lm(sentence, model);
  return std::pow(static_cast<double>(sentence.size()), alpha) /
         static_cast<double>(segmentation.chunk_count());
}

std::optional<double> score_chunk_lm_external(
    const Sentence& sentence, std::span<const double> token_scores,
    double alpha) {
  if (sentence.empty()) return std::nullopt;
  if (token_scores.size() != sentence.size()) {
    throw Error(ErrorCategory::mismatch,
                "external scores cover " +
                    detail::format_u64(token_scores.size()) + " tokens, the "
                    "sentence has " + detail::format_u64(sentence.size()));
  }
  auto segmentation = segment_from_scores(token_scores);
  return std::pow(static_cast<double>(sentence.size()), alpha) /
         static_cast<double>(segmentation.chunk_count());
}

std::optional<double> score_mono(const AlignmentSet& alignment, uint32_t k,
                                 double alpha) {
  if (alignment.empty()) return std::nullopt;
  uint64_t anticipations = 0;
  for (const auto& link : alignment.links()) {
    if (static_cast<uint64_t>(link.src) >=
        static_cast<uint64_t>(link.tgt) + k) {
      ++anticipations;
    }
  }
  double denom = std::pow(static_cast<double>(alignment.size()), 1.0 / alpha);
  return static_cast<double>(anticipations) / denom;
}

std::optional<double> score_rarity(const Sentence& sentence,
                                   const UnigramTable& unigram, double alpha) {
  if (sentence.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& token : sentence) sum += unigram.log_prob(token);
  return -sum / std::pow(static_cast<double>(sentence.size()), alpha);
}

std::optional<double> score_uncertainty(const Sentence& sentence,
                                        const EntropyTable& entropies,
                                        double alpha) {
  if (sentence.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& token : sentence) sum += entropies.entropy(token);
  return sum / std::pow(static_cast<double>(sentence.size()), alpha);
}

ScoreWriter::ScoreWriter(std::ostream& out, const ScoreFileHeader& header)
    : out_(out) {
  out_ << "simtsel-scores v=1"
       << "\tmetric=" << header.metric
       << "\talpha=" << detail::format_double(header.alpha)
       << "\tk=" << header.k
       << "\tdirection=" << to_string(header.direction)
       << "\tmodels=" << header.models << "\n";
}

void ScoreWriter::write(const ScoreRecord& record) {
  out_ << record.index << "\t";
  if (record.score) {
    out_ << detail::format_double(*record.score);
  } else {
    out_ << "NA";
  }
  out_ << "\n";
}

ScoreFile read_score_file(std::istream& in, std::string_view what) {
  std::string line = detail::read_line(in, what);
  auto fields = detail::split(line, '\t');
  if (fields.empty() || fields[0] != "simtsel-scores v=1") {
    throw Error(ErrorCategory::parse,
                std::string(what) + ": not a score file (header '" + line +
                    "')");
  }
  ScoreFile file;
  bool saw_metric = false;
  for (size_t i = 1; i < fields.size(); ++i) {
    auto field = fields[i];
    auto eq = field.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCategory::parse, std::string(what) +
                                            ": bad header field '" +
                                            std::string(field) + "'");
    }
    auto key = field.substr(0, eq);
    auto value = field.substr(eq + 1);
    if (key == "metric") {
      file.header.metric = std::string(value);
      saw_metric = true;
    } else if (key == "alpha") {
      file.header.alpha = detail::parse_double(value, what);
    } else if (key == "k") {
      file.header.k = static_cast<uint32_t>(detail::parse_u64(value, what));
    } else if (key == "direction") {
      file.header.direction = parse_direction(value);
    } else if (key == "models") {
      file.header.models = std::string(value);
    } else {
      throw Error(ErrorCategory::parse, std::string(what) +
                                            ": unknown header field '" +
                                            std::string(key) + "'");
    }
  }
  if (!saw_metric) {
    throw Error(ErrorCategory::parse,
                std::string(what) + ": header missing the metric field");
  }
  uint64_t expected_index = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() != 2) {
      throw Error(ErrorCategory::parse,
                  std::string(what) + ": bad score line '" + line + "'");
    }
    ScoreRecord record;
    record.index = detail::parse_u64(cols[0], what);
    if (record.index != expected_index) {
      throw Error(ErrorCategory::parse,
                  std::string(what) + ": record indices must be 0,1,2,...; "
                      "got " + std::string(cols[0]) + " after " +
                      detail::format_u64(expected_index) + " records");
    }
    ++expected_index;
    if (cols[1] != "NA") record.score = detail::parse_double(cols[1], what);
    file.records.push_back(record);
  }
  return file;
}

}  // namespace simtsel
