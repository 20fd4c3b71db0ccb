#include "simtsel/corpus.hpp"

#include <algorithm>
#include <charconv>

#include "simtsel/error.hpp"

namespace simtsel {

std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config:    return "config";
    case ErrorCategory::io:        return "io";
    case ErrorCategory::parse:     return "parse";
    case ErrorCategory::mismatch:  return "mismatch";
    case ErrorCategory::bounds:    return "bounds";
    case ErrorCategory::shortfall: return "shortfall";
    case ErrorCategory::internal:  return "internal";
  }
  return "internal";
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config:    return 2;
    case ErrorCategory::io:        return 3;
    case ErrorCategory::parse:     return 4;
    case ErrorCategory::mismatch:  return 5;
    case ErrorCategory::bounds:    return 6;
    case ErrorCategory::shortfall: return 7;
    case ErrorCategory::internal:  return 10;
  }
  return 10;
}

namespace {

// ASCII whitespace except '\n' (lines are already split). Covers stray '\r'
// from CRLF input.
inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

Sentence parse_sentence(std::string_view line) {
  Sentence tokens;
  size_t i = 0;
  const size_t n = line.size();
  while (i < n) {
    while (i < n && is_space(line[i])) ++i;
    const size_t begin = i;
    while (i < n && !is_space(line[i])) ++i;
    if (i > begin) tokens.emplace_back(line.substr(begin, i - begin));
  }
  return tokens;
}

std::string format_sentence(const Sentence& sentence) {
  std::string out;
  for (size_t i = 0; i < sentence.size(); ++i) {
    if (i) out += ' ';
    out += sentence[i];
  }
  return out;
}

AlignmentSet::AlignmentSet(std::vector<AlignmentLink> links)
    : links_(std::move(links)) {
  std::sort(links_.begin(), links_.end());
  links_.erase(std::unique(links_.begin(), links_.end()), links_.end());
}

AlignmentSet parse_alignment_line(std::string_view line) {
  std::vector<AlignmentLink> links;
  size_t i = 0;
  const size_t n = line.size();
  while (i < n) {
    while (i < n && is_space(line[i])) ++i;
    const size_t begin = i;
    while (i < n && !is_space(line[i])) ++i;
    if (i == begin) break;
    const std::string_view item = line.substr(begin, i - begin);
    const size_t dash = item.find('-');
    AlignmentLink link;
    bool ok = dash != std::string_view::npos && dash > 0 && dash + 1 < item.size();
    if (ok) {
      const auto* sb = item.data();
      auto r1 = std::from_chars(sb, sb + dash, link.src);
      auto r2 = std::from_chars(sb + dash + 1, sb + item.size(), link.tgt);
      ok = r1.ec == std::errc() && r1.ptr == sb + dash &&
           r2.ec == std::errc() && r2.ptr == sb + item.size();
    }
    if (!ok) {
      throw Error(ErrorCategory::parse,
                  "malformed alignment item '" + std::string(item) + "'");
    }
    links.push_back(link);
  }
  return AlignmentSet(std::move(links));
}

std::string format_alignment(const AlignmentSet& alignment) {
  std::string out;
  for (size_t i = 0; i < alignment.links().size(); ++i) {
    const auto& link = alignment.links()[i];
    if (i) out += ' ';
    out += std::to_string(link.src);
    out += '-';
    out += std::to_string(link.tgt);
  }
  return out;
}

ParallelReader::ParallelReader(const std::string& source_path,
                               const std::optional<std::string>& target_path,
                               const std::optional<std::string>& align_path,
                               ReaderOptions options)
    : options_(options) {
  if (align_path && !target_path) {
    throw Error(ErrorCategory::config,
                "an alignment file requires a target file (links must be "
                "checked against target lengths)");
  }
  auto open = [](LineFile& file, const std::string& path) {
    file.path = path;
    file.in.open(path, std::ios::binary);
    if (!file.in) {
      throw Error(ErrorCategory::io, "cannot open '" + path + "'");
    }
  };
  open(source_, source_path);
  if (target_path) open(target_.emplace(), *target_path);
  if (align_path) open(align_.emplace(), *align_path);
}

bool ParallelReader::read_line(LineFile& file, std::string& line) {
  if (!std::getline(file.in, line)) return false;
  if (line.size() > options_.max_line_bytes) {
    throw Error(ErrorCategory::bounds,
                file.path + " line " + std::to_string(next_index_ + 1) +
                    ": exceeds byte cap (" + std::to_string(line.size()) +
                    " > " + std::to_string(options_.max_line_bytes) + ")");
  }
  return true;
}

std::optional<ParallelRecord> ParallelReader::next() {
  const bool have_source = read_line(source_, source_line_);
  if (!have_source) {
    // Source is exhausted; any remaining line in a sibling file is a
    // line-count mismatch.
    std::string extra;
    if (target_ && read_line(*target_, extra)) {
      throw Error(ErrorCategory::mismatch,
                  "line " + std::to_string(next_index_ + 1) + ": " +
                      target_->path + " has more lines than " + source_.path);
    }
    if (align_ && read_line(*align_, extra)) {
      throw Error(ErrorCategory::mismatch,
                  "line " + std::to_string(next_index_ + 1) + ": " +
                      align_->path + " has more lines than " + source_.path);
    }
    return std::nullopt;
  }

  ParallelRecord record;
  record.index = next_index_;
  record.source = parse_sentence(source_line_);

  if (target_) {
    if (!read_line(*target_, target_line_)) {
      throw Error(ErrorCategory::mismatch,
                  "line " + std::to_string(next_index_ + 1) + ": " +
                      target_->path + " ended before " + source_.path);
    }
    record.target = parse_sentence(target_line_);
  }
  if (align_) {
    if (!read_line(*align_, align_line_)) {
      throw Error(ErrorCategory::mismatch,
                  "line " + std::to_string(next_index_ + 1) + ": " +
                      align_->path + " ended before " + source_.path);
    }
    try {
      record.alignment = parse_alignment_line(align_line_);
    } catch (const Error& e) {
      throw Error(ErrorCategory::parse,
                  align_->path + " line " + std::to_string(next_index_ + 1) +
                      ": " + e.what());
    }
    for (const auto& link : record.alignment->links()) {
      if (link.src >= record.source.size() ||
          link.tgt >= record.target->size()) {
        throw Error(ErrorCategory::bounds,
                    "record " + std::to_string(next_index_) +
                        ": alignment link " + std::to_string(link.src) + "-" +
                        std::to_string(link.tgt) +
                        " out of bounds (source length " +
                        std::to_string(record.source.size()) +
                        ", target length " +
                        std::to_string(record.target->size()) + ")");
      }
    }
  }

  ++next_index_;
  return record;
}

uint64_t count_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCategory::io, "cannot open '" + path + "'");
  }
  uint64_t lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  return lines;
}

}  // namespace simtsel
