#ifndef SIMTSEL_CORPUS_HPP
#define SIMTSEL_CORPUS_HPP

#include <compare>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace simtsel {

// A tokenized sentence: whitespace-split fields of one corpus line. Tokens
// never contain whitespace, so joining with single spaces round-trips.
using Sentence = std::vector<std::string>;

Sentence parse_sentence(std::string_view line);
std::string format_sentence(const Sentence& sentence);

// One alignment link in 0-based token indices.
struct AlignmentLink {
  uint32_t src = 0;
  uint32_t tgt = 0;
  auto operator<=>(const AlignmentLink&) const = default;
};

// A duplicate-free link set with order-independent equality. Links are kept
// sorted by (src, tgt).
class AlignmentSet {
 public:
  AlignmentSet() = default;
  explicit AlignmentSet(std::vector<AlignmentLink> links);

  const std::vector<AlignmentLink>& links() const { return links_; }
  size_t size() const { return links_.size(); }
  bool empty() const { return links_.empty(); }
  bool operator==(const AlignmentSet&) const = default;

 private:
  std::vector<AlignmentLink> links_;
};

// Parses one "i-j i-j ..." line (fast-align / Pharaoh output). Malformed
// items raise Error(parse) naming the offending item.
AlignmentSet parse_alignment_line(std::string_view line);
std::string format_alignment(const AlignmentSet& alignment);

struct ParallelRecord {
  uint64_t index = 0;  // 0-based corpus line number
  Sentence source;
  std::optional<Sentence> target;
  std::optional<AlignmentSet> alignment;
};

struct ReaderOptions {
  size_t max_line_bytes = 1 << 20;
};

// Streams a source corpus zipped with optional target and alignment files.
// Memory use is one record at a time. Line-count mismatches, oversized lines
// and out-of-bounds links raise Error; empty source lines are passed through
// (scoring layers flag them as unscorable).
class ParallelReader {
 public:
  ParallelReader(const std::string& source_path,
                 const std::optional<std::string>& target_path = std::nullopt,
                 const std::optional<std::string>& align_path = std::nullopt,
                 ReaderOptions options = {});

  std::optional<ParallelRecord> next();

  uint64_t records_read() const { return next_index_; }
  bool has_target() const { return target_.has_value(); }
  bool has_alignment() const { return align_.has_value(); }

 private:
  struct LineFile {
    std::ifstream in;
    std::string path;
  };

  bool read_line(LineFile& file, std::string& line);

  LineFile source_;
  std::optional<LineFile> target_;
  std::optional<LineFile> align_;
  ReaderOptions options_;
  uint64_t next_index_ = 0;
  std::string source_line_;
  std::string target_line_;
  std::string align_line_;
};

// Counts the lines of a text file (used by random sampling and validation).
uint64_t count_lines(const std::string& path);

}  // namespace simtsel

#endif
