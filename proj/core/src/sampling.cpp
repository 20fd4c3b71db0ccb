#include "simtsel/sampling.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <ostream>
#include <unordered_map>

#include "simtsel/error.hpp"
#include "text_io.hpp"

namespace simtsel {

Ratio parse_ratio(std::string_view text) {
  auto bad = [&](std::string_view why) -> Error {
    return Error(ErrorCategory::config, "bad ratio '" + std::string(text) +
                                            "': " + std::string(why));
  };
  if (text.empty()) throw bad("empty");
  auto dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac =
      dot == std::string_view::npos ? std::string_view() : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) throw bad("no digits");
  for (char c : whole) {
    if (c < '0' || c > '9') throw bad("expected a decimal number");
  }
  for (char c : frac) {
    if (c < '0' || c > '9') throw bad("expected a decimal number");
  }
  if (frac.size() > 9) throw bad("more than 9 fractional digits");

  uint64_t num = 0;
  for (char c : whole) num = num * 10 + static_cast<uint64_t>(c - '0');
  uint64_t den = 1;
  for (char c : frac) {
    num = num * 10 + static_cast<uint64_t>(c - '0');
    den *= 10;
  }
  if (num > (1ull << 40)) throw bad("too large");
  if (num <= den) throw bad("must be greater than 1");
  Ratio ratio;
  ratio.num = num;
  ratio.den = den;
  ratio.text = std::string(text);
  return ratio;
}

uint64_t oversample_size(const Ratio& ratio, uint64_t n) {
  if (n > (UINT64_MAX - (ratio.den - 1)) / ratio.num) {
    throw Error(ErrorCategory::bounds, "oversample size overflows");
  }
  return (ratio.num * n + ratio.den - 1) / ratio.den;
}

namespace {

std::vector<uint64_t> select_top_labeled(std::span<const ScoreRecord> scores,
                                         uint64_t n, Direction direction,
                                         std::string_view stage) {
  std::vector<std::pair<double, uint64_t>> scorable;
  scorable.reserve(scores.size());
  for (const auto& record : scores) {
    if (record.score) scorable.emplace_back(*record.score, record.index);
  }
  if (scorable.size() < n) {
    std::string prefix = stage.empty() ? "" : std::string(stage) + ": ";
    throw Error(ErrorCategory::shortfall,
                prefix + "requested " + detail::format_u64(n) +
                    " records, only " +
                    detail::format_u64(scorable.size()) + " scorable");
  }
  auto better = [direction](const std::pair<double, uint64_t>& a,
                            const std::pair<double, uint64_t>& b) {
    if (a.first != b.first) {
      return direction == Direction::lower ? a.first < b.first
                                           : a.first > b.first;
    }
    return a.second < b.second;
  };
  std::sort(scorable.begin(), scorable.end(), better);
  std::vector<uint64_t> indices;
  indices.reserve(n);
  for (uint64_t i = 0; i < n; ++i) indices.push_back(scorable[i].second);
  std::sort(indices.begin(), indices.end());
  return indices;
}

}  // namespace

std::vector<uint64_t> select_top(std::span<const ScoreRecord> scores,
                                 uint64_t n, Direction direction) {
  if (n < 1) {
    throw Error(ErrorCategory::config, "selection size must be at least 1");
  }
  return select_top_labeled(scores, n, direction, "");
}

std::vector<uint64_t> combined_select(std::span<const ScoreRecord> chunk_scores,
                                      std::span<const ScoreRecord> mono_scores,
                                      uint64_t n, const Ratio& ratio) {
  if (n < 1) {
    throw Error(ErrorCategory::config, "selection size must be at least 1");
  }
  if (chunk_scores.size() != mono_scores.size()) {
    throw Error(ErrorCategory::mismatch,
                "score lists cover " +
                    detail::format_u64(chunk_scores.size()) + " and " +
                    detail::format_u64(mono_scores.size()) + " records");
  }
  for (size_t i = 0; i < chunk_scores.size(); ++i) {
    if (chunk_scores[i].index != mono_scores[i].index) {
      throw Error(ErrorCategory::mismatch,
                  "score lists diverge at position " + detail::format_u64(i));
    }
  }

  uint64_t stage1_n = oversample_size(ratio, n);
  auto stage1 =
      select_top_labeled(chunk_scores, stage1_n, Direction::lower, "stage 1");

  // Stage-1 indices are ascending and both lists share record order, so the
  // matching monotonicity records can be gathered with a forward scan.
  std::vector<ScoreRecord> pool;
  pool.reserve(stage1.size());
  size_t cursor = 0;
  for (uint64_t index : stage1) {
    while (cursor < mono_scores.size() && mono_scores[cursor].index < index) {
      ++cursor;
    }
    pool.push_back(mono_scores[cursor]);
  }
  return select_top_labeled(pool, n, Direction::lower, "stage 2");
}

uint64_t SplitMix64::next() {
  uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

uint64_t SplitMix64::below(uint64_t bound) {
  if (bound <= 1) return 0;
  unsigned bits = 64 - static_cast<unsigned>(std::countl_zero(bound - 1));
  uint64_t mask = bits >= 64 ? ~0ull : (1ull << bits) - 1;
  while (true) {
    uint64_t value = next() & mask;
    if (value < bound) return value;
  }
}

std::vector<uint64_t> random_sample(uint64_t corpus_size, uint64_t n,
                                    uint64_t seed) {
  if (n > corpus_size) {
    throw Error(ErrorCategory::shortfall,
                "requested " + detail::format_u64(n) + " records from a " +
                    detail::format_u64(corpus_size) + " line corpus");
  }
  SplitMix64 rng(seed);
  // Partial Fisher-Yates over a sparse view of [0, corpus_size).
  std::unordered_map<uint64_t, uint64_t> moved;
  auto at = [&](uint64_t pos) {
    auto it = moved.find(pos);
    return it == moved.end() ? pos : it->second;
  };
  std::vector<uint64_t> picked;
  picked.reserve(n);
  for (uint64_t t = 0; t < n; ++t) {
    uint64_t r = t + rng.below(corpus_size - t);
    picked.push_back(at(r));
    moved[r] = at(t);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

void write_selection(std::ostream& out, std::span<const uint64_t> indices,
                     std::span<const std::pair<std::string, std::string>>
                         provenance) {
  out << "simtsel-selection v=1";
  for (const auto& [key, value] : provenance) {
    out << "\t" << key << "=" << value;
  }
  out << "\n";
  for (uint64_t index : indices) out << index << "\n";
}

SelectionFile read_selection(std::istream& in, std::string_view what) {
  std::string line = detail::read_line(in, what);
  auto fields = detail::split(line, '\t');
  if (fields.empty() || fields[0] != "simtsel-selection v=1") {
    throw Error(ErrorCategory::parse,
                std::string(what) + ": not a selection file (header '" + line +
                    "')");
  }
  SelectionFile file;
  for (size_t i = 1; i < fields.size(); ++i) {
    auto eq = fields[i].find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCategory::parse, std::string(what) +
                                            ": bad header field '" +
                                            std::string(fields[i]) + "'");
    }
    file.provenance.emplace_back(std::string(fields[i].substr(0, eq)),
                                 std::string(fields[i].substr(eq + 1)));
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    file.indices.push_back(detail::parse_u64(line, what));
  }
  return file;
}

}  // namespace simtsel
