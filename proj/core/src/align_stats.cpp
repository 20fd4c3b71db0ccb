#include "simtsel/align_stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "simtsel/error.hpp"
#include "text_io.hpp"

namespace simtsel {

void TranslationTable::add(const ParallelRecord& record) {
  if (!record.target || !record.alignment) {
    throw Error(ErrorCategory::config,
                "record " + detail::format_u64(record.index) +
                    ": translation table needs target and alignment");
  }
  ++records_;
  for (const auto& link : record.alignment->links()) {
    const std::string& src = record.source[link.src];
    const std::string& tgt = (*record.target)[link.tgt];
    ++table_[src][tgt];
    ++total_links_;
  }
}

uint64_t TranslationTable::link_count(std::string_view source,
                                      std::string_view target) const {
  auto row = table_.find(source);
  if (row == table_.end()) return 0;
  auto cell = row->second.find(target);
  return cell == row->second.end() ? 0 : cell->second;
}

uint64_t TranslationTable::marginal(std::string_view source) const {
  auto row = table_.find(source);
  if (row == table_.end()) return 0;
  uint64_t sum = 0;
  for (const auto& [target, count] : row->second) {
    (void)target;
    sum += count;
  }
  return sum;
}

std::vector<std::pair<std::string_view, uint64_t>> TranslationTable::distribution(
    std::string_view source) const {
  std::vector<std::pair<std::string_view, uint64_t>> rows;
  auto row = table_.find(source);
  if (row == table_.end()) return rows;
  rows.reserve(row->second.size());
  for (const auto& [target, count] : row->second) rows.emplace_back(target, count);
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::vector<std::string_view> TranslationTable::sources() const {
  std::vector<std::string_view> out;
  out.reserve(table_.size());
  for (const auto& [source, row] : table_) {
    (void)row;
    out.push_back(source);
  }
  return out;
}

void TranslationTable::save(std::ostream& out) const {
  auto srcs = sources();
  std::sort(srcs.begin(), srcs.end());
  uint64_t pairs = 0;
  for (const auto& [source, row] : table_) {
    (void)source;
    pairs += row.size();
  }
  out << "simtsel-ttable v=1\n";
  out << "records=" << records_ << "\n";
  out << "links=" << total_links_ << "\n";
  out << "pairs=" << pairs << "\n";
  for (auto src : srcs) {
    for (const auto& [tgt, count] : distribution(src)) {
      out << src << "\t" << tgt << "\t" << count << "\n";
    }
  }
}

TranslationTable TranslationTable::load(std::istream& in) {
  constexpr std::string_view what = "translation table";
  detail::expect_line(in, "simtsel-ttable v=1", what);
  TranslationTable table;
  table.records_ = detail::read_kv_u64(in, "records", what);
  uint64_t links = detail::read_kv_u64(in, "links", what);
  uint64_t pairs = detail::read_kv_u64(in, "pairs", what);
  for (uint64_t i = 0; i < pairs; ++i) {
    std::string line = detail::read_line(in, what);
    auto fields = detail::split(line, '\t');
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw Error(ErrorCategory::parse,
                  std::string(what) + ": bad count line '" + line + "'");
    }
    uint64_t count = detail::parse_u64(fields[2], what);
    if (count == 0) {
      throw Error(ErrorCategory::parse,
                  std::string(what) + ": zero count line '" + line + "'");
    }
    auto& cell = table.table_[std::string(fields[0])][std::string(fields[1])];
    if (cell != 0) {
      throw Error(ErrorCategory::parse,
                  std::string(what) + ": duplicate pair line '" + line + "'");
    }
    cell = count;
    table.total_links_ += count;
  }
  if (table.total_links_ != links) {
    throw Error(ErrorCategory::parse,
                std::string(what) + ": counts sum to " +
                    detail::format_u64(table.total_links_) +
                    ", header says " + detail::format_u64(links));
  }
  return table;
}

EntropyTable EntropyTable::from_counts(const TranslationTable& table) {
  EntropyTable result;
  for (auto src : table.sources()) {
    auto rows = table.distribution(src);
    uint64_t marginal = 0;
    for (const auto& [tgt, count] : rows) {
      (void)tgt;
      marginal += count;
    }
    // Sorted target order fixes the summation order, so the value does not
    // depend on hash-map iteration.
    double sum = 0.0;
    for (const auto& [tgt, count] : rows) {
      (void)tgt;
      double p = static_cast<double>(count) / static_cast<double>(marginal);
      sum += p * std::log(p);
    }
    result.entropy_.emplace(std::string(src), sum == 0.0 ? 0.0 : -sum);
  }
  return result;
}

double EntropyTable::entropy(std::string_view token) const {
  auto it = entropy_.find(token);
  return it == entropy_.end() ? unknown_ : it->second;
}

bool EntropyTable::contains(std::string_view token) const {
  return entropy_.find(token) != entropy_.end();
}

void EntropyTable::save(std::ostream& out) const {
  std::vector<std::string_view> tokens;
  tokens.reserve(entropy_.size());
  for (const auto& [token, value] : entropy_) {
    (void)value;
    tokens.push_back(token);
  }
  std::sort(tokens.begin(), tokens.end());
  out << "simtsel-entropy v=1\n";
  out << "types=" << entropy_.size() << "\n";
  for (auto token : tokens) {
    out << token << "\t" << detail::format_double(entropy_.find(token)->second)
        << "\n";
  }
}

EntropyTable EntropyTable::load(std::istream& in) {
  constexpr std::string_view what = "entropy table";
  detail::expect_line(in, "simtsel-entropy v=1", what);
  EntropyTable table;
  uint64_t types = detail::read_kv_u64(in, "types", what);
  for (uint64_t i = 0; i < types; ++i) {
    std::string line = detail::read_line(in, what);
    auto fields = detail::split(line, '\t');
    if (fields.size() != 2 || fields[0].empty()) {
      throw Error(ErrorCategory::parse,
                  std::string(what) + ": bad entropy line '" + line + "'");
    }
    double value = detail::parse_double(fields[1], what);
    if (!(value >= 0.0)) {
      throw Error(ErrorCategory::parse,
                  std::string(what) + ": negative entropy line '" + line + "'");
    }
    auto [it, fresh] = table.entropy_.emplace(std::string(fields[0]), value);
    (void)it;
    if (!fresh) {
      throw Error(ErrorCategory::parse,
                  std::string(what) + ": duplicate token line '" + line + "'");
    }
  }
  return table;
}

}  // namespace simtsel
