#ifndef SIMTSEL_SRC_TEXT_IO_HPP
#define SIMTSEL_SRC_TEXT_IO_HPP

// Shared helpers for the line-oriented text formats. Doubles go through
// std::to_chars (shortest round-trip form) so files are byte-stable across
// runs; parsing is strict and every failure names the offending line.

#include <charconv>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "simtsel/error.hpp"

namespace simtsel::detail {

inline std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::string format_u64(uint64_t value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCategory::parse,
                std::string(what) + ": bad number '" + std::string(text) + "'");
  }
  return value;
}

inline uint64_t parse_u64(std::string_view text, std::string_view what) {
  uint64_t value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCategory::parse,
                std::string(what) + ": bad count '" + std::string(text) + "'");
  }
  return value;
}

inline std::string read_line(std::istream& in, std::string_view what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCategory::parse,
                std::string(what) + ": unexpected end of input");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline void expect_line(std::istream& in, std::string_view expected,
                        std::string_view what) {
  std::string line = read_line(in, what);
  if (line != expected) {
    throw Error(ErrorCategory::parse, std::string(what) + ": expected '" +
                                          std::string(expected) + "', got '" +
                                          line + "'");
  }
}

// Reads a "key=value" line and returns the value part.
inline std::string read_kv(std::istream& in, std::string_view key,
                           std::string_view what) {
  std::string line = read_line(in, what);
  std::string prefix = std::string(key) + "=";
  if (line.size() < prefix.size() || line.compare(0, prefix.size(), prefix) != 0) {
    throw Error(ErrorCategory::parse, std::string(what) + ": expected '" +
                                          prefix + "...', got '" + line + "'");
  }
  return line.substr(prefix.size());
}

inline uint64_t read_kv_u64(std::istream& in, std::string_view key,
                            std::string_view what) {
  return parse_u64(read_kv(in, key, what), what);
}

inline double read_kv_double(std::istream& in, std::string_view key,
                             std::string_view what) {
  return parse_double(read_kv(in, key, what), what);
}

// Splits on a single delimiter; fields may be empty.
inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace simtsel::detail

#endif
