#include "simtsel/digest.hpp"

#include <fstream>

#include "simtsel/error.hpp"

namespace simtsel {

namespace {

constexpr uint64_t kOffsetBasis = 0xCBF29CE484222325ull;
constexpr uint64_t kPrime = 0x100000001B3ull;

uint64_t mix(uint64_t hash, std::string_view bytes) {
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= kPrime;
  }
  return hash;
}

std::string to_hex(uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

}  // namespace

uint64_t fnv1a64(std::string_view bytes) { return mix(kOffsetBasis, bytes); }

std::string fnv1a64_hex(std::string_view bytes) {
  return to_hex(fnv1a64(bytes));
}

std::string fingerprint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCategory::io,
                "cannot open '" + path.string() + "' for fingerprinting");
  }
  uint64_t hash = kOffsetBasis;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    hash = mix(hash, std::string_view(buffer,
                                      static_cast<size_t>(in.gcount())));
  }
  return to_hex(hash);
}

}  // namespace simtsel
