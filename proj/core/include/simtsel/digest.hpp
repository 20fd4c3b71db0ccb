#ifndef SIMTSEL_DIGEST_HPP
#define SIMTSEL_DIGEST_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace simtsel {

// FNV-1a, used to fingerprint model files in score headers so a score file
// records exactly which models produced it.
uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);
std::string fingerprint_file(const std::filesystem::path& path);

}  // namespace simtsel

#endif
