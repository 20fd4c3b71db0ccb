#ifndef SIMTSEL_VERSION_HPP
#define SIMTSEL_VERSION_HPP

#include <string_view>

namespace simtsel {

inline constexpr std::string_view kVersion = "1.0.0";

}  // namespace simtsel

#endif
