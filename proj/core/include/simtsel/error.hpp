#ifndef SIMTSEL_ERROR_HPP
#define SIMTSEL_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace simtsel {

// Every failure surfaced to a caller carries one of these categories, and the
// CLI maps each category to a fixed exit code (see tools/).
enum class ErrorCategory {
  config,     // bad or missing configuration / required input
  io,         // file cannot be opened, read or written
  parse,      // malformed content in an input file
  mismatch,   // parallel files disagree (line counts, index sets)
  bounds,     // value outside its permitted range (link indices, byte caps)
  shortfall,  // fewer scorable candidates than requested
  internal,
};

std::string_view to_string(ErrorCategory c);
int exit_code(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace simtsel

#endif
