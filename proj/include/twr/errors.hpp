// Error taxonomy shared by the library and the command-line tool.
//
// The CLI maps these onto process exit codes:
//   ParseError            -> 2  (malformed input file / unknown field)
//   ValidationError       -> 3  (well-formed input with out-of-range or
//                                incompatible values; includes TieError)
//   numerical flags       -> 4  (carried in result diagnostics, not thrown)
//   DegenerateRatioError  -> 5  (closed-form relay-placement update undefined)
#pragma once

#include <stdexcept>
#include <string>

namespace twr {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Two interferer components with exactly equal mean received power make the
// partial-fraction expansion of the interference PDF singular.
struct TieError : ValidationError {
  explicit TieError(const std::string& what) : ValidationError(what) {}
};

// The closed-form relay-placement update requires a positive ratio of the
// two placement coefficients; a non-positive ratio has no valid root.
struct DegenerateRatioError : std::runtime_error {
  explicit DegenerateRatioError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace twr
