#pragma once

#include <iosfwd>

namespace cwe::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kNotConverged = 2;  // also: experiment failure rate too high
inline constexpr int kCheckViolated = 3;

/// Parses argv and runs one of: solve, experiment, bounds, check, validate.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cwe::cli
