#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cohlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (args excludes the program name). Structured output
/// goes to `out`; the resolved configuration, diagnostics and usage text go
/// to `err`. Returns the process exit status.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "a:b:step" (inclusive of b up to rounding) or "r1,r2,...".
std::vector<double> parse_rho_grid(const std::string& text);

}  // namespace cohlab::cli
