#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

namespace rbr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDataError = 2;

/// Entry point of the `rbr` command-line tool. Results go to `out`, progress
/// and diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Parses "1" or "0.01,0.1,1" into lambda values; throws ArgumentError.
std::vector<double> parse_lambda_list(std::string_view text);

}  // namespace rbr
