#pragma once

#include <iosfwd>

namespace maxlrt {

/// Entry point of the `maxlrt` tool. Subcommands: test, simulate, reproduce, rank.
/// Exit codes: 0 success, 1 usage or other error, 2 malformed input or unknown
/// table id, 3 degenerate data.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace maxlrt
