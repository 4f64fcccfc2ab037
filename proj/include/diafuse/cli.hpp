#pragma once

#include <iosfwd>

namespace diafuse {

// Exit codes: 0 success, 1 usage error, 2 data error. Diagnostics go to
// `err`, results to `out` or to --out paths.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace diafuse
