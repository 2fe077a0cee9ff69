#pragma once

#include <ostream>

namespace c1mixed {

/// Command-line front end. Returns the process exit code: 0 on success, 1 on
/// usage/input/runtime errors, 2 when --assert-rates finds a violated rate.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace c1mixed
