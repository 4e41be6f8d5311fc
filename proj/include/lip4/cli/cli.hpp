#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lip4::cli {

/// Runs the command line `args` (without the program name) and returns the exit code:
/// 0 success, 2 usage error, 3 input-format error, 4 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count for `bench`: LIP4_THREADS if set and positive, otherwise the
/// hardware concurrency.
unsigned worker_count();

}  // namespace lip4::cli
