#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mata::cli {

/// Runs the CLI with the given arguments (argv[0] included) and returns the
/// exit code: 0 success, 1 numerical or check failure, 2 usage or input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mata::cli
