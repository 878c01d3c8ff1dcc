#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tvs::cli {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kFormat = 3, kDivergence = 4 };

// Runs the tvstokes command line; argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tvs::cli
