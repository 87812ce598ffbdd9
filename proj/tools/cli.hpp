#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "expcp/sample.hpp"

namespace expcp::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 2,
    kMissingTable = 3,
    kInternalError = 4,
};

/// Runs the expcp command line. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One positive number per line; blank lines and '#' comments are skipped,
/// and a non-numeric first line is taken as a CSV header. Errors name the line.
Sample read_sample(const std::string& path);

/// Parses "0.25", "3" or "1/5".
double parse_rate(const std::string& text);

}  // namespace expcp::cli
