#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace poseval::cli {

/// Runs one command line (args exclude the program name). Returns the process exit code:
/// 0 on success, 1 on I/O or input failures, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace poseval::cli
