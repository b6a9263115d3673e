#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sbt::cli {

enum ExitCode : int { kOk = 0, kConfig = 2, kData = 3, kIo = 4 };

/// Runs the command line `args` (without the program name). Reports go to
/// `out`, warnings and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbt::cli
