#ifndef BNKIT_TOOLS_CLI_HPP
#define BNKIT_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace bnkit::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kInternal = 4 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bnkit::cli

#endif  // BNKIT_TOOLS_CLI_HPP
