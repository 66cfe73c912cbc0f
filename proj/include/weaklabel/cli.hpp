#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace weaklabel {

enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitDegenerate = 3 };

/// Entry point of the `weaklabel` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace weaklabel
