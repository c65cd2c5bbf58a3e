#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ram {

/// Command-line driver. `args` excludes the program name. Returns 0 on
/// success, 1 when the input model or arguments produce diagnostics, 2 on
/// usage errors. All output is deterministic given inputs and seeds.
int cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ram
