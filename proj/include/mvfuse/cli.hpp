#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mvfuse::cli {

enum ExitCode : int {
    ok = 0,
    failure = 1,
    malformed_input = 2,
    shape_mismatch = 3,
};

/// Entry point of the `mvfuse` tool. `args` excludes the program name.
/// Subcommands: fuse, eval, synth.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mvfuse::cli
