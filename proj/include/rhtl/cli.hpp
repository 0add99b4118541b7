#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rhtl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUnsatisfiable = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirVariable = "RHTL_OUT_DIR";

/// Runs the command line with `args` (without the program name). Reports go
/// to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace rhtl
