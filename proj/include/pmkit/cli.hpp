#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pmkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Environment variable naming the directory relative --out paths resolve against.
inline constexpr const char* kOutputDirEnv = "PMKIT_OUTPUT_DIR";

// Runs one subcommand. `args` excludes the program name, e.g.
// {"stats", "log.xes", "--json"}. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pmkit::cli
