#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ragseg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// args excludes the program name. Subcommands: rag, bias, segment, eval, corrupt.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ragseg::cli
