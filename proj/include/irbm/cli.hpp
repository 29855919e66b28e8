#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace irbm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `irbm` command. `args` excludes the program name.
/// Returns 0 on success, 2 on usage or validation errors, 1 on runtime failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace irbm
