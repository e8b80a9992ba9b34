#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vac::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitData = 2;

/// Entry point behind the `vac` executable. Exit codes: 0 success,
/// 1 invalid arguments or configuration, 2 unreadable or inconsistent data.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version();

}  // namespace vac::cli
