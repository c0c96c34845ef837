// Command-line front end. Exit codes: 0 success, 1 I/O or internal failure,
// 2 configuration or usage error, 3 numerical failure.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rydbist {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rydbist
