// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

namespace mmnl::cli {

// Exit codes: 0 success, 1 usage error, 2 data or config validation error,
// 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

int run(int argc, const char* const* argv);

}  // namespace mmnl::cli
