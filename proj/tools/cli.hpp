#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lomv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitVerification = 3;

inline constexpr const char* kVersion = "0.1.0";

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace lomv::cli
