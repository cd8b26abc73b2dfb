#pragma once

namespace hmflow::cli {

// Exit codes of the hmflow tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

int run(int argc, char** argv);

}  // namespace hmflow::cli
