#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lwcnn::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalid = 2;

/// Runs one command line (args exclude the program name). Results go to out,
/// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lwcnn::cli
