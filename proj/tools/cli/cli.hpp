#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rhymecheck::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

// Runs the toolkit with `args` (program name excluded), writing to `out` and `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Directory holding the shipped demo lexicon and sentiment lexicon.
std::string default_data_dir();

}  // namespace rhymecheck::cli
