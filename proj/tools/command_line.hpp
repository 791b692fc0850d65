#ifndef SCREENLAB_TOOLS_COMMAND_LINE_HPP
#define SCREENLAB_TOOLS_COMMAND_LINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "screenlab/runner.hpp"

namespace screenlab::cli
{

struct Command
{
  ExperimentConfig config;
  RunOptions options;
};

// Parses `<subcommand> --config <file.ini> [overrides]`. Returns the command, or nothing
// when the caller should exit with `exit_code` (0 for --help, 2 for invalid input);
// `message` then holds the text to print.
struct ParseOutcome
{
  std::optional<Command> command;
  int exit_code = 0;
  std::string message;
};

ParseOutcome parse_command_line(const std::vector<std::string> &args);

// Accepts decimals and fractions such as "1/3".
double parse_real(const std::string &text);

}  // namespace screenlab::cli

#endif  // SCREENLAB_TOOLS_COMMAND_LINE_HPP
