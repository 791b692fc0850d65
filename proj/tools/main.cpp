#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "command_line.hpp"

namespace
{

// SCREENLAB_LOG = trace | debug | info | warn | error | critical | off (default info).
void configure_logging()
{
  const char *env = std::getenv("SCREENLAB_LOG");
  spdlog::set_level(env != nullptr ? spdlog::level::from_str(env) : spdlog::level::info);
  spdlog::set_pattern("[%H:%M:%S %^%l%$] %v");
}

}  // namespace

int main(int argc, char **argv)
{
  configure_logging();
  const std::vector<std::string> args(argv + 1, argv + argc);
  auto parsed = screenlab::cli::parse_command_line(args);
  if (!parsed.command)
  {
    std::fputs(parsed.message.c_str(), parsed.exit_code == 0 ? stdout : stderr);
    std::fputc('\n', parsed.exit_code == 0 ? stdout : stderr);
    return parsed.exit_code;
  }
  auto &cmd = *parsed.command;
  cmd.options.log = [](const std::string &line) { spdlog::info("{}", line); };
  spdlog::debug("{} study, {} jobs, bundle {}", screenlab::study_name(cmd.config),
                cmd.options.jobs, cmd.options.out.string());
  const auto result = screenlab::run(cmd.config, cmd.options);
  if (result.exit_code == 0)
  {
    spdlog::info("bundle written to {}", cmd.options.out.string());
  }
  else
  {
    spdlog::error("{}", result.message);
  }
  return result.exit_code;
}
