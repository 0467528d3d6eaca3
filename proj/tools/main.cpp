#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_logger_st("amro");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("AMRO_LOG")) spdlog::set_level(spdlog::level::from_str(level));

  return amro::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
