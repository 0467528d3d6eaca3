#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "amro/error.hpp"

namespace amro::cli {

struct RunConfig {
  std::filesystem::path scenario;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iterations;
  std::filesystem::path snapshot;
  std::string levels;  // comma separated
  std::filesystem::path router;
  std::filesystem::path dataset;
  std::optional<std::size_t> queries;
};

enum ExitCode : int { kOk = 0, kInternal = 1, kConfig = 2, kState = 3, kData = 4 };

int exit_code(ErrorKind kind) noexcept;

// Each command throws amro::Error; run() maps failures onto exit codes.
void cmd_warmup(const RunConfig& config);
void cmd_simulate(const RunConfig& config);
void cmd_stress(const RunConfig& config);
void cmd_export_heatmap(const RunConfig& config);
void cmd_eval_router(const RunConfig& config);

std::vector<std::size_t> parse_levels(const std::string& csv);

/// Full command line including the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amro::cli
