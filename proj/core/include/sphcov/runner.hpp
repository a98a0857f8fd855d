#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "sphcov/config.hpp"

namespace sphcov {

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
};

/// Executes one CLI subcommand (validate, schoenberg, simulate, fit, cv,
/// predict) against a parsed configuration, writing artifacts and a
/// provenance record into the output directory. Returns the process exit
/// status (0 on success). Unknown subcommands return 2; runtime failures
/// throw (the CLI layer turns them into error JSON on stderr).
int run_subcommand(const std::string& subcommand, RunConfig config,
                   const RunOverrides& overrides = {});

bool is_known_subcommand(const std::string& subcommand);

}  // namespace sphcov
