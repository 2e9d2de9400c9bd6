#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "studies.hpp"

namespace qmkdv::studies {

inline constexpr const char* kStudies[] = {"identities", "simulate", "decay", "scattering", "resonance", "oscillatory"};

struct CommandOptions {
  std::string study;
  std::filesystem::path config;
  std::filesystem::path out_dir = "qmkdv-out";
  std::optional<std::uint64_t> seed;
  bool linear_only = false;
};

enum ExitCode : int { kExitPass = 0, kExitCheckFailure = 1, kExitConfigError = 2 };

// Runs one study, writes its files under out_dir and returns the exit code.
// Failing checks are named on err; qmkdv errors are mapped to exit codes here.
int run_command(const CommandOptions& opt, std::ostream& log, std::ostream& err);

}  // namespace qmkdv::studies
