#ifndef IONTRAP_COMMANDS_HPP
#define IONTRAP_COMMANDS_HPP

#include <optional>
#include <string>

#include "iontrap/config.hpp"

namespace iontrap {

inline constexpr const char* kVersion = "0.1.0";

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  std::optional<int> trials_override;
  int threads = 1;
};

// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
int run_command(const std::string& command, const CliOptions& options);

}  // namespace iontrap

#endif  // IONTRAP_COMMANDS_HPP
