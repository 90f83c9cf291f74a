#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace ttd::cli {

// Defaults read from a JSON `.ttdrc`; command-line flags override them.
struct Config {
  int64_t checkpoint_interval_ms = 2000;
  uint64_t statement_budget = 10'000'000;
  uint16_t port = 9229;
  bool compress = true;
  bool color = true;
  // Where the values came from, for diagnostics.
  std::optional<std::filesystem::path> source;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Looks in `dir` first, then $HOME. Unknown keys are errors.
Config load_config(const std::filesystem::path& dir);
Config parse_config(const std::string& json_text);

// Color only when the config allows it, TTD_NO_COLOR is unset and stdout is a terminal.
bool use_color(const Config& config, bool no_color_flag);

}  // namespace ttd::cli
