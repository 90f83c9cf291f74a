#include "ttd/cli/config.hpp"

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ttd::cli {

Config parse_config(const std::string& text) {
  using nlohmann::json;
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError(".ttdrc must be a JSON object");
  Config c;
  try {
    for (auto& [key, v] : j.items()) {
      if (key == "checkpoint_interval_ms") c.checkpoint_interval_ms = v.get<int64_t>();
      else if (key == "statement_budget") c.statement_budget = v.get<uint64_t>();
      else if (key == "port") c.port = v.get<uint16_t>();
      else if (key == "compress") c.compress = v.get<bool>();
      else if (key == "color") c.color = v.get<bool>();
      else throw ConfigError(".ttdrc: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(".ttdrc: ") + e.what());
  }
  if (c.checkpoint_interval_ms <= 0) throw ConfigError(".ttdrc: checkpoint_interval_ms must be > 0");
  return c;
}

Config load_config(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> candidates{dir / ".ttdrc"};
  if (const char* home = std::getenv("HOME")) candidates.push_back(std::filesystem::path(home) / ".ttdrc");
  for (const auto& p : candidates) {
    std::ifstream in(p);
    if (!in) continue;
    std::stringstream ss;
    ss << in.rdbuf();
    Config c = parse_config(ss.str());
    c.source = p;
    return c;
  }
  return {};
}

bool use_color(const Config& config, bool no_color_flag) {
  if (no_color_flag || !config.color) return false;
  if (const char* v = std::getenv("TTD_NO_COLOR"); v && *v) return false;
  return ::isatty(STDOUT_FILENO) != 0;
}

}  // namespace ttd::cli
