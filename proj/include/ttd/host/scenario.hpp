#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ttd/host/world.hpp"

namespace ttd::host {

struct ScriptedInput {
  int64_t at = 0;
  std::string type;
  // Value of the target element's `id` attribute, resolved when the input fires.
  std::string target;
  EventKind kind = EventKind::UserInput;
  std::vector<std::pair<std::string, PlainValue>> payload;
};

struct ScriptedResponse {
  uint32_t status = 200;
  std::string body;
  int64_t headers_ms = 5;
  // (ms after send, bytes in this chunk). Normalized so the bytes sum to the body size.
  std::vector<std::pair<int64_t, uint64_t>> chunks;
};

struct ScriptedResource {
  int64_t delay_ms = 10;
  uint32_t width = 0;
  uint32_t height = 0;
  uint32_t bytes = 0;
};

struct Scenario {
  uint32_t version = 1;
  // Seeds the background scheduler (interleavings); recording only.
  uint64_t seed = 1;
  uint64_t prng_seed = 1;
  int64_t duration_ms = 10000;
  int64_t max_step_ms = 16;
  // Probability that a host call observes background progress first.
  double concurrency = 0.0;
  uint32_t parse_chunk_min = 8;
  uint32_t parse_chunk_max = 32;
  std::vector<std::string> documents;
  std::vector<ScriptedInput> inputs;
  std::map<std::string, ScriptedResponse> responses;
  std::map<std::string, ScriptedResource> resources;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Scenario parse_scenario(std::string_view json_text);
// Canonical JSON text; parse_scenario(scenario_to_json(s)) reproduces s.
std::string scenario_to_json(const Scenario& s);
uint64_t scenario_hash(const Scenario& s);

}  // namespace ttd::host
