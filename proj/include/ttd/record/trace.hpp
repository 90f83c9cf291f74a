#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ttd/record/log.hpp"

namespace ttd::record {

inline constexpr uint32_t kTraceFormatVersion = 1;

// Between-events snapshot, taken after InterEvent(event_index) was applied and
// before Event(event_index) is dispatched.
struct Checkpoint {
  uint32_t event_index = 0;
  uint64_t interaction = 0;
  // Index of the first log entry still to be replayed.
  uint64_t log_position = 0;
  int64_t now = 0;
  std::string graph;
  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

// What the original run observed for one event; replay is checked against it.
struct EventAudit {
  uint32_t event_index = 0;
  uint64_t statements = 0;
  uint64_t interactions = 0;  // counter value when the event finished
  uint64_t host_calls = 0;
  uint64_t host_digest = 0;
  std::vector<std::string> errors;
  friend bool operator==(const EventAudit&, const EventAudit&) = default;
};

struct Audit {
  std::vector<EventAudit> events;
  std::string final_dump;
  friend bool operator==(const Audit&, const Audit&) = default;
};

struct Trace {
  std::vector<std::pair<std::string, std::string>> scripts;
  std::string scenario_json;
  uint64_t scenario_hash = 0;
  uint64_t checkpoint_interval_ms = 2000;
  uint64_t statement_budget = 0;
  uint32_t event_count = 0;
  std::vector<LogEntry> log;
  std::vector<Checkpoint> checkpoints;
  Audit audit;
  friend bool operator==(const Trace&, const Trace&) = default;
};

// Size of the encoded log section in bytes.
size_t log_bytes(const std::vector<LogEntry>& log);

}  // namespace ttd::record
