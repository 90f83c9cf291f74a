#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ttd/host/host_update.hpp"
#include "ttd/lang/host_call.hpp"
#include "ttd/record/binary_io.hpp"

namespace ttd::record {

// Return value of a logged host call (date, timer id).
struct SimpleEntry {
  uint64_t interaction = 0;
  lang::HostCallKind kind = lang::HostCallKind::DateNow;
  double value = 0;
  friend bool operator==(const SimpleEntry&, const SimpleEntry&) = default;
};

// The event dispatched as number `event_index`; `seq` names it in the queue.
struct EventEntry {
  uint32_t event_index = 0;
  uint64_t seq = 0;
  host::EventDescriptor descriptor;
  friend bool operator==(const EventEntry&, const EventEntry&) = default;
};

// Host updates applied in the quiescent period before event `before_event_index`.
struct InterEventEntry {
  uint32_t before_event_index = 0;
  std::vector<host::HostUpdate> updates;
  friend bool operator==(const InterEventEntry&, const InterEventEntry&) = default;
};

// Updates that happened while guest code ran, applied at the start of the
// host call with this interaction number.
struct ConcurrentEntry {
  uint64_t interaction = 0;
  std::vector<host::HostUpdate> updates;
  friend bool operator==(const ConcurrentEntry&, const ConcurrentEntry&) = default;
};

using LogEntry = std::variant<SimpleEntry, EventEntry, InterEventEntry, ConcurrentEntry>;

void encode_entry(Writer& w, const LogEntry& e);
LogEntry decode_entry(Reader& r);
std::string describe(const LogEntry& e);
const char* entry_kind_name(const LogEntry& e);

}  // namespace ttd::record
