#pragma once

#include <string>
#include <variant>
#include <vector>

#include "ttd/host/world.hpp"

namespace ttd::host {

struct ClockAdvance {
  int64_t now = 0;
  friend bool operator==(const ClockAdvance&, const ClockAdvance&) = default;
};
// Re-arms an interval timer or marks a one-shot as fired, and enqueues its
// timer event.
struct TimerFire {
  uint32_t timer = 0;
  friend bool operator==(const TimerFire&, const TimerFire&) = default;
};
// Scripted user input or script start entering the queue.
struct EventEnqueued {
  EventDescriptor descriptor;
  friend bool operator==(const EventEnqueued&, const EventEnqueued&) = default;
};
struct AnimationAdvance {
  uint32_t node = 0;
  uint64_t frame_count = 0;
  friend bool operator==(const AnimationAdvance&, const AnimationAdvance&) = default;
};
// Moves a parser stream forward; `emitted` is the resulting number of
// elements, checked against the markup on apply.
struct ParseAdvance {
  uint32_t document = 0;
  uint64_t offset = 0;
  uint32_t emitted = 0;
  friend bool operator==(const ParseAdvance&, const ParseAdvance&) = default;
};
struct ResourceLoaded {
  uint32_t node = 0;
  bool ok = true;
  uint32_t width = 0;
  uint32_t height = 0;
  uint32_t bytes = 0;
  friend bool operator==(const ResourceLoaded&, const ResourceLoaded&) = default;
};
// Applied only between events. Enqueues a net-state-change event. The full
// body travels with the HEADERS_RECEIVED transition.
struct XhrTransition {
  uint32_t request = 0;
  XhrState state = XhrState::Unsent;
  uint32_t status = 0;
  uint64_t bytes = 0;
  std::string body;
  friend bool operator==(const XhrTransition&, const XhrTransition&) = default;
};

using HostUpdate = std::variant<ClockAdvance, TimerFire, EventEnqueued, AnimationAdvance,
                                ParseAdvance, ResourceLoaded, XhrTransition>;

// Applies one update. The same function runs while recording (to produce the
// effect) and while replaying (to reproduce it). Throws HostError when the
// update does not fit the world (illegal state transition, unknown id).
void apply_update(HostWorld& world, const HostUpdate& update);

std::string describe(const HostUpdate& update);

}  // namespace ttd::host
