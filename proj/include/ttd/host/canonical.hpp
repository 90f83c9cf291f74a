#pragma once

#include <string>

#include "ttd/host/world.hpp"
#include "ttd/lang/heap.hpp"
#include "ttd/lang/program.hpp"

namespace ttd::host {

// Deterministic text rendering of the connected DOM tree, attributes sorted
// by name, listeners in registration order.
std::string canonical_dom(const HostWorld& world, const lang::Program& program,
                          const lang::Heap& heap);

// Full observable state: DOM plus timers, requests, parsers, animations,
// resources, storage, console and guest globals. Used to compare runs.
std::string canonical_dump(const HostWorld& world, const lang::Program& program,
                           const lang::Heap& heap);

}  // namespace ttd::host
