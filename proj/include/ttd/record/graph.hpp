#pragma once

#include <string>
#include <optional>
#include <string_view>

#include "ttd/host/world.hpp"
#include "ttd/lang/heap.hpp"

namespace ttd::record {

// Guest heap and host world serialized together as one object graph. Objects
// are numbered in breadth-first order from the roots: the global environment,
// then host-held callbacks (listeners by node, timers, requests). Only
// reachable objects are written, so a decoded heap is compact.
std::string encode_graph(const lang::Heap& heap, const host::HostWorld& world);

struct DecodedGraph {
  lang::Heap heap;
  host::HostWorld world;
  size_t object_count = 0;
};

// Throws IntegrityError on malformed input or dangling references.
// `function_count` bounds the closure function ids.
DecodedGraph decode_graph(std::string_view bytes, size_t function_count);

// Host state alone, heap references written as-is.
std::string snapshot_host_state(const host::HostWorld& world);
// With `object_count`, heap references at or beyond it are rejected.
host::HostWorld restore_host_state(std::string_view image,
                                   std::optional<size_t> object_count = std::nullopt);

}  // namespace ttd::record
