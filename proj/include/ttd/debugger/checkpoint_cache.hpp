#pragma once

#include <cstddef>
#include <list>
#include <vector>

#include "ttd/record/trace.hpp"

namespace ttd::debugger {

// Recorded checkpoints are pinned; checkpoints made during replay are kept
// in least-recently-used order up to `capacity`.
class CheckpointCache {
 public:
  static constexpr size_t kDefaultCapacity = 64;

  explicit CheckpointCache(std::vector<record::Checkpoint> pinned,
                           size_t capacity = kDefaultCapacity);

  // Latest checkpoint at or before `event_index`, or nullptr. Marks a cached
  // hit as recently used.
  const record::Checkpoint* best_for(uint32_t event_index);
  bool contains(uint32_t event_index) const;
  // Returns false if a checkpoint for that event already exists.
  bool insert(record::Checkpoint checkpoint);

  size_t pinned_count() const { return pinned_.size(); }
  size_t cached_count() const { return lru_.size(); }
  size_t capacity() const { return capacity_; }
  std::vector<uint32_t> cached_events() const;

 private:
  std::vector<record::Checkpoint> pinned_;
  std::list<record::Checkpoint> lru_;  // front = most recent
  size_t capacity_;
};

}  // namespace ttd::debugger
