#include "ttd/debugger/checkpoint_cache.hpp"

#include <algorithm>

namespace ttd::debugger {

CheckpointCache::CheckpointCache(std::vector<record::Checkpoint> pinned, size_t capacity)
    : pinned_(std::move(pinned)), capacity_(capacity) {
  std::stable_sort(pinned_.begin(), pinned_.end(),
                   [](const auto& a, const auto& b) { return a.event_index < b.event_index; });
}

const record::Checkpoint* CheckpointCache::best_for(uint32_t event_index) {
  const record::Checkpoint* best = nullptr;
  for (const auto& c : pinned_)
    if (c.event_index <= event_index) best = &c;
  auto hit = lru_.end();
  for (auto it = lru_.begin(); it != lru_.end(); ++it)
    if (it->event_index <= event_index && (!best || it->event_index > best->event_index)) {
      best = &*it;
      hit = it;
    }
  if (hit != lru_.end()) lru_.splice(lru_.begin(), lru_, hit);
  return best;
}

bool CheckpointCache::contains(uint32_t event_index) const {
  auto same = [&](const record::Checkpoint& c) { return c.event_index == event_index; };
  return std::any_of(pinned_.begin(), pinned_.end(), same) ||
         std::any_of(lru_.begin(), lru_.end(), same);
}

bool CheckpointCache::insert(record::Checkpoint checkpoint) {
  if (capacity_ == 0 || contains(checkpoint.event_index)) return false;
  lru_.push_front(std::move(checkpoint));
  if (lru_.size() > capacity_) lru_.pop_back();
  return true;
}

std::vector<uint32_t> CheckpointCache::cached_events() const {
  std::vector<uint32_t> out;
  for (const auto& c : lru_) out.push_back(c.event_index);
  return out;
}

}  // namespace ttd::debugger
