#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "ttd/host/host_update.hpp"
#include "ttd/host/markup.hpp"
#include "ttd/host/scenario.hpp"

namespace ttd::host {

// Drives the background processes (input script, timers, animations,
// parsers, resource loader, network) while recording. Every effect is
// produced as a HostUpdate and applied with apply_update, so the log can
// reproduce it. Never used during replay.
class Scheduler {
 public:
  Scheduler(const Scenario& scenario, HostWorld& world);

  // Advances the clock by a seeded increment and runs one tick.
  std::vector<HostUpdate> advance();
  // Seeded coin flip deciding whether a host call observes background progress.
  bool roll_concurrency();
  // A short clock step plus one tick, run at a host-call interposition point.
  std::vector<HostUpdate> concurrent_tick();
  // Applies and returns the transitions held back until the next quiescent point.
  std::vector<HostUpdate> take_deferred();
  bool has_deferred() const { return !deferred_.empty(); }
  bool finished() const { return world_->now >= scenario_->duration_ms; }
  // No background process can produce another effect: inputs exhausted, no
  // timers, parsers done, nothing loading or animating, nothing deferred.
  bool quiescent() const;

 private:
  struct NetProgress {
    XhrState stage = XhrState::Opened;
    size_t next_chunk = 0;
    uint64_t bytes = 0;
  };

  const Scenario* scenario_;
  HostWorld* world_;
  std::mt19937_64 rng_;
  size_t next_input_ = 0;
  std::map<uint32_t, NetProgress> net_;
  std::vector<HostUpdate> deferred_;
  std::vector<std::vector<MarkupElement>> markup_;
  ScriptedResponse missing_;

  void tick(std::vector<HostUpdate>& out);
  void apply(HostUpdate u, std::vector<HostUpdate>& out);
  void run_inputs(std::vector<HostUpdate>& out);
  void run_timers(std::vector<HostUpdate>& out);
  void run_animations(std::vector<HostUpdate>& out);
  void run_parsers(std::vector<HostUpdate>& out);
  void run_resources(std::vector<HostUpdate>& out);
  void run_network();
  uint64_t uniform(uint64_t lo, uint64_t hi);
};

}  // namespace ttd::host
