#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>

#include "ttd/debugger/checkpoint_cache.hpp"
#include "ttd/replay/replay_session.hpp"

namespace ttd::debugger {

// A travel target (statement at a logical time) that the event never reaches.
class TargetNotReached : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Breakpoint {
  uint32_t id = 0;
  uint32_t script_id = 0;
  uint32_t line = 0;
  lang::StmtId stmt = lang::kNone;
  // Fires only when the frame's logical time equals this.
  std::optional<lang::LogicalTime> when;
  bool enabled = true;
  uint64_t hits = 0;
};

struct Position {
  uint32_t event_index = 0;
  // Statements executed in the event before the paused one.
  uint64_t ordinal = 0;
  // False once the trace is exhausted.
  bool at_statement = false;
  lang::StmtId stmt = lang::kNone;
  lang::SourceLocation location;
  lang::LogicalTime time;
  size_t depth = 0;

  friend bool operator==(const Position&, const Position&) = default;
};

enum class StopReason { Entry, Step, Breakpoint, TimeTravel, End, NoPredecessor, Divergence };
const char* stop_reason_name(StopReason r);

struct StopInfo {
  StopReason reason = StopReason::Step;
  std::optional<uint32_t> breakpoint;
  Position position;
  std::optional<replay::DivergenceReport> divergence;
};

struct DebugOptions {
  size_t cache_capacity = CheckpointCache::kDefaultCapacity;
  bool opportunistic_checkpoints = true;
};

// Forward and reverse navigation over a recorded trace. Reverse moves
// restore the nearest checkpoint, replay up to the target event, then
// re-execute the event with monitors on until the target statement.
class DebugSession {
 public:
  explicit DebugSession(std::shared_ptr<const record::Trace> trace, DebugOptions options = {});

  // Pauses at the first statement of the trace.
  StopInfo start();

  uint32_t add_breakpoint(uint32_t script_id, uint32_t line,
                          std::optional<lang::LogicalTime> when = std::nullopt);
  bool remove_breakpoint(uint32_t id);
  bool set_breakpoint_enabled(uint32_t id, bool enabled);
  const std::map<uint32_t, Breakpoint>& breakpoints() const { return breakpoints_; }

  StopInfo continue_forward();
  StopInfo step_into();
  StopInfo step_over();
  StopInfo step_out();
  StopInfo step_back();
  StopInfo reverse_step_over();
  StopInfo reverse_step_out();
  // Pauses before statement `ordinal` of event `event_index`.
  StopInfo time_travel_to(uint32_t event_index, uint64_t ordinal = 0);
  // Pauses at `location` when its frame's logical time equals `time`, with
  // monitors enabled from the start of the event. Throws TargetNotReached.
  StopInfo time_travel_to(uint32_t event_index, lang::SourceLocation location,
                          lang::LogicalTime time);

  const Position& position() const { return position_; }
  bool started() const { return started_; }
  replay::ReplaySession& replay() { return replay_; }
  const replay::ReplaySession& replay() const { return replay_; }
  const lang::Program& program() const { return replay_.program(); }
  const record::Trace& trace() const { return replay_.trace(); }
  const CheckpointCache& checkpoints() const { return cache_; }

  // Whole events replayed before the target event during the last reverse move.
  uint64_t last_prior_events_replayed() const { return last_prior_events_; }
  uint64_t opportunistic_checkpoints_created() const { return opportunistic_created_; }

  void on_checkpoint_created(std::function<void(const record::Checkpoint&)> fn) {
    checkpoint_listener_ = std::move(fn);
  }

 private:
  DebugOptions options_;
  replay::ReplaySession replay_;
  CheckpointCache cache_;
  std::map<uint32_t, Breakpoint> breakpoints_;
  uint32_t next_breakpoint_ = 1;
  Position position_;
  bool started_ = false;
  uint64_t last_prior_events_ = 0;
  uint64_t opportunistic_created_ = 0;
  std::function<void(const record::Checkpoint&)> checkpoint_listener_;

  using Pred = std::function<bool()>;
  void require_started() const;
  void refresh_position();
  StopInfo stop(StopReason reason, std::optional<uint32_t> bp = std::nullopt);
  // Moves to the next statement, entering later events as needed. False at end.
  bool advance();
  bool enter_next_event();
  std::optional<uint32_t> breakpoint_here();
  StopInfo run_forward(const Pred& done);
  void travel(uint32_t event_index, const Pred& arrived);
  StopInfo travel_to_ordinal(uint32_t event_index, uint64_t ordinal, StopReason reason);
  StopInfo travel_to_statement(lang::StmtId stmt, lang::LogicalTime time);
  StopInfo step_to_previous_ordinal(uint64_t ordinal);
  uint64_t statements_in(uint32_t event_index) const;
  template <typename Fn>
  StopInfo guarded(Fn&& fn);
};

}  // namespace ttd::debugger
