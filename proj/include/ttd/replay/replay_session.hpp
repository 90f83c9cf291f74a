#pragma once

#include <memory>
#include <optional>

#include "ttd/host/event_run.hpp"
#include "ttd/host/host_env.hpp"
#include "ttd/host/host_update.hpp"
#include "ttd/record/trace.hpp"
#include "ttd/replay/divergence.hpp"

namespace ttd::replay {

std::shared_ptr<const lang::Program> program_for(const record::Trace& trace);

// Re-executes a trace from a checkpoint, driven only by the log. Mismatches
// with the log or the recorded audit throw DivergenceError; the session must
// be restarted afterwards.
//
// Invariant: in_event() implies the interpreter is paused before a statement.
class ReplaySession {
 public:
  explicit ReplaySession(std::shared_ptr<const record::Trace> trace,
                         std::shared_ptr<const lang::Program> program = nullptr);
  ~ReplaySession();
  ReplaySession(const ReplaySession&) = delete;
  ReplaySession& operator=(const ReplaySession&) = delete;

  const record::Trace& trace() const { return *trace_; }
  std::shared_ptr<const record::Trace> trace_ptr() const { return trace_; }
  const lang::Program& program() const { return *program_; }
  std::shared_ptr<const lang::Program> program_ptr() const { return program_; }

  void start(size_t checkpoint_index);
  void start_from(const record::Checkpoint& checkpoint);

  // Index of the running event, or of the next one between events.
  uint32_t next_event() const { return next_event_; }
  uint32_t event_count() const { return trace_->event_count; }
  bool in_event() const { return run_ != nullptr; }
  bool finished() const { return !in_event() && next_event_ >= trace_->event_count; }

  // Applies the pending InterEvent entry for next_event(), if any.
  void apply_inter_event();
  void begin_event();
  void step();
  void finish_event();
  void replay_event();
  // Replays whole events until next_event() == k (between events).
  void replay_until_event(uint32_t k);
  // Replays everything left and checks the log is fully consumed.
  void run_to_end();

  // Between events only; applies the pending InterEvent entry first so the
  // checkpoint sits immediately before Event(next_event()).
  record::Checkpoint capture_checkpoint();

  const host::EventRun* current_event() const { return run_.get(); }
  host::HostWorld& world() { return world_; }
  const host::HostWorld& world() const { return world_; }
  lang::Heap& heap() { return heap_; }
  const lang::Heap& heap() const { return heap_; }
  lang::Interpreter& interpreter() { return *interp_; }
  const lang::Interpreter& interpreter() const { return *interp_; }
  uint64_t log_cursor() const { return cursor_; }

  // Events dispatched since the last reset (replay-work counter).
  uint64_t events_replayed() const { return events_replayed_; }
  void reset_work_counter() { events_replayed_ = 0; }

 private:
  class Hooks;

  std::shared_ptr<const record::Trace> trace_;
  std::shared_ptr<const lang::Program> program_;
  host::HostWorld world_;
  lang::Heap heap_;
  host::HostEnv env_;
  std::unique_ptr<lang::Interpreter> interp_;
  std::unique_ptr<Hooks> hooks_;
  std::unique_ptr<host::EventRun> run_;
  uint64_t cursor_ = 0;
  uint32_t next_event_ = 0;
  bool started_ = false;
  uint64_t events_replayed_ = 0;

  [[noreturn]] void diverge(DivergenceKind kind, std::string expected, std::string observed);
  void apply(const host::HostUpdate& u);
  void require_started() const;
  void end_event();
  void check_audit(const host::EventCompletion& c);
  friend class Hooks;
};

}  // namespace ttd::replay
