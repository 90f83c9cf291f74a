#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttd/host/world.hpp"
#include "ttd/lang/interpreter.hpp"

namespace ttd::host {

struct EventCompletion {
  uint32_t event_index = 0;
  uint64_t seq = 0;
  EventDescriptor descriptor;
  uint32_t invocations = 0;
  uint64_t statements = 0;
  std::vector<std::string> errors;
};

// Removes the event with `seq` from the queue. Throws HostError if absent.
PendingEvent take_event(HostWorld& world, uint64_t seq);

// One dispatched event: its listener invocations, run in registration order
// one statement at a time. Between steps the interpreter is paused before a
// statement unless done().
class EventRun {
 public:
  EventRun(HostWorld& world, lang::Interpreter& interp, PendingEvent event, uint32_t event_index);

  bool done() const { return done_; }
  void step();
  void run_to_completion();

  // Statements executed in this event so far.
  uint64_t ordinal() const { return completion_.statements; }
  // Index of the running invocation (meaningful while !done()).
  size_t invocation() const { return next_ == 0 ? 0 : next_ - 1; }
  size_t invocation_count() const { return invocations_.size(); }
  // Ordinal of the running invocation's first statement.
  uint64_t invocation_start() const { return invocation_start_; }
  const EventCompletion& completion() const { return completion_; }
  const lang::Interpreter& interpreter() const { return *interp_; }

 private:
  struct Invocation {
    bool script = false;
    uint32_t script_id = 0;
    Value callee;
  };

  HostWorld* world_;
  lang::Interpreter* interp_;
  std::vector<Invocation> invocations_;
  std::vector<Value> args_;
  size_t next_ = 0;
  uint64_t invocation_start_ = 0;
  bool budget_hit_ = false;
  bool done_ = false;
  EventCompletion completion_;

  void resolve(const PendingEvent& e);
  void collect_outcome();
  void advance_to_statement();
};

}  // namespace ttd::host
