#include "ttd/debugger/debug_session.hpp"

#include "ttd/debugger/step_back.hpp"

namespace ttd::debugger {

using lang::EngineFault;
using lang::LogicalTime;
using lang::StmtId;

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Entry: return "entry";
    case StopReason::Step: return "step";
    case StopReason::Breakpoint: return "breakpoint";
    case StopReason::TimeTravel: return "timeTravel";
    case StopReason::End: return "end";
    case StopReason::NoPredecessor: return "noPredecessor";
    case StopReason::Divergence: return "divergence";
  }
  return "unknown";
}

DebugSession::DebugSession(std::shared_ptr<const record::Trace> trace, DebugOptions options)
    : options_(options),
      replay_(trace),
      cache_(trace->checkpoints, options.opportunistic_checkpoints ? options.cache_capacity : 0) {
  if (trace->checkpoints.empty()) throw record::IntegrityError("trace has no checkpoints");
}

template <typename Fn>
StopInfo DebugSession::guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const replay::DivergenceError& e) {
    started_ = false;
    position_.at_statement = false;
    StopInfo s;
    s.reason = StopReason::Divergence;
    s.position = position_;
    s.divergence = e.report();
    return s;
  }
}

void DebugSession::require_started() const {
  if (!started_) throw std::logic_error("no active replay; start or time travel first");
}

StopInfo DebugSession::start() {
  return guarded([&] {
    replay_.start(0);
    started_ = true;
    if (!enter_next_event()) return stop(StopReason::End);
    if (auto bp = breakpoint_here()) return stop(StopReason::Breakpoint, bp);
    return stop(StopReason::Entry);
  });
}

uint32_t DebugSession::add_breakpoint(uint32_t script_id, uint32_t line,
                                      std::optional<LogicalTime> when) {
  auto stmt = program().find_line(script_id, line);
  if (!stmt)
    throw std::invalid_argument("no statement on line " + std::to_string(line) + " of script " +
                                std::to_string(script_id));
  Breakpoint bp;
  bp.id = next_breakpoint_++;
  bp.script_id = script_id;
  bp.line = line;
  bp.stmt = *stmt;
  bp.when = when;
  breakpoints_[bp.id] = bp;
  return bp.id;
}

bool DebugSession::remove_breakpoint(uint32_t id) { return breakpoints_.erase(id) > 0; }

bool DebugSession::set_breakpoint_enabled(uint32_t id, bool enabled) {
  auto it = breakpoints_.find(id);
  if (it == breakpoints_.end()) return false;
  it->second.enabled = enabled;
  return true;
}

void DebugSession::refresh_position() {
  Position p;
  p.event_index = replay_.next_event();
  if (replay_.in_event()) {
    const lang::Interpreter& in = replay_.interpreter();
    p.at_statement = true;
    p.ordinal = replay_.current_event()->ordinal();
    p.stmt = in.current_stmt();
    p.location = in.current_location();
    p.time = in.frames().back().time;
    p.depth = in.depth();
  }
  position_ = p;
}

StopInfo DebugSession::stop(StopReason reason, std::optional<uint32_t> bp) {
  refresh_position();
  StopInfo s;
  s.reason = reason;
  s.breakpoint = bp;
  s.position = position_;
  return s;
}

bool DebugSession::enter_next_event() {
  while (!replay_.in_event()) {
    if (replay_.finished()) return false;
    replay_.interpreter().enable_monitors();
    replay_.begin_event();
  }
  return true;
}

bool DebugSession::advance() {
  if (replay_.in_event()) replay_.step();
  return enter_next_event();
}

std::optional<uint32_t> DebugSession::breakpoint_here() {
  const lang::Interpreter& in = replay_.interpreter();
  StmtId here = in.current_stmt();
  for (auto& [id, bp] : breakpoints_) {
    if (!bp.enabled || bp.stmt != here) continue;
    if (bp.when && in.frames().back().time != *bp.when) continue;
    ++bp.hits;
    return id;
  }
  return std::nullopt;
}

StopInfo DebugSession::run_forward(const Pred& done) {
  require_started();
  return guarded([&] {
    for (;;) {
      if (!advance()) return stop(StopReason::End);
      if (auto bp = breakpoint_here()) return stop(StopReason::Breakpoint, bp);
      if (done()) return stop(StopReason::Step);
    }
  });
}

StopInfo DebugSession::continue_forward() {
  return run_forward([] { return false; });
}

StopInfo DebugSession::step_into() {
  return run_forward([] { return true; });
}

StopInfo DebugSession::step_over() {
  uint32_t ev = position_.event_index;
  size_t depth = position_.depth;
  return run_forward([&, ev, depth] {
    return replay_.next_event() != ev || replay_.interpreter().depth() <= depth;
  });
}

StopInfo DebugSession::step_out() {
  uint32_t ev = position_.event_index;
  size_t depth = position_.depth;
  return run_forward([&, ev, depth] {
    return replay_.next_event() != ev || replay_.interpreter().depth() < depth;
  });
}

void DebugSession::travel(uint32_t event_index, const Pred& arrived) {
  started_ = false;
  const record::Checkpoint* cp = cache_.best_for(event_index);
  if (!cp) throw EngineFault("no checkpoint precedes event " + std::to_string(event_index));
  bool exact = cp->event_index == event_index;
  replay_.start_from(*cp);
  replay_.reset_work_counter();
  replay_.replay_until_event(event_index);
  last_prior_events_ = replay_.events_replayed();
  if (!exact && options_.opportunistic_checkpoints) {
    record::Checkpoint made = replay_.capture_checkpoint();
    if (checkpoint_listener_) checkpoint_listener_(made);
    if (cache_.insert(std::move(made))) ++opportunistic_created_;
  }
  replay_.interpreter().enable_monitors();
  replay_.begin_event();
  while (replay_.in_event() && !arrived()) replay_.step();
  if (!replay_.in_event())
    throw TargetNotReached("target not reached in event " + std::to_string(event_index));
  started_ = true;
}

uint64_t DebugSession::statements_in(uint32_t event_index) const {
  const auto& audit = trace().audit.events;
  if (event_index >= audit.size()) throw EngineFault("trace audit lacks event " + std::to_string(event_index));
  return audit[event_index].statements;
}

StopInfo DebugSession::travel_to_ordinal(uint32_t event_index, uint64_t ordinal, StopReason reason) {
  return guarded([&] {
    travel(event_index, [&] { return replay_.current_event()->ordinal() == ordinal; });
    return stop(reason);
  });
}

StopInfo DebugSession::travel_to_statement(StmtId stmt, LogicalTime time) {
  uint32_t ev = position_.event_index;
  return guarded([&] {
    travel(ev, [&] {
      const lang::Interpreter& in = replay_.interpreter();
      return in.current_stmt() == stmt && in.frames().back().time == time;
    });
    return stop(StopReason::Step);
  });
}

StopInfo DebugSession::step_to_previous_ordinal(uint64_t ordinal) {
  uint32_t ev = position_.event_index;
  if (ordinal > 0) return travel_to_ordinal(ev, ordinal - 1, StopReason::Step);
  for (uint32_t j = ev; j-- > 0;) {
    uint64_t n = statements_in(j);
    if (n > 0) return travel_to_ordinal(j, n - 1, StopReason::Step);
  }
  StopInfo s;
  s.reason = StopReason::NoPredecessor;
  s.position = position_;
  return s;
}

StopInfo DebugSession::step_back() {
  require_started();
  if (!position_.at_statement) return step_to_previous_ordinal(0);
  ReverseTarget t = resolve_step_back(replay_.interpreter());
  if (t.kind == ReverseTarget::Kind::Statement) return travel_to_statement(t.stmt, t.time);
  return step_to_previous_ordinal(position_.ordinal);
}

StopInfo DebugSession::reverse_step_over() {
  require_started();
  if (!position_.at_statement) return step_to_previous_ordinal(0);
  ReverseTarget t = resolve_reverse_step_over(replay_.interpreter());
  if (t.kind == ReverseTarget::Kind::Statement) return travel_to_statement(t.stmt, t.time);
  return step_to_previous_ordinal(position_.ordinal);
}

StopInfo DebugSession::reverse_step_out() {
  require_started();
  if (!position_.at_statement) return step_to_previous_ordinal(0);
  ReverseTarget t = resolve_reverse_step_out(replay_.interpreter());
  if (t.kind == ReverseTarget::Kind::Statement) return travel_to_statement(t.stmt, t.time);
  StopInfo s;
  s.reason = StopReason::NoPredecessor;
  s.position = position_;
  return s;
}

StopInfo DebugSession::time_travel_to(uint32_t event_index, uint64_t ordinal) {
  if (event_index >= trace().event_count)
    throw std::out_of_range("no event " + std::to_string(event_index));
  if (ordinal >= statements_in(event_index))
    throw std::out_of_range("event " + std::to_string(event_index) + " has " +
                            std::to_string(statements_in(event_index)) + " statements");
  return travel_to_ordinal(event_index, ordinal, StopReason::TimeTravel);
}

}  // namespace ttd::debugger

namespace ttd::debugger {

StopInfo DebugSession::time_travel_to(uint32_t event_index, lang::SourceLocation location,
                                      LogicalTime time) {
  if (event_index >= trace().event_count)
    throw std::out_of_range("no event " + std::to_string(event_index));
  auto stmt = program().find(location);
  if (!stmt) throw std::invalid_argument("no statement at that location");
  Position back = position_;
  bool was_started = started_;
  try {
    return guarded([&] {
      travel(event_index, [&] {
        const lang::Interpreter& in = replay_.interpreter();
        return in.current_stmt() == *stmt && in.frames().back().time == time;
      });
      return stop(StopReason::TimeTravel);
    });
  } catch (const TargetNotReached&) {
    // Put the session back where it was before reporting.
    if (was_started && back.at_statement) travel_to_ordinal(back.event_index, back.ordinal, StopReason::Step);
    throw;
  }
}

}  // namespace ttd::debugger
