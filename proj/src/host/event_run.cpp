#include "ttd/host/event_run.hpp"

#include <algorithm>

namespace ttd::host {

using lang::HostKind;
using lang::HostRef;

PendingEvent take_event(HostWorld& world, uint64_t seq) {
  auto it = std::find_if(world.queue.begin(), world.queue.end(),
                         [&](const PendingEvent& e) { return e.seq == seq; });
  if (it == world.queue.end())
    throw HostError("event seq " + std::to_string(seq) + " is not in the queue");
  PendingEvent e = std::move(*it);
  world.queue.erase(it);
  return e;
}

EventRun::EventRun(HostWorld& world, lang::Interpreter& interp, PendingEvent event,
                   uint32_t event_index)
    : world_(&world), interp_(&interp) {
  if (!interp.idle()) throw lang::EngineFault("event dispatched with a non-empty call stack");
  completion_.event_index = event_index;
  completion_.seq = event.seq;
  interp.reset_event_budget();
  resolve(event);
  completion_.descriptor = std::move(event.descriptor);
  advance_to_statement();
}

void EventRun::resolve(const PendingEvent& e) {
  const EventDescriptor& d = e.descriptor;
  HostWorld& w = *world_;
  if (d.kind == EventKind::ScriptRun) {
    if (d.target >= interp_->program().scripts().size())
      throw HostError("unknown script " + std::to_string(d.target));
    invocations_.push_back(Invocation{true, d.target, {}});
    return;
  }

  Value target = static_cast<double>(d.target);
  auto add_listeners = [&](uint32_t node) {
    target = HostRef{HostKind::Node, node};
    if (!w.has_node(node)) return;
    for (const Listener& l : w.node(node).listeners)
      if (l.type == d.type) invocations_.push_back(Invocation{false, 0, l.callback});
  };
  switch (d.kind) {
    case EventKind::UserInput:
    case EventKind::Custom:
      add_listeners(d.target);
      break;
    case EventKind::ParseProgress:
      if (d.target < w.parsers.size()) add_listeners(w.parsers[d.target].container);
      break;
    case EventKind::TimerFired: {
      auto it = w.timers.find(d.target);
      if (it == w.timers.end()) break;  // cleared after it fired
      invocations_.push_back(Invocation{false, 0, it->second.callback});
      if (!it->second.period) w.timers.erase(it);
      break;
    }
    case EventKind::NetStateChange: {
      target = HostRef{HostKind::Request, d.target};
      auto it = w.requests.find(d.target);
      if (it != w.requests.end() && !lang::is_null(it->second.callback))
        invocations_.push_back(Invocation{false, 0, it->second.callback});
      break;
    }
    case EventKind::ScriptRun:
      break;
  }
  if (invocations_.empty()) return;

  lang::Heap& heap = interp_->heap();
  lang::ObjectId ev = heap.allocate(lang::ObjectKind::Plain);
  heap.at(ev).set("type", d.type);
  heap.at(ev).set("target", target);
  heap.at(ev).set("time", static_cast<double>(w.now));
  for (const auto& [k, v] : d.payload)
    heap.at(ev).set(k, std::visit([](const auto& x) -> Value { return x; }, v));
  args_.push_back(lang::ObjectRef{ev});
}

void EventRun::collect_outcome() {
  const lang::InvocationOutcome& o = interp_->last_outcome();
  if (o.error) completion_.errors.push_back(*o.error);
  if (o.budget_exceeded) budget_hit_ = true;
}

void EventRun::advance_to_statement() {
  while (interp_->idle()) {
    if (budget_hit_ || next_ >= invocations_.size()) {
      done_ = true;
      return;
    }
    const Invocation& inv = invocations_[next_++];
    ++completion_.invocations;
    invocation_start_ = completion_.statements;
    if (inv.script)
      interp_->begin_script(inv.script_id);
    else
      interp_->begin_invocation(inv.callee, args_);
    if (interp_->idle()) collect_outcome();
  }
}

void EventRun::step() {
  if (done_) throw lang::EngineFault("step on a finished event");
  uint64_t before = interp_->statements_executed();
  interp_->step();
  completion_.statements += interp_->statements_executed() - before;
  if (interp_->idle()) {
    collect_outcome();
    advance_to_statement();
  }
}

void EventRun::run_to_completion() {
  while (!done_) step();
}

}  // namespace ttd::host
