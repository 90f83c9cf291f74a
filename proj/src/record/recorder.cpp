#include "ttd/record/recorder.hpp"

#include "ttd/host/canonical.hpp"
#include "ttd/host/event_run.hpp"
#include "ttd/host/host_env.hpp"
#include "ttd/host/scheduler.hpp"
#include "ttd/record/graph.hpp"

namespace ttd::record {

using namespace ttd::host;

namespace {

// Consecutive clock advances collapse to the last one.
void append_updates(std::vector<HostUpdate>& into, std::vector<HostUpdate> more) {
  for (HostUpdate& u : more) {
    if (!into.empty() && std::holds_alternative<ClockAdvance>(u) &&
        std::holds_alternative<ClockAdvance>(into.back()))
      into.back() = std::move(u);
    else
      into.push_back(std::move(u));
  }
}

class RecordHooks : public InteractionHooks {
 public:
  RecordHooks(Scheduler& scheduler, std::vector<LogEntry>& log) : scheduler_(scheduler), log_(log) {}

  void before_call(uint64_t interaction, HostCallKind) override {
    if (!scheduler_.roll_concurrency()) return;
    std::vector<HostUpdate> ups;
    append_updates(ups, scheduler_.concurrent_tick());
    if (!ups.empty()) log_.push_back(ConcurrentEntry{interaction, std::move(ups)});
  }

  void after_call(uint64_t interaction, HostCallKind kind, const Value& result) override {
    if (!is_logged_call(kind)) return;
    log_.push_back(SimpleEntry{interaction, kind, std::get<double>(result)});
  }

 private:
  Scheduler& scheduler_;
  std::vector<LogEntry>& log_;
};

}  // namespace

Trace record_session(std::shared_ptr<const lang::Program> program, const Scenario& scenario,
                     const RecordingPolicy& policy) {
  if (policy.checkpoint_interval_ms <= 0) throw std::invalid_argument("checkpoint interval must be > 0");
  Trace trace;
  for (const lang::Script& s : program->scripts()) trace.scripts.emplace_back(s.name, s.source);
  trace.scenario_json = scenario_to_json(scenario);
  trace.scenario_hash = scenario_hash(scenario);
  trace.checkpoint_interval_ms = static_cast<uint64_t>(policy.checkpoint_interval_ms);
  trace.statement_budget = policy.statement_budget;

  HostWorld world = make_initial_world(scenario.documents, scenario.prng_seed,
                                       static_cast<uint32_t>(program->scripts().size()));
  lang::Heap heap;
  HostEnv env(world, *program);
  lang::Interpreter interp(program, heap, env);
  interp.set_statement_budget(policy.statement_budget);
  Scheduler scheduler(scenario, world);
  RecordHooks hooks(scheduler, trace.log);
  env.set_hooks(&hooks);

  std::vector<HostUpdate> pending;
  int64_t last_bucket = -1;
  uint32_t k = 0;
  for (;;) {
    append_updates(pending, scheduler.take_deferred());
    if (world.queue.empty()) {
      if (k >= policy.max_events || scheduler.finished() || scheduler.quiescent()) break;
      append_updates(pending, scheduler.advance());
      continue;
    }
    if (k >= policy.max_events) break;
    if (!pending.empty()) trace.log.push_back(InterEventEntry{k, std::move(pending)});
    pending.clear();

    int64_t bucket = world.now / policy.checkpoint_interval_ms;
    if (policy.checkpoints && (k == 0 || policy.checkpoint_every_event || bucket > last_bucket)) {
      Checkpoint c;
      c.event_index = k;
      c.interaction = world.interactions;
      c.log_position = trace.log.size();
      c.now = world.now;
      c.graph = encode_graph(heap, world);
      trace.checkpoints.push_back(std::move(c));
    }
    last_bucket = std::max(last_bucket, bucket);

    const PendingEvent& next = world.queue.front();
    trace.log.push_back(EventEntry{k, next.seq, next.descriptor});
    env.reset_digest();
    EventRun run(world, interp, take_event(world, next.seq), k);
    run.run_to_completion();

    EventAudit a;
    a.event_index = k;
    a.statements = run.completion().statements;
    a.interactions = world.interactions;
    a.host_calls = env.calls();
    a.host_digest = env.digest();
    a.errors = run.completion().errors;
    trace.audit.events.push_back(std::move(a));
    ++k;
  }
  // Background progress after the last event still shapes the final state.
  if (!pending.empty()) trace.log.push_back(InterEventEntry{k, std::move(pending)});
  trace.event_count = k;
  trace.audit.final_dump = canonical_dump(world, *program, heap);
  return trace;
}

}  // namespace ttd::record
