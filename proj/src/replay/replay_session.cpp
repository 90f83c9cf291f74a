#include "ttd/replay/replay_session.hpp"

#include "ttd/host/host_update.hpp"
#include "ttd/record/binary_io.hpp"
#include "ttd/record/graph.hpp"

namespace ttd::replay {

using namespace ttd::host;
using record::ConcurrentEntry;
using record::EventEntry;
using record::InterEventEntry;
using record::LogEntry;
using record::SimpleEntry;

std::shared_ptr<const lang::Program> program_for(const record::Trace& trace) {
  return std::make_shared<const lang::Program>(lang::parse_program(trace.scripts));
}

class ReplaySession::Hooks : public InteractionHooks {
 public:
  explicit Hooks(ReplaySession& s) : s_(s) {}

  void before_call(uint64_t interaction, HostCallKind kind) override {
    const auto& log = s_.trace_->log;
    while (s_.cursor_ < log.size()) {
      const auto* c = std::get_if<ConcurrentEntry>(&log[s_.cursor_]);
      if (!c) break;
      if (c->interaction > interaction) break;
      if (c->interaction < interaction)
        s_.diverge(DivergenceKind::UnexpectedHostCall,
                   "concurrent updates at interaction " + std::to_string(c->interaction),
                   std::string(host_call_name(kind)) + " at interaction " + std::to_string(interaction));
      for (const HostUpdate& u : c->updates) s_.apply(u);
      ++s_.cursor_;
    }
    if (s_.cursor_ >= log.size()) return;
    const auto* simple = std::get_if<SimpleEntry>(&log[s_.cursor_]);
    if (!simple) return;
    if (simple->interaction < interaction ||
        (simple->interaction == interaction && (!is_logged_call(kind) || simple->kind != kind)))
      s_.diverge(DivergenceKind::UnexpectedHostCall,
                 std::string(host_call_name(simple->kind)) + " at interaction " +
                     std::to_string(simple->interaction),
                 std::string(host_call_name(kind)) + " at interaction " + std::to_string(interaction));
  }

  std::optional<Value> logged_result(uint64_t interaction, HostCallKind kind) override {
    const auto& log = s_.trace_->log;
    const SimpleEntry* simple =
        s_.cursor_ < log.size() ? std::get_if<SimpleEntry>(&log[s_.cursor_]) : nullptr;
    if (!simple || simple->interaction != interaction || simple->kind != kind)
      s_.diverge(DivergenceKind::MissingLogEntry,
                 std::string(host_call_name(kind)) + " result in the log",
                 s_.cursor_ < log.size() ? record::describe(log[s_.cursor_]) : "end of log");
    ++s_.cursor_;
    return Value{simple->value};
  }

  void after_call(uint64_t, HostCallKind, const Value&) override {}

 private:
  ReplaySession& s_;
};

ReplaySession::ReplaySession(std::shared_ptr<const record::Trace> trace,
                             std::shared_ptr<const lang::Program> program)
    : trace_(std::move(trace)),
      program_(program ? std::move(program) : program_for(*trace_)),
      env_(world_, *program_),
      hooks_(std::make_unique<Hooks>(*this)) {
  env_.set_hooks(hooks_.get());
}

ReplaySession::~ReplaySession() = default;

void ReplaySession::diverge(DivergenceKind kind, std::string expected, std::string observed) {
  started_ = false;
  DivergenceReport r;
  r.kind = kind;
  r.event_index = next_event_;
  r.interaction = world_.interactions;
  r.expected = std::move(expected);
  r.observed = std::move(observed);
  throw DivergenceError(std::move(r));
}

void ReplaySession::apply(const HostUpdate& u) {
  try {
    apply_update(world_, u);
  } catch (const HostError& e) {
    diverge(DivergenceKind::StateMismatch, "applicable update " + describe(u), e.what());
  }
}

void ReplaySession::require_started() const {
  if (!started_) throw std::logic_error("replay session is not positioned; call start()");
}

void ReplaySession::start(size_t checkpoint_index) {
  if (checkpoint_index >= trace_->checkpoints.size())
    throw std::out_of_range("no checkpoint " + std::to_string(checkpoint_index));
  start_from(trace_->checkpoints[checkpoint_index]);
}

void ReplaySession::start_from(const record::Checkpoint& cp) {
  run_.reset();
  record::DecodedGraph g = record::decode_graph(cp.graph, program_->functions().size());
  if (cp.log_position > trace_->log.size() || cp.event_index > trace_->event_count)
    throw record::IntegrityError("checkpoint points past the end of the trace");
  heap_ = std::move(g.heap);
  world_ = std::move(g.world);
  env_.set_world(world_);
  interp_ = std::make_unique<lang::Interpreter>(program_, heap_, env_);
  interp_->set_statement_budget(trace_->statement_budget);
  cursor_ = cp.log_position;
  next_event_ = cp.event_index;
  started_ = true;
}

void ReplaySession::apply_inter_event() {
  require_started();
  if (in_event()) throw std::logic_error("apply_inter_event inside an event");
  const auto& log = trace_->log;
  if (cursor_ >= log.size()) return;
  const auto* ie = std::get_if<InterEventEntry>(&log[cursor_]);
  if (!ie || ie->before_event_index != next_event_) return;
  for (const HostUpdate& u : ie->updates) apply(u);
  ++cursor_;
}

void ReplaySession::begin_event() {
  require_started();
  if (in_event()) throw std::logic_error("begin_event inside an event");
  if (next_event_ >= trace_->event_count) throw std::logic_error("no events left to replay");
  apply_inter_event();
  const auto& log = trace_->log;
  const EventEntry* ev = cursor_ < log.size() ? std::get_if<EventEntry>(&log[cursor_]) : nullptr;
  if (!ev || ev->event_index != next_event_)
    diverge(DivergenceKind::LeftoverEntries, "event " + std::to_string(next_event_),
            cursor_ < log.size() ? record::describe(log[cursor_]) : "end of log");
  const PendingEvent* queued = nullptr;
  for (const PendingEvent& p : world_.queue)
    if (p.seq == ev->seq) queued = &p;
  if (!queued || !(queued->descriptor == ev->descriptor))
    diverge(DivergenceKind::StateMismatch, "queued event #" + std::to_string(ev->seq),
            queued ? "different descriptor" : "not in queue");
  ++cursor_;
  env_.reset_digest();
  ++events_replayed_;
  run_ = std::make_unique<EventRun>(world_, *interp_, take_event(world_, ev->seq), next_event_);
  if (run_->done()) end_event();
}

void ReplaySession::step() {
  if (!in_event()) throw std::logic_error("step outside an event");
  run_->step();
  if (run_->done()) end_event();
}

void ReplaySession::finish_event() {
  if (!in_event()) return;
  run_->run_to_completion();
  end_event();
}

void ReplaySession::replay_event() {
  if (!in_event()) begin_event();
  finish_event();
}

void ReplaySession::replay_until_event(uint32_t k) {
  require_started();
  if (k < next_event_ || (k == next_event_ && in_event()))
    throw std::logic_error("cannot replay backwards");
  while (next_event_ < k) replay_event();
}

void ReplaySession::run_to_end() {
  require_started();
  while (!finished()) replay_event();
  apply_inter_event();
  if (cursor_ != trace_->log.size())
    diverge(DivergenceKind::LeftoverEntries, "end of log", record::describe(trace_->log[cursor_]));
}

void ReplaySession::end_event() {
  const auto& log = trace_->log;
  if (cursor_ < log.size() && (std::holds_alternative<SimpleEntry>(log[cursor_]) ||
                               std::holds_alternative<ConcurrentEntry>(log[cursor_])))
    diverge(DivergenceKind::LeftoverEntries, "end of event " + std::to_string(next_event_),
            record::describe(log[cursor_]));
  check_audit(run_->completion());
  run_.reset();
  ++next_event_;
}

void ReplaySession::check_audit(const EventCompletion& c) {
  if (next_event_ >= trace_->audit.events.size()) return;
  const record::EventAudit& a = trace_->audit.events[next_event_];
  auto mismatch = [&](const char* what, auto want, auto got) {
    diverge(DivergenceKind::StateMismatch, std::string(what) + " " + std::to_string(want),
            std::to_string(got));
  };
  if (a.statements != c.statements) mismatch("statements", a.statements, c.statements);
  if (a.interactions != world_.interactions) mismatch("interactions", a.interactions, world_.interactions);
  if (a.host_calls != env_.calls()) mismatch("host calls", a.host_calls, env_.calls());
  if (a.host_digest != env_.digest()) mismatch("host digest", a.host_digest, env_.digest());
  if (a.errors != c.errors)
    diverge(DivergenceKind::StateMismatch, std::to_string(a.errors.size()) + " guest errors",
            std::to_string(c.errors.size()) + " guest errors" +
                (c.errors.empty() ? "" : " (" + c.errors.front() + ")"));
}

record::Checkpoint ReplaySession::capture_checkpoint() {
  require_started();
  if (in_event()) throw std::logic_error("checkpoints are taken between events");
  apply_inter_event();
  record::Checkpoint cp;
  cp.event_index = next_event_;
  cp.interaction = world_.interactions;
  cp.log_position = cursor_;
  cp.now = world_.now;
  cp.graph = record::encode_graph(heap_, world_);
  return cp;
}

}  // namespace ttd::replay
