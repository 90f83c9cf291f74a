#include "ttd/proto/protocol.hpp"

#include "ttd/proto/views.hpp"
#include "ttd/record/binary_io.hpp"
#include "ttd/record/trace_file.hpp"

namespace ttd::proto {

using debugger::DebugSession;
using debugger::StopInfo;
using debugger::StopReason;

const char* error_name(ErrorCode code) {
  switch (code) {
    case kParseError: return "parse-error";
    case kInvalidRequest: return "invalid-request";
    case kUnknownMethod: return "unknown-method";
    case kInvalidParams: return "invalid-params";
    case kInternalError: return "internal-error";
    case kBusy: return "busy";
    case kNoPredecessor: return "no-predecessor";
    case kUnknownSession: return "unknown-session";
    case kTargetNotReached: return "target-not-reached";
    case kDivergence: return "divergence";
    case kTraceError: return "trace-error";
    case kNotPaused: return "not-paused";
  }
  return "error";
}

struct ProtocolEngine::Session {
  std::string id;
  Peer* owner = nullptr;
  std::unique_ptr<DebugSession> debug;
  std::mutex mu;
  std::atomic<bool> busy{false};
};

namespace {

json error_response(const json& id, ErrorCode code, const std::string& message) {
  return {{"id", id}, {"ok", false},
          {"error", {{"code", static_cast<int>(code)}, {"name", error_name(code)}, {"message", message}}}};
}

json notification(const char* method, json params) {
  return {{"method", method}, {"params", std::move(params)}};
}

template <typename T>
T param(const json& params, const char* key) {
  auto it = params.find(key);
  if (it == params.end()) throw ProtocolError(kInvalidParams, std::string("missing '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ProtocolError(kInvalidParams, std::string("bad '") + key + "'");
  }
}

template <typename T>
T param_or(const json& params, const char* key, T fallback) {
  if (!params.contains(key)) return fallback;
  return param<T>(params, key);
}

lang::LogicalTime time_param(const json& params, const char* key) {
  json t = param<json>(params, key);
  if (!t.is_object()) throw ProtocolError(kInvalidParams, std::string("bad '") + key + "'");
  return {param<uint64_t>(t, "c"), param<uint64_t>(t, "b")};
}

// Resets the busy flag when an exec command finishes.
struct BusyGuard {
  std::atomic<bool>& flag;
  ~BusyGuard() { flag = false; }
};

}  // namespace

ProtocolEngine::ProtocolEngine(EngineOptions options) : options_(std::move(options)) {}
ProtocolEngine::~ProtocolEngine() = default;

json ProtocolEngine::hello() {
  return notification("hello", {{"protocol", kProtocolVersion}, {"server", "ttd"}});
}

size_t ProtocolEngine::session_count() const {
  std::lock_guard lock(registry_mu_);
  return sessions_.size();
}

void ProtocolEngine::handle_line(Peer& peer, std::string_view line) {
  json id = nullptr;
  try {
    json req = json::parse(line, nullptr, false);
    if (req.is_discarded()) {
      peer.send(error_response(nullptr, kParseError, "malformed JSON"));
      return;
    }
    if (!req.is_object()) throw ProtocolError(kInvalidRequest, "request must be an object");
    auto idit = req.find("id");
    if (idit == req.end() || !(idit->is_number_integer() || idit->is_string()))
      throw ProtocolError(kInvalidRequest, "request needs an integer or string id");
    id = *idit;
    {
      std::lock_guard lock(peer.ids_mu_);
      if (!peer.used_ids_.insert(idit->dump()).second)
        throw ProtocolError(kInvalidRequest, "duplicate id " + idit->dump());
    }
    auto m = req.find("method");
    if (m == req.end() || !m->is_string()) throw ProtocolError(kInvalidRequest, "missing method");
    json params = req.value("params", json::object());
    if (!params.is_object()) throw ProtocolError(kInvalidParams, "params must be an object");
    json result = dispatch(peer, m->get<std::string>(), params);
    peer.send({{"id", id}, {"ok", true}, {"result", std::move(result)}});
  } catch (const ProtocolError& e) {
    peer.send(error_response(id, e.code(), e.what()));
  } catch (const std::exception& e) {
    peer.send(error_response(id, kInternalError, e.what()));
  }
}

void ProtocolEngine::disconnect(Peer& peer) {
  std::vector<std::shared_ptr<Session>> gone;
  {
    std::lock_guard lock(registry_mu_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      if (it->second->owner == &peer) {
        gone.push_back(it->second);
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
  }
  // Wait for in-flight commands on those sessions to finish.
  for (auto& s : gone) std::lock_guard lock(s->mu);
}

std::shared_ptr<ProtocolEngine::Session> ProtocolEngine::find(const json& params) {
  std::string id = param<std::string>(params, "session");
  std::lock_guard lock(registry_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ProtocolError(kUnknownSession, "no session '" + id + "'");
  return it->second;
}

json ProtocolEngine::dispatch(Peer& peer, const std::string& method, const json& params) {
  if (method == "session.open") return open(peer, params);
  if (method == "session.close") return close(peer, params);
  if (method == "session.source") {
    auto s = find(params);
    uint32_t script = param_or<uint32_t>(params, "script", 0);
    std::lock_guard lock(s->mu);
    const auto& scripts = s->debug->program().scripts();
    if (script >= scripts.size()) throw ProtocolError(kInvalidParams, "no such script");
    return {{"script", script}, {"name", scripts[script].name}, {"source", scripts[script].source}};
  }
  if (method.starts_with("exec.")) return exec(peer, method, params);
  if (method.starts_with("bp.")) return breakpoints(method, params);
  if (method.starts_with("inspect.")) return inspect(method.substr(8), params);
  if (method == "timeline.info") return timeline(params);
  throw ProtocolError(kUnknownMethod, "unknown method '" + method + "'");
}

json ProtocolEngine::open(Peer& peer, const json& params) {
  std::string path = params.contains("trace") ? param<std::string>(params, "trace")
                                              : options_.default_trace.value_or("");
  if (path.empty()) throw ProtocolError(kInvalidParams, "missing 'trace'");
  auto s = std::make_shared<Session>();
  try {
    auto trace = std::make_shared<const record::Trace>(record::load_trace(path));
    s->debug = std::make_unique<DebugSession>(trace, options_.debug);
  } catch (const std::exception& e) {
    throw ProtocolError(kTraceError, e.what());
  }
  s->owner = &peer;
  StopInfo stop = s->debug->start();
  {
    std::lock_guard lock(registry_mu_);
    s->id = "s" + std::to_string(next_session_++);
    sessions_[s->id] = s;
  }
  peer.send(notification("stopped", pause_json(stop)));
  json scripts = json::array();
  for (const auto& sc : s->debug->program().scripts()) scripts.push_back(sc.name);
  return {{"session", s->id},
          {"events", s->debug->trace().event_count},
          {"checkpoints", s->debug->trace().checkpoints.size()},
          {"scripts", scripts},
          {"pause", pause_json(stop)}};
}

json ProtocolEngine::close(Peer& peer, const json& params) {
  auto s = find(params);
  {
    std::lock_guard lock(registry_mu_);
    sessions_.erase(s->id);
  }
  std::lock_guard lock(s->mu);
  peer.send(notification("sessionEnded", {{"session", s->id}}));
  return {{"closed", s->id}};
}

json ProtocolEngine::exec(Peer& peer, const std::string& method, const json& params) {
  auto s = find(params);
  bool expected = false;
  if (!s->busy.compare_exchange_strong(expected, true))
    throw ProtocolError(kBusy, "session " + s->id + " is running another command");
  BusyGuard guard{s->busy};
  std::lock_guard lock(s->mu);
  if (options_.on_exec_start) options_.on_exec_start();
  DebugSession& d = *s->debug;
  std::string sid = s->id;
  d.on_checkpoint_created([&](const record::Checkpoint& c) {
    peer.send(notification("checkpointCreated", {{"session", sid}, {"eventIndex", c.event_index}}));
  });
  if (!d.started() && method != "exec.travelTo")
    throw ProtocolError(kNotPaused, "session has no pause state; use exec.travelTo");

  StopInfo stop;
  try {
    if (method == "exec.continue") stop = d.continue_forward();
    else if (method == "exec.stepForward") stop = d.step_into();
    else if (method == "exec.stepOver") stop = d.step_over();
    else if (method == "exec.stepOut") stop = d.step_out();
    else if (method == "exec.stepBack") stop = d.step_back();
    else if (method == "exec.reverseStepOver") stop = d.reverse_step_over();
    else if (method == "exec.reverseStepOut") stop = d.reverse_step_out();
    else if (method == "exec.travelTo") {
      uint32_t event = param<uint32_t>(params, "event");
      if (params.contains("location")) {
        json loc = param<json>(params, "location");
        uint32_t script = param_or<uint32_t>(loc, "script", 0);
        auto stmt = d.program().find_line(script, param<uint32_t>(loc, "line"));
        if (!stmt) throw ProtocolError(kInvalidParams, "no statement on that line");
        stop = d.time_travel_to(event, d.program().stmt(*stmt).loc, time_param(params, "logicalTime"));
      } else {
        stop = d.time_travel_to(event, param_or<uint64_t>(params, "ordinal", 0));
      }
    } else {
      throw ProtocolError(kUnknownMethod, "unknown method '" + method + "'");
    }
  } catch (const debugger::TargetNotReached& e) {
    throw ProtocolError(kTargetNotReached, e.what());
  } catch (const std::out_of_range& e) {
    throw ProtocolError(kInvalidParams, e.what());
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(kInvalidParams, e.what());
  }
  d.on_checkpoint_created(nullptr);

  if (stop.reason == StopReason::NoPredecessor)
    throw ProtocolError(kNoPredecessor, "no earlier statement to step back to");
  if (stop.reason == StopReason::Divergence) {
    peer.send(notification("divergence", {{"session", sid}, {"report", divergence_json(*stop.divergence)}}));
    throw ProtocolError(kDivergence, stop.divergence->to_string());
  }
  json pause = pause_json(stop);
  json note = pause;
  note["session"] = sid;
  peer.send(notification("stopped", std::move(note)));
  return pause;
}

json ProtocolEngine::breakpoints(const std::string& method, const json& params) {
  auto s = find(params);
  std::lock_guard lock(s->mu);
  DebugSession& d = *s->debug;
  if (method == "bp.set") {
    std::optional<lang::LogicalTime> when;
    if (params.contains("logicalTime")) when = time_param(params, "logicalTime");
    uint32_t id;
    try {
      id = d.add_breakpoint(param_or<uint32_t>(params, "script", 0), param<uint32_t>(params, "line"), when);
    } catch (const std::invalid_argument& e) {
      throw ProtocolError(kInvalidParams, e.what());
    }
    return breakpoint_json(d.breakpoints().at(id));
  }
  if (method == "bp.clear") {
    uint32_t id = param<uint32_t>(params, "id");
    if (!d.remove_breakpoint(id)) throw ProtocolError(kInvalidParams, "no breakpoint " + std::to_string(id));
    return {{"cleared", id}};
  }
  if (method == "bp.list") {
    json out = json::array();
    for (const auto& [_, bp] : d.breakpoints()) out.push_back(breakpoint_json(bp));
    return out;
  }
  throw ProtocolError(kUnknownMethod, "unknown method '" + method + "'");
}

json ProtocolEngine::inspect(const std::string& what, const json& params) {
  auto s = find(params);
  std::lock_guard lock(s->mu);
  DebugSession& d = *s->debug;
  if (!d.started()) throw ProtocolError(kNotPaused, "session has no pause state");
  const lang::Interpreter& in = d.replay().interpreter();
  size_t start = param_or<size_t>(params, "start", 0);
  size_t count = param_or<size_t>(params, "count", debugger::kPageSize);
  bool paused = d.position().at_statement;
  try {
    if (what == "stack") return paused ? frames_json(debugger::stack_frames(in)) : json::array();
    if (what == "locals") {
      if (!paused) return page_json({});
      return page_json(debugger::frame_variables(in, param_or<size_t>(params, "frame", 0), start, count));
    }
    if (what == "globals") return page_json(debugger::global_variables(in, start, count));
    if (what == "heap") {
      std::string path = param<std::string>(params, "path");
      json v = page_json(debugger::path_children(in, path, start, count));
      auto self = debugger::inspect_path(in, path);
      v["value"] = {{"name", self.name}, {"type", self.type}, {"value", self.value}, {"children", self.child_count}};
      return v;
    }
    return host_view(d.replay(), what);
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(kInvalidParams, e.what());
  } catch (const std::out_of_range& e) {
    throw ProtocolError(kInvalidParams, e.what());
  }
}

json ProtocolEngine::timeline(const json& params) {
  auto s = find(params);
  std::lock_guard lock(s->mu);
  DebugSession& d = *s->debug;
  json cps = json::array();
  for (const auto& c : d.trace().checkpoints) cps.push_back({{"event", c.event_index}, {"now", c.now}});
  json events = json::array();
  for (const auto& e : d.trace().log)
    if (auto* ev = std::get_if<record::EventEntry>(&e))
      events.push_back({{"index", ev->event_index},
                        {"kind", host::event_kind_name(ev->descriptor.kind)},
                        {"type", ev->descriptor.type}});
  return {{"events", d.trace().event_count},
          {"eventList", events},
          {"checkpoints", cps},
          {"opportunistic", d.checkpoints().cached_events()},
          {"position", position_json(d.position())}};
}

}  // namespace ttd::proto
