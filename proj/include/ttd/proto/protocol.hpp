#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ttd/debugger/debug_session.hpp"

namespace ttd::proto {

using nlohmann::json;

inline constexpr int kProtocolVersion = 1;

// Error codes carried in `error.code`; `error.name` holds the string form.
enum ErrorCode : int {
  kParseError = -32700,
  kInvalidRequest = -32600,
  kUnknownMethod = -32601,
  kInvalidParams = -32602,
  kInternalError = -32603,
  kBusy = -32000,
  kNoPredecessor = -32001,
  kUnknownSession = -32002,
  kTargetNotReached = -32003,
  kDivergence = -32004,
  kTraceError = -32005,
  kNotPaused = -32006,
};

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

const char* error_name(ErrorCode code);

// One connected client. send() may be called from any thread.
class Peer {
 public:
  virtual ~Peer() = default;
  virtual void send(const json& message) = 0;

 private:
  friend class ProtocolEngine;
  std::mutex ids_mu_;
  std::set<std::string> used_ids_;
};

struct EngineOptions {
  // Used by session.open when no trace path is given.
  std::optional<std::string> default_trace;
  debugger::DebugOptions debug;
  // Runs while an exec.* command holds its session (instrumentation for tests).
  std::function<void()> on_exec_start;
};

// Transport-independent request handling. Requests, responses and
// notifications are single JSON objects; see docs/protocol.md.
class ProtocolEngine {
 public:
  explicit ProtocolEngine(EngineOptions options = {});
  ~ProtocolEngine();

  static json hello();
  // Handles one request line. Never throws; errors become error responses.
  void handle_line(Peer& peer, std::string_view line);
  // Closes the sessions opened by `peer`.
  void disconnect(Peer& peer);
  size_t session_count() const;

 private:
  struct Session;

  EngineOptions options_;
  mutable std::mutex registry_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  uint64_t next_session_ = 1;

  json dispatch(Peer& peer, const std::string& method, const json& params);
  std::shared_ptr<Session> find(const json& params);
  json open(Peer& peer, const json& params);
  json close(Peer& peer, const json& params);
  json exec(Peer& peer, const std::string& method, const json& params);
  json inspect(const std::string& what, const json& params);
  json breakpoints(const std::string& method, const json& params);
  json timeline(const json& params);
};

}  // namespace ttd::proto
