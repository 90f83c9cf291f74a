#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ttd/host/prng.hpp"
#include "ttd/lang/value.hpp"

namespace ttd::host {

using lang::Value;

inline constexpr uint32_t kRootNode = 0;
inline constexpr uint32_t kNoNode = 0xffffffffu;

// Guest-encodable scalar used in event payloads and log values.
using PlainValue = std::variant<lang::Null, bool, double, std::string>;

struct ExternalResource {
  enum class State : uint8_t { Pending = 0, Loaded = 1, Failed = 2 };
  std::string url;
  State state = State::Pending;
  int64_t requested_at = 0;
  uint32_t width = 0;
  uint32_t height = 0;
  uint32_t bytes = 0;

  friend bool operator==(const ExternalResource&, const ExternalResource&) = default;
};

struct Listener {
  std::string type;
  Value callback;
  // Registered through an `on<type>` attribute; re-setting replaces in place.
  bool property_style = false;

  friend bool operator==(const Listener&, const Listener&) = default;
};

struct DomNode {
  uint32_t id = 0;
  std::string tag;
  std::vector<std::pair<std::string, std::string>> attributes;
  uint32_t parent = kNoNode;
  std::vector<uint32_t> children;
  std::vector<Listener> listeners;
  std::optional<ExternalResource> resource;

  const std::string* attribute(std::string_view name) const;
  void set_attribute(std::string_view name, std::string value);
  bool remove_attribute(std::string_view name);

  friend bool operator==(const DomNode&, const DomNode&) = default;
};

enum class EventKind : uint8_t {
  UserInput = 0,
  TimerFired = 1,
  NetStateChange = 2,
  ParseProgress = 3,
  Custom = 4,
  ScriptRun = 5,
};

const char* event_kind_name(EventKind k);

struct EventDescriptor {
  EventKind kind = EventKind::Custom;
  std::string type;
  // Node id, timer id, request id, document id or script id depending on kind.
  uint32_t target = 0;
  std::vector<std::pair<std::string, PlainValue>> payload;

  friend bool operator==(const EventDescriptor&, const EventDescriptor&) = default;
};

struct PendingEvent {
  uint64_t seq = 0;
  EventDescriptor descriptor;

  friend bool operator==(const PendingEvent&, const PendingEvent&) = default;
};

struct Timer {
  uint32_t id = 0;
  int64_t due = 0;
  std::optional<int64_t> period;
  Value callback;
  // One-shot timer that fired and whose event has not been dispatched yet.
  bool fired = false;

  friend bool operator==(const Timer&, const Timer&) = default;
};

enum class XhrState : uint8_t { Unsent = 0, Opened = 1, HeadersReceived = 2, Loading = 3, Done = 4 };

const char* xhr_state_name(XhrState s);

struct NetRequest {
  uint32_t id = 0;
  std::string url;
  XhrState state = XhrState::Unsent;
  uint32_t status = 0;
  uint64_t received = 0;
  std::string response;
  bool sent = false;
  int64_t sent_at = 0;
  Value callback;

  friend bool operator==(const NetRequest&, const NetRequest&) = default;
};

struct ParserStream {
  uint32_t document = 0;
  uint32_t container = kRootNode;
  std::string markup;
  uint64_t consumed = 0;
  // Node ids of elements emitted so far, in document order.
  std::vector<uint32_t> emitted;

  friend bool operator==(const ParserStream&, const ParserStream&) = default;
};

struct AnimationState {
  uint32_t node = 0;
  uint64_t frame_count = 0;
  uint32_t period = 16;
  bool active = true;
  int64_t started_at = 0;

  friend bool operator==(const AnimationState&, const AnimationState&) = default;
};

// The attribute an animation drives; a pure function of its frame count.
inline constexpr std::string_view kFrameAttribute = "frame";
std::string bound_attribute_value(uint64_t frame_count);

// Complete high-level state of the simulated layout engine. Every field is
// checkpointed; nothing else influences guest-visible behavior.
struct HostWorld {
  std::vector<DomNode> nodes;
  std::deque<PendingEvent> queue;
  uint64_t next_seq = 0;
  std::map<uint32_t, Timer> timers;
  uint32_t next_timer_id = 1;
  Prng prng;
  int64_t now = 0;
  std::map<uint32_t, NetRequest> requests;
  uint32_t next_request_id = 1;
  std::vector<ParserStream> parsers;
  std::map<uint32_t, AnimationState> animations;
  std::vector<std::pair<std::string, std::string>> storage;
  uint64_t interactions = 0;
  std::vector<std::string> console;

  HostWorld();

  DomNode& node(uint32_t id);
  const DomNode& node(uint32_t id) const;
  bool has_node(uint32_t id) const { return id < nodes.size(); }
  // Attached to the root through parent links.
  bool is_connected(uint32_t id) const;
  uint32_t create_node(std::string tag);
  void append_child(uint32_t parent, uint32_t child);
  void remove_child(uint32_t parent, uint32_t child);
  // Pre-order search of the connected tree for attribute id == value.
  std::optional<uint32_t> find_by_id(std::string_view value) const;

  // Attribute writes with their side effects (resources, animations).
  void apply_attribute(uint32_t node, const std::string& name, const std::string& value);

  void start_animation(uint32_t node, uint32_t period);
  void set_frame_count(uint32_t node, uint64_t frame_count);

  // Appends to the queue; throws HostError for dangling targets.
  uint64_t enqueue(EventDescriptor descriptor);

  std::optional<std::string> storage_get(std::string_view key) const;
  void storage_set(std::string key, std::string value);
  bool storage_remove(std::string_view key);

  friend bool operator==(const HostWorld&, const HostWorld&) = default;
};

class HostError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Builds the initial world for a session: root node, one parser stream per
// document (documents after the first get a container node), seeded PRNG and
// one queued script-run event per script.
HostWorld make_initial_world(const std::vector<std::string>& documents, uint64_t prng_seed,
                             uint32_t script_count = 0);

}  // namespace ttd::host
