#include "ttd/host/world.hpp"

#include <algorithm>
#include <charconv>

#include "ttd/host/markup.hpp"

namespace ttd::host {

const std::string* DomNode::attribute(std::string_view name) const {
  for (const auto& [k, v] : attributes)
    if (k == name) return &v;
  return nullptr;
}

void DomNode::set_attribute(std::string_view name, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == name) {
      v = std::move(value);
      return;
    }
  }
  attributes.emplace_back(std::string(name), std::move(value));
}

bool DomNode::remove_attribute(std::string_view name) {
  auto it = std::find_if(attributes.begin(), attributes.end(),
                         [&](const auto& a) { return a.first == name; });
  if (it == attributes.end()) return false;
  attributes.erase(it);
  return true;
}

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::UserInput: return "user-input";
    case EventKind::TimerFired: return "timer-fired";
    case EventKind::NetStateChange: return "net-state-change";
    case EventKind::ParseProgress: return "parse-progress";
    case EventKind::Custom: return "custom";
    case EventKind::ScriptRun: return "script-run";
  }
  return "?";
}

const char* xhr_state_name(XhrState s) {
  switch (s) {
    case XhrState::Unsent: return "UNSENT";
    case XhrState::Opened: return "OPENED";
    case XhrState::HeadersReceived: return "HEADERS_RECEIVED";
    case XhrState::Loading: return "LOADING";
    case XhrState::Done: return "DONE";
  }
  return "?";
}

std::string bound_attribute_value(uint64_t frame_count) {
  return "rotate(" + std::to_string((frame_count * 6) % 360) + "deg)";
}

HostWorld::HostWorld() {
  DomNode root;
  root.id = kRootNode;
  root.tag = "document";
  root.set_attribute("id", "root");
  nodes.push_back(std::move(root));
}

DomNode& HostWorld::node(uint32_t id) {
  if (!has_node(id)) throw HostError("unknown node " + std::to_string(id));
  return nodes[id];
}

const DomNode& HostWorld::node(uint32_t id) const {
  if (!has_node(id)) throw HostError("unknown node " + std::to_string(id));
  return nodes[id];
}

bool HostWorld::is_connected(uint32_t id) const {
  while (has_node(id)) {
    if (id == kRootNode) return true;
    id = nodes[id].parent;
  }
  return false;
}

uint32_t HostWorld::create_node(std::string tag) {
  DomNode n;
  n.id = static_cast<uint32_t>(nodes.size());
  n.tag = std::move(tag);
  nodes.push_back(std::move(n));
  return nodes.back().id;
}

void HostWorld::append_child(uint32_t parent, uint32_t child) {
  node(parent);
  DomNode& c = node(child);
  if (child == kRootNode) throw HostError("cannot move the root node");
  for (uint32_t a = parent; a != kNoNode; a = nodes[a].parent)
    if (a == child) throw HostError("appendChild would create a cycle");
  if (c.parent != kNoNode) remove_child(c.parent, child);
  nodes[child].parent = parent;
  nodes[parent].children.push_back(child);
}

void HostWorld::remove_child(uint32_t parent, uint32_t child) {
  DomNode& p = node(parent);
  auto it = std::find(p.children.begin(), p.children.end(), child);
  if (it == p.children.end())
    throw HostError("node " + std::to_string(child) + " is not a child of " + std::to_string(parent));
  p.children.erase(it);
  nodes[child].parent = kNoNode;
}

std::optional<uint32_t> HostWorld::find_by_id(std::string_view value) const {
  std::vector<uint32_t> stack{kRootNode};
  while (!stack.empty()) {
    uint32_t id = stack.back();
    stack.pop_back();
    const DomNode& n = nodes[id];
    if (const std::string* a = n.attribute("id"); a && *a == value) return id;
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return std::nullopt;
}

namespace {

std::optional<int64_t> parse_int(std::string_view s) {
  int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

void HostWorld::apply_attribute(uint32_t id, const std::string& name, const std::string& value) {
  DomNode& n = node(id);
  if (name == kFrameAttribute && animations.contains(id)) {
    auto v = parse_int(value);
    if (!v || *v < 0) throw HostError("frame must be a non-negative integer");
    set_frame_count(id, static_cast<uint64_t>(*v));
    return;
  }
  n.set_attribute(name, value);
  if (name == "src") {
    ExternalResource r;
    r.url = value;
    r.requested_at = now;
    n.resource = std::move(r);
  } else if (name == "animate") {
    auto period = parse_int(value);
    if (!period || *period <= 0) throw HostError("animate expects a positive period in ms");
    start_animation(id, static_cast<uint32_t>(*period));
  }
}

void HostWorld::start_animation(uint32_t id, uint32_t period) {
  node(id);
  AnimationState a;
  a.node = id;
  a.period = period;
  a.started_at = now;
  animations[id] = a;
  nodes[id].set_attribute(kFrameAttribute, bound_attribute_value(0));
}

void HostWorld::set_frame_count(uint32_t id, uint64_t frame_count) {
  auto it = animations.find(id);
  if (it == animations.end()) throw HostError("node " + std::to_string(id) + " is not animated");
  it->second.frame_count = frame_count;
  node(id).set_attribute(kFrameAttribute, bound_attribute_value(frame_count));
}

uint64_t HostWorld::enqueue(EventDescriptor d) {
  switch (d.kind) {
    case EventKind::UserInput:
    case EventKind::Custom:
      if (!has_node(d.target) || !is_connected(d.target))
        throw HostError("event target node " + std::to_string(d.target) + " does not exist");
      break;
    case EventKind::TimerFired:
      if (!timers.contains(d.target)) throw HostError("unknown timer " + std::to_string(d.target));
      break;
    case EventKind::NetStateChange:
      if (!requests.contains(d.target))
        throw HostError("unknown request " + std::to_string(d.target));
      break;
    case EventKind::ParseProgress:
      if (d.target >= parsers.size())
        throw HostError("unknown document " + std::to_string(d.target));
      break;
    case EventKind::ScriptRun:
      break;
  }
  PendingEvent e;
  e.seq = next_seq++;
  e.descriptor = std::move(d);
  queue.push_back(std::move(e));
  return queue.back().seq;
}

std::optional<std::string> HostWorld::storage_get(std::string_view key) const {
  for (const auto& [k, v] : storage)
    if (k == key) return v;
  return std::nullopt;
}

void HostWorld::storage_set(std::string key, std::string value) {
  for (auto& [k, v] : storage) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  storage.emplace_back(std::move(key), std::move(value));
}

bool HostWorld::storage_remove(std::string_view key) {
  auto it = std::find_if(storage.begin(), storage.end(),
                         [&](const auto& kv) { return kv.first == key; });
  if (it == storage.end()) return false;
  storage.erase(it);
  return true;
}

HostWorld make_initial_world(const std::vector<std::string>& documents, uint64_t prng_seed,
                             uint32_t script_count) {
  HostWorld w;
  w.prng.reset(prng_seed);
  for (size_t i = 0; i < documents.size(); ++i) {
    parse_markup(documents[i]);  // reject malformed markup up front
    ParserStream p;
    p.document = static_cast<uint32_t>(i);
    p.markup = documents[i];
    if (i > 0) {
      p.container = w.create_node("frame-document");
      w.node(p.container).set_attribute("id", "doc" + std::to_string(i));
      w.append_child(kRootNode, p.container);
    }
    w.parsers.push_back(std::move(p));
  }
  for (uint32_t i = 0; i < script_count; ++i) {
    EventDescriptor d;
    d.kind = EventKind::ScriptRun;
    d.type = "script";
    d.target = i;
    w.enqueue(std::move(d));
  }
  return w;
}

}  // namespace ttd::host
