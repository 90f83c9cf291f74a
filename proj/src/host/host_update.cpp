#include "ttd/host/host_update.hpp"

#include "ttd/host/markup.hpp"

namespace ttd::host {

namespace {

struct Applier {
  HostWorld& w;

  void operator()(const ClockAdvance& u) const {
    if (u.now < w.now)
      throw HostError("clock moved backwards: " + std::to_string(w.now) + " -> " +
                      std::to_string(u.now));
    w.now = u.now;
  }

  void operator()(const TimerFire& u) const {
    auto it = w.timers.find(u.timer);
    if (it == w.timers.end()) throw HostError("fire of unknown timer " + std::to_string(u.timer));
    Timer& t = it->second;
    if (t.period) {
      t.due += *t.period;
    } else {
      if (t.fired) throw HostError("timer " + std::to_string(u.timer) + " fired twice");
      t.fired = true;
    }
    EventDescriptor d;
    d.kind = EventKind::TimerFired;
    d.type = "timer";
    d.target = u.timer;
    w.enqueue(std::move(d));
  }

  void operator()(const EventEnqueued& u) const { w.enqueue(u.descriptor); }

  void operator()(const AnimationAdvance& u) const {
    auto it = w.animations.find(u.node);
    if (it == w.animations.end())
      throw HostError("node " + std::to_string(u.node) + " is not animated");
    if (u.frame_count < it->second.frame_count) throw HostError("animation frame count decreased");
    w.set_frame_count(u.node, u.frame_count);
  }

  void operator()(const ParseAdvance& u) const {
    if (u.document >= w.parsers.size())
      throw HostError("unknown document " + std::to_string(u.document));
    ParserStream& p = w.parsers[u.document];
    if (u.offset < p.consumed || u.offset > p.markup.size())
      throw HostError("illegal parse offset " + std::to_string(u.offset));
    std::vector<MarkupElement> elements = parse_markup(p.markup);
    size_t before = p.emitted.size();
    for (size_t i = before; i < elements.size() && elements[i].ready_at <= u.offset; ++i) {
      const MarkupElement& e = elements[i];
      uint32_t id = w.create_node(e.tag);
      for (const auto& [k, v] : e.attributes) w.apply_attribute(id, k, v);
      uint32_t parent = e.parent < 0 ? p.container : p.emitted.at(static_cast<size_t>(e.parent));
      w.append_child(parent, id);
      p.emitted.push_back(id);
    }
    bool finished = u.offset == p.markup.size() && p.consumed < p.markup.size();
    p.consumed = u.offset;
    if (p.emitted.size() != u.emitted)
      throw HostError("parse advance emitted " + std::to_string(p.emitted.size()) +
                      " nodes, log says " + std::to_string(u.emitted));
    if (p.emitted.size() > before) {
      EventDescriptor d;
      d.kind = EventKind::ParseProgress;
      d.type = "progress";
      d.target = u.document;
      d.payload.emplace_back("offset", static_cast<double>(u.offset));
      d.payload.emplace_back("nodes", static_cast<double>(p.emitted.size()));
      w.enqueue(std::move(d));
    }
    if (finished) {
      EventDescriptor d;
      d.kind = EventKind::ParseProgress;
      d.type = "complete";
      d.target = u.document;
      w.enqueue(std::move(d));
    }
  }

  void operator()(const ResourceLoaded& u) const {
    DomNode& n = w.node(u.node);
    if (!n.resource || n.resource->state != ExternalResource::State::Pending)
      throw HostError("node " + std::to_string(u.node) + " has no pending resource");
    ExternalResource& r = *n.resource;
    r.state = u.ok ? ExternalResource::State::Loaded : ExternalResource::State::Failed;
    r.width = u.width;
    r.height = u.height;
    r.bytes = u.bytes;
    if (w.is_connected(u.node)) {
      EventDescriptor d;
      d.kind = EventKind::Custom;
      d.type = u.ok ? "load" : "error";
      d.target = u.node;
      w.enqueue(std::move(d));
    }
  }

  void operator()(const XhrTransition& u) const {
    auto it = w.requests.find(u.request);
    if (it == w.requests.end())
      throw HostError("transition of unknown request " + std::to_string(u.request));
    NetRequest& r = it->second;
    auto from = static_cast<int>(r.state);
    auto to = static_cast<int>(u.state);
    bool more_data = u.state == XhrState::Loading && r.state == XhrState::Loading &&
                     u.bytes > r.received;
    if (to != from + 1 && !more_data)
      throw HostError(std::string("illegal request transition ") + xhr_state_name(r.state) +
                      " -> " + xhr_state_name(u.state));
    if (u.state == XhrState::HeadersReceived) {
      if (!r.sent) throw HostError("request " + std::to_string(u.request) + " was never sent");
      r.status = u.status;
      r.response = u.body;
    }
    if (u.bytes < r.received || u.bytes > r.response.size())
      throw HostError("illegal received byte count " + std::to_string(u.bytes));
    if (u.state == XhrState::Done && u.bytes != r.response.size())
      throw HostError("request finished with missing bytes");
    r.state = u.state;
    r.received = u.bytes;
    EventDescriptor d;
    d.kind = EventKind::NetStateChange;
    d.type = "readystatechange";
    d.target = u.request;
    d.payload.emplace_back("readyState", static_cast<double>(to));
    w.enqueue(std::move(d));
  }
};

struct Describer {
  std::string operator()(const ClockAdvance& u) const { return "clock " + std::to_string(u.now); }
  std::string operator()(const TimerFire& u) const {
    return "timer-fire " + std::to_string(u.timer);
  }
  std::string operator()(const EventEnqueued& u) const {
    return std::string("enqueue ") + event_kind_name(u.descriptor.kind) + ":" + u.descriptor.type +
           "@" + std::to_string(u.descriptor.target);
  }
  std::string operator()(const AnimationAdvance& u) const {
    return "animation node " + std::to_string(u.node) + " frame " + std::to_string(u.frame_count);
  }
  std::string operator()(const ParseAdvance& u) const {
    return "parse doc " + std::to_string(u.document) + " offset " + std::to_string(u.offset) +
           " nodes " + std::to_string(u.emitted);
  }
  std::string operator()(const ResourceLoaded& u) const {
    return "resource node " + std::to_string(u.node) + (u.ok ? " loaded " : " failed ") +
           std::to_string(u.width) + "x" + std::to_string(u.height);
  }
  std::string operator()(const XhrTransition& u) const {
    return "request " + std::to_string(u.request) + " " + xhr_state_name(u.state) + " bytes " +
           std::to_string(u.bytes);
  }
};

}  // namespace

void apply_update(HostWorld& world, const HostUpdate& update) { std::visit(Applier{world}, update); }

std::string describe(const HostUpdate& update) { return std::visit(Describer{}, update); }

}  // namespace ttd::host
