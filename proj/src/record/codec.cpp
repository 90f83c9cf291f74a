#include "ttd/record/codec.hpp"

namespace ttd::record {

using namespace ttd::host;
using lang::HostKind;
using lang::HostRef;
using lang::Null;
using lang::ObjectRef;
using lang::Value;

namespace {

enum ValueTag : uint8_t { kNull = 0, kBool = 1, kNumber = 2, kString = 3, kObject = 4, kHost = 5 };

template <class E>
E checked_enum(uint8_t v, uint8_t max, const char* what) {
  if (v > max) throw IntegrityError(std::string("invalid ") + what + " " + std::to_string(v));
  return static_cast<E>(v);
}

}  // namespace

void encode_value(Writer& w, const Value& v, const RefMapper& map) {
  struct Visitor {
    Writer& w;
    const RefMapper& map;
    void operator()(Null) const { w.u8(kNull); }
    void operator()(bool b) const {
      w.u8(kBool);
      w.u8(b ? 1 : 0);
    }
    void operator()(double d) const {
      w.u8(kNumber);
      w.f64(d);
    }
    void operator()(const std::string& s) const {
      w.u8(kString);
      w.str(s);
    }
    void operator()(ObjectRef r) const {
      w.u8(kObject);
      w.u32(map(r.id));
    }
    void operator()(HostRef h) const {
      w.u8(kHost);
      w.u8(static_cast<uint8_t>(h.kind));
      w.u32(h.id);
    }
  };
  std::visit(Visitor{w, map}, v);
}

Value decode_value(Reader& r, std::optional<size_t> object_count) {
  switch (r.u8()) {
    case kNull: return Null{};
    case kBool: return r.u8() != 0;
    case kNumber: return r.f64();
    case kString: return r.str();
    case kObject: {
      uint32_t id = r.u32();
      if (object_count && id >= *object_count)
        throw IntegrityError("dangling object reference " + std::to_string(id));
      return ObjectRef{id};
    }
    case kHost: {
      uint8_t kind = r.u8();
      if (kind != 1 && kind != 2) throw IntegrityError("invalid host reference kind");
      return HostRef{static_cast<HostKind>(kind), r.u32()};
    }
    default: throw IntegrityError("invalid value tag");
  }
}

void encode_plain(Writer& w, const PlainValue& v) {
  std::visit([&](const auto& x) { encode_value(w, Value{x}, {}); }, v);
}

PlainValue decode_plain(Reader& r) {
  Value v = decode_value(r, 0);
  return std::visit(
      [](const auto& x) -> PlainValue {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ObjectRef> || std::is_same_v<T, HostRef>)
          throw IntegrityError("payload value must be a scalar");
        else
          return x;
      },
      v);
}

void encode_descriptor(Writer& w, const EventDescriptor& d) {
  w.u8(static_cast<uint8_t>(d.kind));
  w.str(d.type);
  w.u32(d.target);
  w.u64(d.payload.size());
  for (const auto& [k, v] : d.payload) {
    w.str(k);
    encode_plain(w, v);
  }
}

EventDescriptor decode_descriptor(Reader& r) {
  EventDescriptor d;
  d.kind = checked_enum<EventKind>(r.u8(), 5, "event kind");
  d.type = r.str();
  d.target = r.u32();
  size_t n = r.count(9);
  for (size_t i = 0; i < n; ++i) {
    std::string k = r.str();
    d.payload.emplace_back(std::move(k), decode_plain(r));
  }
  return d;
}

void encode_update(Writer& w, const HostUpdate& u) {
  w.u8(static_cast<uint8_t>(u.index()));
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ClockAdvance>) {
          w.i64(x.now);
        } else if constexpr (std::is_same_v<T, TimerFire>) {
          w.u32(x.timer);
        } else if constexpr (std::is_same_v<T, EventEnqueued>) {
          encode_descriptor(w, x.descriptor);
        } else if constexpr (std::is_same_v<T, AnimationAdvance>) {
          w.u32(x.node);
          w.u64(x.frame_count);
        } else if constexpr (std::is_same_v<T, ParseAdvance>) {
          w.u32(x.document);
          w.u64(x.offset);
          w.u32(x.emitted);
        } else if constexpr (std::is_same_v<T, ResourceLoaded>) {
          w.u32(x.node);
          w.u8(x.ok ? 1 : 0);
          w.u32(x.width);
          w.u32(x.height);
          w.u32(x.bytes);
        } else {
          w.u32(x.request);
          w.u8(static_cast<uint8_t>(x.state));
          w.u32(x.status);
          w.u64(x.bytes);
          w.str(x.body);
        }
      },
      u);
}

HostUpdate decode_update(Reader& r) {
  switch (r.u8()) {
    case 0: return ClockAdvance{r.i64()};
    case 1: return TimerFire{r.u32()};
    case 2: return EventEnqueued{decode_descriptor(r)};
    case 3: {
      AnimationAdvance a;
      a.node = r.u32();
      a.frame_count = r.u64();
      return a;
    }
    case 4: {
      ParseAdvance p;
      p.document = r.u32();
      p.offset = r.u64();
      p.emitted = r.u32();
      return p;
    }
    case 5: {
      ResourceLoaded l;
      l.node = r.u32();
      l.ok = r.u8() != 0;
      l.width = r.u32();
      l.height = r.u32();
      l.bytes = r.u32();
      return l;
    }
    case 6: {
      XhrTransition x;
      x.request = r.u32();
      x.state = checked_enum<XhrState>(r.u8(), 4, "request state");
      x.status = r.u32();
      x.bytes = r.u64();
      x.body = r.str();
      return x;
    }
    default: throw IntegrityError("invalid host update tag");
  }
}

namespace {

void encode_pairs(Writer& w, const std::vector<std::pair<std::string, std::string>>& v) {
  w.u64(v.size());
  for (const auto& [k, s] : v) {
    w.str(k);
    w.str(s);
  }
}

std::vector<std::pair<std::string, std::string>> decode_pairs(Reader& r) {
  std::vector<std::pair<std::string, std::string>> v;
  size_t n = r.count(16);
  for (size_t i = 0; i < n; ++i) {
    std::string k = r.str();
    v.emplace_back(std::move(k), r.str());
  }
  return v;
}

}  // namespace

void encode_world(Writer& w, const HostWorld& world, const RefMapper& map) {
  w.u64(world.nodes.size());
  for (const DomNode& n : world.nodes) {
    w.u32(n.id);
    w.str(n.tag);
    encode_pairs(w, n.attributes);
    w.u32(n.parent);
    w.u64(n.children.size());
    for (uint32_t c : n.children) w.u32(c);
    w.u64(n.listeners.size());
    for (const Listener& l : n.listeners) {
      w.str(l.type);
      encode_value(w, l.callback, map);
      w.u8(l.property_style ? 1 : 0);
    }
    w.u8(n.resource ? 1 : 0);
    if (n.resource) {
      const ExternalResource& r = *n.resource;
      w.str(r.url);
      w.u8(static_cast<uint8_t>(r.state));
      w.i64(r.requested_at);
      w.u32(r.width);
      w.u32(r.height);
      w.u32(r.bytes);
    }
  }
  w.u64(world.queue.size());
  for (const PendingEvent& e : world.queue) {
    w.u64(e.seq);
    encode_descriptor(w, e.descriptor);
  }
  w.u64(world.next_seq);
  w.u64(world.timers.size());
  for (const auto& [id, t] : world.timers) {
    w.u32(t.id);
    w.i64(t.due);
    w.u8(t.period ? 1 : 0);
    w.i64(t.period.value_or(0));
    encode_value(w, t.callback, map);
    w.u8(t.fired ? 1 : 0);
  }
  w.u32(world.next_timer_id);
  w.u64(world.prng.state());
  w.i64(world.now);
  w.u64(world.requests.size());
  for (const auto& [id, q] : world.requests) {
    w.u32(q.id);
    w.str(q.url);
    w.u8(static_cast<uint8_t>(q.state));
    w.u32(q.status);
    w.u64(q.received);
    w.str(q.response);
    w.u8(q.sent ? 1 : 0);
    w.i64(q.sent_at);
    encode_value(w, q.callback, map);
  }
  w.u32(world.next_request_id);
  w.u64(world.parsers.size());
  for (const ParserStream& p : world.parsers) {
    w.u32(p.document);
    w.u32(p.container);
    w.str(p.markup);
    w.u64(p.consumed);
    w.u64(p.emitted.size());
    for (uint32_t id : p.emitted) w.u32(id);
  }
  w.u64(world.animations.size());
  for (const auto& [node, a] : world.animations) {
    w.u32(a.node);
    w.u64(a.frame_count);
    w.u32(a.period);
    w.u8(a.active ? 1 : 0);
    w.i64(a.started_at);
  }
  encode_pairs(w, world.storage);
  w.u64(world.interactions);
  w.u64(world.console.size());
  for (const std::string& line : world.console) w.str(line);
}

HostWorld decode_world(Reader& r, std::optional<size_t> object_count) {
  HostWorld world;
  world.nodes.clear();
  size_t n_nodes = r.count(16);
  for (size_t i = 0; i < n_nodes; ++i) {
    DomNode n;
    n.id = r.u32();
    if (n.id != i) throw IntegrityError("node ids out of order");
    n.tag = r.str();
    n.attributes = decode_pairs(r);
    n.parent = r.u32();
    size_t nc = r.count(4);
    for (size_t c = 0; c < nc; ++c) n.children.push_back(r.u32());
    size_t nl = r.count(10);
    for (size_t l = 0; l < nl; ++l) {
      Listener li;
      li.type = r.str();
      li.callback = decode_value(r, object_count);
      li.property_style = r.u8() != 0;
      n.listeners.push_back(std::move(li));
    }
    if (r.u8()) {
      ExternalResource res;
      res.url = r.str();
      res.state = checked_enum<ExternalResource::State>(r.u8(), 2, "resource state");
      res.requested_at = r.i64();
      res.width = r.u32();
      res.height = r.u32();
      res.bytes = r.u32();
      n.resource = std::move(res);
    }
    world.nodes.push_back(std::move(n));
  }
  if (world.nodes.empty()) throw IntegrityError("world has no root node");
  for (const DomNode& n : world.nodes) {
    if (n.parent != kNoNode && n.parent >= n_nodes) throw IntegrityError("dangling parent link");
    for (uint32_t c : n.children)
      if (c >= n_nodes || world.nodes[c].parent != n.id) throw IntegrityError("inconsistent child link");
  }
  size_t nq = r.count(14);
  for (size_t i = 0; i < nq; ++i) {
    PendingEvent e;
    e.seq = r.u64();
    e.descriptor = decode_descriptor(r);
    world.queue.push_back(std::move(e));
  }
  world.next_seq = r.u64();
  size_t nt = r.count(23);
  for (size_t i = 0; i < nt; ++i) {
    Timer t;
    t.id = r.u32();
    t.due = r.i64();
    bool periodic = r.u8() != 0;
    int64_t period = r.i64();
    if (periodic) t.period = period;
    t.callback = decode_value(r, object_count);
    t.fired = r.u8() != 0;
    world.timers[t.id] = std::move(t);
  }
  world.next_timer_id = r.u32();
  uint64_t prng_state = r.u64();
  if (prng_state == 0) throw IntegrityError("zero PRNG state");
  world.prng.reset(prng_state);
  world.now = r.i64();
  size_t nr = r.count(40);
  for (size_t i = 0; i < nr; ++i) {
    NetRequest q;
    q.id = r.u32();
    q.url = r.str();
    q.state = checked_enum<XhrState>(r.u8(), 4, "request state");
    q.status = r.u32();
    q.received = r.u64();
    q.response = r.str();
    q.sent = r.u8() != 0;
    q.sent_at = r.i64();
    q.callback = decode_value(r, object_count);
    world.requests[q.id] = std::move(q);
  }
  world.next_request_id = r.u32();
  size_t np = r.count(24);
  for (size_t i = 0; i < np; ++i) {
    ParserStream p;
    p.document = r.u32();
    p.container = r.u32();
    p.markup = r.str();
    p.consumed = r.u64();
    size_t ne = r.count(4);
    for (size_t e = 0; e < ne; ++e) p.emitted.push_back(r.u32());
    world.parsers.push_back(std::move(p));
  }
  size_t na = r.count(25);
  for (size_t i = 0; i < na; ++i) {
    AnimationState a;
    a.node = r.u32();
    a.frame_count = r.u64();
    a.period = r.u32();
    a.active = r.u8() != 0;
    a.started_at = r.i64();
    world.animations[a.node] = a;
  }
  world.storage = decode_pairs(r);
  world.interactions = r.u64();
  size_t nlines = r.count(8);
  for (size_t i = 0; i < nlines; ++i) world.console.push_back(r.str());
  return world;
}

}  // namespace ttd::record
