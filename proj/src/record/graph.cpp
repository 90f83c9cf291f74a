#include "ttd/record/graph.hpp"

#include <deque>

#include "ttd/record/codec.hpp"

namespace ttd::record {

using lang::HeapObject;
using lang::ObjectId;
using lang::ObjectKind;
using lang::ObjectRef;
using lang::Value;

namespace {

constexpr uint32_t kGraphMagic = 0x47445454;  // "TTDG"

class Numbering {
 public:
  explicit Numbering(const lang::Heap& heap) : heap_(heap), ordinal_(heap.size(), lang::kNone) {}

  void root(ObjectId id) { visit(id); }
  void root(const Value& v) { visit_value(v); }

  void close() {
    for (size_t i = 0; i < order_.size(); ++i) {
      const HeapObject& o = heap_.at(order_[i]);
      for (const auto& [_, v] : o.props) visit_value(v);
      for (const Value& v : o.elements) visit_value(v);
      if (o.parent != lang::kNone) visit(o.parent);
    }
  }

  uint32_t map(ObjectId id) const {
    if (id >= ordinal_.size() || ordinal_[id] == lang::kNone)
      throw IntegrityError("reference to an object outside the graph");
    return ordinal_[id];
  }
  const std::vector<ObjectId>& order() const { return order_; }

 private:
  const lang::Heap& heap_;
  std::vector<uint32_t> ordinal_;
  std::vector<ObjectId> order_;

  void visit(ObjectId id) {
    heap_.at(id);  // dangling ids fault here
    if (ordinal_[id] != lang::kNone) return;
    ordinal_[id] = static_cast<uint32_t>(order_.size());
    order_.push_back(id);
  }
  void visit_value(const Value& v) {
    if (auto* r = std::get_if<ObjectRef>(&v)) visit(r->id);
  }
};

}  // namespace

std::string encode_graph(const lang::Heap& heap, const host::HostWorld& world) {
  Numbering num(heap);
  num.root(heap.globals());
  for (const host::DomNode& n : world.nodes)
    for (const host::Listener& l : n.listeners) num.root(l.callback);
  for (const auto& [_, t] : world.timers) num.root(t.callback);
  for (const auto& [_, q] : world.requests) num.root(q.callback);
  num.close();

  RefMapper map = [&](ObjectId id) { return num.map(id); };
  Writer w;
  w.u32(kGraphMagic);
  w.u64(num.order().size());
  for (ObjectId id : num.order()) {
    const HeapObject& o = heap.at(id);
    w.u8(static_cast<uint8_t>(o.kind));
    w.u64(o.props.size());
    for (const auto& [k, v] : o.props) {
      w.str(k);
      encode_value(w, v, map);
    }
    w.u64(o.elements.size());
    for (const Value& v : o.elements) encode_value(w, v, map);
    w.u32(o.function);
    w.u32(o.parent == lang::kNone ? lang::kNone : num.map(o.parent));
  }
  encode_world(w, world, map);
  return w.take();
}

DecodedGraph decode_graph(std::string_view bytes, size_t function_count) {
  Reader r(bytes);
  if (r.u32() != kGraphMagic) throw IntegrityError("not a checkpoint graph");
  DecodedGraph g;
  size_t n = r.count(22);
  if (n == 0) throw IntegrityError("checkpoint graph has no global environment");
  g.object_count = n;
  g.heap.reset(n);
  for (size_t i = 0; i < n; ++i) {
    uint8_t kind = r.u8();
    if (kind > 3) throw IntegrityError("invalid object kind");
    ObjectId id = g.heap.allocate(static_cast<ObjectKind>(kind));
    HeapObject& o = g.heap.at(id);
    size_t np = r.count(9);
    for (size_t p = 0; p < np; ++p) {
      std::string k = r.str();
      o.props.emplace_back(std::move(k), decode_value(r, n));
    }
    size_t ne = r.count(1);
    for (size_t e = 0; e < ne; ++e) o.elements.push_back(decode_value(r, n));
    o.function = r.u32();
    o.parent = r.u32();
    if (o.parent != lang::kNone && o.parent >= n) throw IntegrityError("dangling parent reference");
    if (o.kind == ObjectKind::Closure && (o.function >= function_count || o.parent == lang::kNone))
      throw IntegrityError("malformed closure");
  }
  if (g.heap.at(0).kind != ObjectKind::Env) throw IntegrityError("first object must be the global environment");
  g.heap.set_globals(0);
  g.world = decode_world(r, n);
  if (!r.at_end()) throw IntegrityError("trailing bytes after checkpoint graph");
  return g;
}

std::string snapshot_host_state(const host::HostWorld& world) {
  Writer w;
  encode_world(w, world, [](ObjectId id) { return id; });
  return w.take();
}

host::HostWorld restore_host_state(std::string_view image, std::optional<size_t> object_count) {
  Reader r(image);
  host::HostWorld w = decode_world(r, object_count);
  if (!r.at_end()) throw IntegrityError("trailing bytes after host state");
  return w;
}

}  // namespace ttd::record
