#include "ttd/host/canonical.hpp"

#include <algorithm>
#include <cstdio>

#include "ttd/lang/interpreter.hpp"

namespace ttd::host {

namespace {

std::string callback_name(const lang::Program& program, const lang::Heap& heap, const Value& v) {
  if (!heap.is_closure(v)) return lang::display_value(program, heap, v);
  return program.function(heap.at(std::get<lang::ObjectRef>(v).id).function).name;
}

void dom_into(std::string& out, const HostWorld& w, const lang::Program& program,
              const lang::Heap& heap, uint32_t id, int depth) {
  const DomNode& n = w.nodes[id];
  out.append(static_cast<size_t>(depth) * 2, ' ');
  out += "<" + n.tag + " #" + std::to_string(id);
  auto attrs = n.attributes;
  std::sort(attrs.begin(), attrs.end());
  for (const auto& [k, v] : attrs) out += " " + k + "=\"" + v + "\"";
  out += ">";
  if (!n.listeners.empty()) {
    out += " on[";
    for (size_t i = 0; i < n.listeners.size(); ++i) {
      if (i) out += ",";
      const Listener& l = n.listeners[i];
      out += l.type + ":" + callback_name(program, heap, l.callback);
      if (l.property_style) out += "*";
    }
    out += "]";
  }
  out += "\n";
  for (uint32_t c : n.children) dom_into(out, w, program, heap, c, depth + 1);
}

const char* resource_state(ExternalResource::State s) {
  switch (s) {
    case ExternalResource::State::Pending: return "pending";
    case ExternalResource::State::Loaded: return "loaded";
    case ExternalResource::State::Failed: return "failed";
  }
  return "?";
}

}  // namespace

std::string canonical_dom(const HostWorld& world, const lang::Program& program,
                          const lang::Heap& heap) {
  std::string out;
  dom_into(out, world, program, heap, kRootNode, 0);
  return out;
}

std::string canonical_dump(const HostWorld& w, const lang::Program& program,
                           const lang::Heap& heap) {
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(w.prng.state()));
  out += "clock " + std::to_string(w.now) + "\n";
  out += std::string("prng ") + buf + "\n";
  out += "interactions " + std::to_string(w.interactions) + "\n";
  out += "queue " + std::to_string(w.queue.size()) + "\n";
  out += "dom\n" + canonical_dom(w, program, heap);
  size_t detached = 0;
  for (const DomNode& n : w.nodes)
    if (!w.is_connected(n.id)) ++detached;
  out += "detached " + std::to_string(detached) + "\n";
  out += "timers\n";
  for (const auto& [id, t] : w.timers) {
    out += "  " + std::to_string(id) + " due=" + std::to_string(t.due);
    if (t.period) out += " period=" + std::to_string(*t.period);
    out += " cb=" + callback_name(program, heap, t.callback);
    if (t.fired) out += " fired";
    out += "\n";
  }
  out += "requests\n";
  for (const auto& [id, r] : w.requests) {
    out += "  " + std::to_string(id) + " " + r.url + " " + xhr_state_name(r.state) +
           " status=" + std::to_string(r.status) + " received=" + std::to_string(r.received) +
           "\n";
  }
  out += "parsers\n";
  for (const ParserStream& p : w.parsers) {
    out += "  " + std::to_string(p.document) + " " + std::to_string(p.consumed) + "/" +
           std::to_string(p.markup.size()) + " nodes=" + std::to_string(p.emitted.size()) + "\n";
  }
  out += "animations\n";
  for (const auto& [node, a] : w.animations) {
    out += "  " + std::to_string(node) + " frame=" + std::to_string(a.frame_count) +
           " period=" + std::to_string(a.period) + (a.active ? "" : " stopped") + "\n";
  }
  out += "resources\n";
  for (const DomNode& n : w.nodes) {
    if (!n.resource) continue;
    const ExternalResource& r = *n.resource;
    out += "  " + std::to_string(n.id) + " " + r.url + " " + resource_state(r.state) + " " +
           std::to_string(r.width) + "x" + std::to_string(r.height) + " " +
           std::to_string(r.bytes) + "\n";
  }
  out += "storage\n";
  for (const auto& [k, v] : w.storage) out += "  " + k + "=" + v + "\n";
  out += "console\n";
  for (const std::string& line : w.console) out += "  " + line + "\n";
  out += "globals\n";
  for (const auto& [name, v] : heap.at(heap.globals()).props)
    out += "  " + name + " = " + lang::display_value(program, heap, v) + "\n";
  return out;
}

}  // namespace ttd::host
