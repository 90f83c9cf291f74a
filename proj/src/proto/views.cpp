#include "ttd/proto/views.hpp"

#include <stdexcept>

namespace ttd::proto {

using debugger::Position;
using host::HostWorld;

json time_json(const lang::LogicalTime& t) { return {{"c", t.call_count}, {"b", t.back_jumps}}; }

json position_json(const Position& p) {
  json j = {{"event", p.event_index}, {"atStatement", p.at_statement}};
  if (p.at_statement) {
    j["ordinal"] = p.ordinal;
    j["location"] = {{"script", p.location.script_id}, {"line", p.location.line}, {"col", p.location.col}};
    j["logicalTime"] = time_json(p.time);
    j["depth"] = p.depth;
  }
  return j;
}

json pause_json(const debugger::StopInfo& stop) {
  json j = position_json(stop.position);
  j["reason"] = debugger::stop_reason_name(stop.reason);
  if (stop.breakpoint) j["breakpoint"] = *stop.breakpoint;
  if (stop.divergence) j["divergence"] = divergence_json(*stop.divergence);
  return j;
}

json divergence_json(const replay::DivergenceReport& r) {
  return {{"kind", replay::divergence_kind_name(r.kind)},
          {"event", r.event_index},
          {"interaction", r.interaction},
          {"expected", r.expected},
          {"observed", r.observed}};
}

json breakpoint_json(const debugger::Breakpoint& bp) {
  json j = {{"id", bp.id}, {"script", bp.script_id}, {"line", bp.line},
            {"enabled", bp.enabled}, {"hits", bp.hits}};
  if (bp.when) j["logicalTime"] = time_json(*bp.when);
  return j;
}

json page_json(const debugger::VariablePage& page) {
  json items = json::array();
  for (const auto& v : page.items)
    items.push_back({{"name", v.name}, {"type", v.type}, {"value", v.value}, {"children", v.child_count}});
  return {{"start", page.start}, {"total", page.total}, {"items", items}};
}

json frames_json(const std::vector<debugger::FrameView>& frames) {
  json out = json::array();
  for (const auto& f : frames) {
    json j = {{"index", f.index},
              {"function", f.function},
              {"location", {{"script", f.location.script_id}, {"line", f.location.line}, {"col", f.location.col}}}};
    if (f.time) j["logicalTime"] = time_json(*f.time);
    out.push_back(std::move(j));
  }
  return out;
}

namespace {

std::string show(const replay::ReplaySession& s, const lang::Value& v) {
  return lang::display_value(s.program(), s.heap(), v);
}

json dom_node(const replay::ReplaySession& s, uint32_t id) {
  const HostWorld& w = s.world();
  const host::DomNode& n = w.node(id);
  json attrs = json::object();
  for (const auto& [k, v] : n.attributes) attrs[k] = v;
  json listeners = json::array();
  for (const auto& l : n.listeners)
    listeners.push_back({{"type", l.type}, {"callback", show(s, l.callback)}, {"property", l.property_style}});
  json j = {{"id", id}, {"tag", n.tag}, {"attributes", attrs}, {"listeners", listeners}};
  if (auto it = w.animations.find(id); it != w.animations.end())
    j["animation"] = {{"frameCount", it->second.frame_count}, {"active", it->second.active}};
  if (n.resource) {
    static const char* states[] = {"pending", "loaded", "failed"};
    j["resource"] = {{"url", n.resource->url}, {"state", states[static_cast<int>(n.resource->state)]}};
  }
  json kids = json::array();
  for (uint32_t c : n.children) kids.push_back(dom_node(s, c));
  j["children"] = kids;
  return j;
}

}  // namespace

json host_view(const replay::ReplaySession& s, std::string_view what) {
  const HostWorld& w = s.world();
  if (what == "dom") {
    size_t detached = 0;
    for (const auto& n : w.nodes) detached += n.id != host::kRootNode && !w.is_connected(n.id);
    return {{"root", dom_node(s, host::kRootNode)}, {"detached", detached}};
  }
  json out = json::array();
  if (what == "timers") {
    for (const auto& [id, t] : w.timers) {
      json j = {{"id", id}, {"due", t.due}, {"callback", show(s, t.callback)}, {"fired", t.fired}};
      if (t.period) j["period"] = *t.period;
      out.push_back(std::move(j));
    }
  } else if (what == "requests") {
    for (const auto& [id, r] : w.requests)
      out.push_back({{"id", id}, {"url", r.url}, {"state", host::xhr_state_name(r.state)},
                     {"status", r.status}, {"received", r.received}, {"sent", r.sent}});
  } else if (what == "storage") {
    for (const auto& [k, v] : w.storage) out.push_back({{"key", k}, {"value", v}});
  } else if (what == "animations") {
    for (const auto& [id, a] : w.animations)
      out.push_back({{"node", id}, {"frameCount", a.frame_count}, {"period", a.period}, {"active", a.active}});
  } else if (what == "console") {
    for (const auto& line : w.console) out.push_back(line);
  } else {
    throw std::invalid_argument("unknown view '" + std::string(what) + "'");
  }
  return out;
}

std::string dump_line(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace ttd::proto
