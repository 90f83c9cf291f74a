#pragma once

#include <json.hpp>

#include "ttd/debugger/debug_session.hpp"
#include "ttd/debugger/inspect.hpp"

namespace ttd::proto {

using nlohmann::json;

json pause_json(const debugger::StopInfo& stop);
json position_json(const debugger::Position& p);
json time_json(const lang::LogicalTime& t);
json divergence_json(const replay::DivergenceReport& r);
json breakpoint_json(const debugger::Breakpoint& bp);
json page_json(const debugger::VariablePage& page);
json frames_json(const std::vector<debugger::FrameView>& frames);

// Host-side views of the paused state. `what` is one of dom, timers,
// requests, storage, animations, console. Throws std::invalid_argument.
json host_view(const replay::ReplaySession& session, std::string_view what);

// Never throws on invalid UTF-8 (bytes are replaced).
std::string dump_line(const json& j);

}  // namespace ttd::proto
