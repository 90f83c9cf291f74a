#include "statement_oracle.hpp"

#include <memory>

#include "ttd/replay/replay_session.hpp"

namespace ttd::testing {

std::optional<StatementTrace::Point> StatementTrace::predecessor(Point p) const {
  if (p.ordinal > 0) return Point{p.event, p.ordinal - 1};
  for (uint32_t e = p.event; e-- > 0;)
    if (!events[e].empty()) return Point{e, events[e].size() - 1};
  return std::nullopt;
}

StatementTrace statement_trace(const record::Trace& trace) {
  StatementTrace out;
  replay::ReplaySession s(std::make_shared<const record::Trace>(trace));
  s.start(0);
  std::vector<ExecutedStatement>* sink = nullptr;
  s.interpreter().set_statement_hook([&](lang::StmtId id, size_t depth) {
    sink->push_back({id, static_cast<uint32_t>(depth)});
  });
  out.events.resize(trace.event_count);
  while (!s.finished()) {
    sink = &out.events[s.next_event()];
    s.replay_event();
  }
  s.run_to_end();
  return out;
}

}  // namespace ttd::testing
