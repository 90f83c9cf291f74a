#include "ttd/replay/divergence.hpp"

namespace ttd::replay {

const char* divergence_kind_name(DivergenceKind k) {
  switch (k) {
    case DivergenceKind::UnexpectedHostCall: return "unexpected-host-call";
    case DivergenceKind::MissingLogEntry: return "missing-log-entry";
    case DivergenceKind::LeftoverEntries: return "leftover-entries";
    case DivergenceKind::StateMismatch: return "state-mismatch";
  }
  return "unknown";
}

std::string DivergenceReport::to_string() const {
  return std::string(divergence_kind_name(kind)) + " at event " + std::to_string(event_index) +
         ", interaction " + std::to_string(interaction) + ": expected " + expected + ", observed " +
         observed;
}

}  // namespace ttd::replay
