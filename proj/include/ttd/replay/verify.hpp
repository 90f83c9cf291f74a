#pragma once

#include <optional>

#include "ttd/record/trace.hpp"
#include "ttd/replay/divergence.hpp"

namespace ttd::replay {

struct VerifyOptions {
  // Also replay from every recorded checkpoint and compare each checkpoint
  // the full replay passes against the recorded bytes.
  bool all_checkpoints = false;
};

struct VerifyResult {
  std::optional<DivergenceReport> divergence;
  size_t replays = 0;
  size_t checkpoints_compared = 0;
  bool ok() const { return !divergence; }
};

// Deep check that replaying the trace reproduces the recorded run: per-event
// audit, every logged host result, and the final canonical state dump.
VerifyResult verify_replay(const record::Trace& trace, const VerifyOptions& options = {});

}  // namespace ttd::replay
