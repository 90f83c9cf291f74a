#pragma once

#include <memory>

#include "ttd/host/scenario.hpp"
#include "ttd/lang/interpreter.hpp"
#include "ttd/record/trace.hpp"

namespace ttd::record {

struct RecordingPolicy {
  // Virtual ms; a checkpoint is taken at the first between-events point after
  // the clock crosses each multiple of the interval.
  int64_t checkpoint_interval_ms = 2000;
  bool checkpoints = true;
  bool checkpoint_every_event = false;
  uint32_t max_events = 100000;
  uint64_t statement_budget = lang::kDefaultStatementBudget;
};

// Runs `scenario` against `program` to completion, producing the log,
// checkpoints and audit. Throws ScenarioError / HostError on bad input.
Trace record_session(std::shared_ptr<const lang::Program> program, const host::Scenario& scenario,
                     const RecordingPolicy& policy = {});

}  // namespace ttd::record
