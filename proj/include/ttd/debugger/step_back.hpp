#pragma once

#include "ttd/lang/interpreter.hpp"

namespace ttd::debugger {

// Where a reverse step should land, resolved from the monitor state of the
// paused interpreter. `Statement` targets are unique within the current event:
// a statement runs at most once per logical time. `PreviousStatement` means
// the predecessor lies outside the current listener invocation and is found
// by statement ordinal instead.
struct ReverseTarget {
  enum class Kind { Statement, PreviousStatement } kind = Kind::PreviousStatement;
  lang::StmtId stmt = lang::kNone;
  lang::LogicalTime time;
};

// All three require monitors to have been enabled since the invocation began.
ReverseTarget resolve_step_back(const lang::Interpreter& interp);
// Like step_back, but a return into this frame lands on the call statement.
ReverseTarget resolve_reverse_step_over(const lang::Interpreter& interp);
// The caller's pending call statement.
ReverseTarget resolve_reverse_step_out(const lang::Interpreter& interp);

}  // namespace ttd::debugger
