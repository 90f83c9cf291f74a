#include "ttd/debugger/step_back.hpp"

namespace ttd::debugger {

using lang::BranchRecord;
using lang::EngineFault;
using lang::Frame;

namespace {

const Frame& paused_frame(const lang::Interpreter& interp) {
  if (!interp.monitors_enabled()) throw EngineFault("reverse stepping requires monitors");
  if (interp.idle()) throw EngineFault("interpreter is not paused at a statement");
  return interp.frames().back();
}

ReverseTarget at(lang::StmtId stmt, lang::LogicalTime time) {
  return {ReverseTarget::Kind::Statement, stmt, time};
}

}  // namespace

ReverseTarget resolve_step_back(const lang::Interpreter& interp) {
  const Frame& f = paused_frame(interp);
  const lang::ControlFlowGraph& cfg = interp.program().function(f.function).cfg;
  // Inside a block the predecessor is the statement above, at the same time.
  if (f.pos > 0) return at(cfg.blocks[f.block].stmts[f.pos - 1], f.time);
  if (!f.last_branch) return {};
  // The record holds the time the source statement ran at, which already
  // accounts for an iteration edge taken since (t' = (c, b-1)).
  return at(f.last_branch->source, f.last_branch->source_time);
}

ReverseTarget resolve_reverse_step_over(const lang::Interpreter& interp) {
  const Frame& f = paused_frame(interp);
  if (f.pos == 0 && f.last_branch && f.last_branch->kind == BranchRecord::Kind::Return)
    return at(f.last_branch->call_stmt, f.last_branch->call_time);
  return resolve_step_back(interp);
}

ReverseTarget resolve_reverse_step_out(const lang::Interpreter& interp) {
  paused_frame(interp);
  const auto& frames = interp.frames();
  if (frames.size() < 2) return {};
  const Frame& caller = frames[frames.size() - 2];
  return at(caller.pending_call, caller.time);
}

}  // namespace ttd::debugger
