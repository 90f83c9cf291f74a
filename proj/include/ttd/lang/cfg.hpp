#pragma once

#include <set>
#include <utility>
#include <vector>

#include "ttd/lang/types.hpp"

namespace ttd::lang {

struct Stmt;

struct Terminator {
  enum class Kind : uint8_t {
    Jump,        // target
    Branch,      // on_true / on_false, decided by the block's last statement
    CallReturn,  // last statement is a call; target is the continuation or kNone
    Exit,
  };
  Kind kind = Kind::Exit;
  BlockId target = kNone;
  BlockId on_true = kNone;
  BlockId on_false = kNone;
  // Branch terminators of a `while` header: the on_true edge enters the loop
  // body and counts as one loop iteration for logical time.
  bool loop_header = false;
};

struct BasicBlock {
  BlockId id = 0;
  std::vector<StmtId> stmts;
  Terminator term;
};

struct ControlFlowGraph {
  std::vector<BasicBlock> blocks;
  BlockId entry = 0;
  std::set<std::pair<BlockId, BlockId>> back_edges;
  std::set<BlockId> loop_headers;

  std::vector<BlockId> successors(BlockId b) const;
  bool is_iteration_edge(BlockId from, BlockId to) const;
};

// Builds the CFG for a function body. `stmts` is the program-wide statement
// table; `block_of` / `pos_of` receive each reachable statement's block and
// index within it.
ControlFlowGraph build_cfg(const std::vector<StmtId>& body,
                           const std::vector<Stmt>& stmts,
                           std::vector<BlockId>& block_of,
                           std::vector<uint32_t>& pos_of);

}  // namespace ttd::lang
