#include "ttd/lang/cfg.hpp"

#include <algorithm>

#include "ttd/lang/ast.hpp"

namespace ttd::lang {

std::vector<BlockId> ControlFlowGraph::successors(BlockId b) const {
  const Terminator& t = blocks.at(b).term;
  switch (t.kind) {
    case Terminator::Kind::Jump:
      return {t.target};
    case Terminator::Kind::Branch:
      if (t.on_true == t.on_false) return {t.on_true};
      return {t.on_true, t.on_false};
    case Terminator::Kind::CallReturn:
      if (t.target == kNone) return {};
      return {t.target};
    case Terminator::Kind::Exit:
      return {};
  }
  return {};
}

bool ControlFlowGraph::is_iteration_edge(BlockId from, BlockId to) const {
  const Terminator& t = blocks.at(from).term;
  return t.kind == Terminator::Kind::Branch && t.loop_header && t.on_true == to;
}

namespace {

class CfgBuilder {
 public:
  explicit CfgBuilder(const std::vector<Stmt>& stmts) : stmts_(stmts) {}

  ControlFlowGraph build(const std::vector<StmtId>& body) {
    BlockId entry = new_block();
    BlockId end = build_list(body, entry);
    if (end != kNone) cfg_.blocks[end].term = Terminator{};  // Exit
    prune();
    return std::move(cfg_);
  }

 private:
  const std::vector<Stmt>& stmts_;
  ControlFlowGraph cfg_;
  std::vector<std::pair<BlockId, BlockId>> back_edges_;

  BlockId new_block() {
    BasicBlock b;
    b.id = static_cast<BlockId>(cfg_.blocks.size());
    cfg_.blocks.push_back(std::move(b));
    return cfg_.blocks.back().id;
  }

  void jump(BlockId from, BlockId to) {
    Terminator t;
    t.kind = Terminator::Kind::Jump;
    t.target = to;
    cfg_.blocks[from].term = t;
  }

  // Returns the open block after `list`, or kNone if control cannot fall
  // through (the list ended in a return).
  BlockId build_list(const std::vector<StmtId>& list, BlockId cur) {
    for (StmtId id : list) {
      if (cur == kNone) cur = new_block();  // dead code, pruned later
      const Stmt& s = stmts_[id];
      switch (s.kind) {
        case Stmt::Kind::Let:
        case Stmt::Kind::Assign:
        case Stmt::Kind::Expr: {
          cfg_.blocks[cur].stmts.push_back(id);
          if (s.is_call()) {
            BlockId cont = new_block();
            Terminator t;
            t.kind = Terminator::Kind::CallReturn;
            t.target = cont;
            cfg_.blocks[cur].term = t;
            cur = cont;
          }
          break;
        }
        case Stmt::Kind::Return: {
          cfg_.blocks[cur].stmts.push_back(id);
          Terminator t;
          t.kind = s.is_call() ? Terminator::Kind::CallReturn : Terminator::Kind::Exit;
          cfg_.blocks[cur].term = t;
          cur = kNone;
          break;
        }
        case Stmt::Kind::If: {
          cfg_.blocks[cur].stmts.push_back(id);
          BlockId then_b = new_block();
          BlockId else_b = s.else_body.empty() ? kNone : new_block();
          BlockId join = new_block();
          Terminator t;
          t.kind = Terminator::Kind::Branch;
          t.on_true = then_b;
          t.on_false = else_b == kNone ? join : else_b;
          cfg_.blocks[cur].term = t;
          BlockId then_end = build_list(s.body, then_b);
          if (then_end != kNone) jump(then_end, join);
          if (else_b != kNone) {
            BlockId else_end = build_list(s.else_body, else_b);
            if (else_end != kNone) jump(else_end, join);
          }
          cur = join;
          break;
        }
        case Stmt::Kind::While: {
          // A fresh empty block can serve as the header directly.
          BlockId header = cur;
          if (!cfg_.blocks[cur].stmts.empty()) {
            header = new_block();
            jump(cur, header);
          }
          cfg_.blocks[header].stmts.push_back(id);
          BlockId body = new_block();
          BlockId exit = new_block();
          Terminator t;
          t.kind = Terminator::Kind::Branch;
          t.on_true = body;
          t.on_false = exit;
          t.loop_header = true;
          cfg_.blocks[header].term = t;
          BlockId body_end = build_list(s.body, body);
          if (body_end != kNone) {
            jump(body_end, header);
            back_edges_.emplace_back(body_end, header);
          }
          cur = exit;
          break;
        }
      }
    }
    return cur;
  }

  // Removes blocks unreachable from entry and renumbers the rest in
  // discovery order (entry stays 0).
  void prune() {
    std::vector<BlockId> remap(cfg_.blocks.size(), kNone);
    std::vector<BlockId> order;
    std::vector<BlockId> work{0};
    remap[0] = 0;
    order.push_back(0);
    while (!work.empty()) {
      BlockId b = work.back();
      work.pop_back();
      for (BlockId s : cfg_.successors(b)) {
        if (remap[s] == kNone) {
          remap[s] = static_cast<BlockId>(order.size());
          order.push_back(s);
          work.push_back(s);
        }
      }
    }
    std::sort(order.begin(), order.end());
    for (size_t i = 0; i < order.size(); ++i) remap[order[i]] = static_cast<BlockId>(i);

    auto fix = [&](BlockId& b) {
      if (b != kNone) b = remap[b];
    };
    std::vector<BasicBlock> kept;
    kept.reserve(order.size());
    for (BlockId old : order) {
      BasicBlock blk = std::move(cfg_.blocks[old]);
      blk.id = remap[old];
      fix(blk.term.target);
      fix(blk.term.on_true);
      fix(blk.term.on_false);
      kept.push_back(std::move(blk));
    }
    cfg_.blocks = std::move(kept);
    cfg_.entry = 0;
    for (auto [from, to] : back_edges_) {
      if (remap[from] == kNone || remap[to] == kNone) continue;
      cfg_.back_edges.emplace(remap[from], remap[to]);
      cfg_.loop_headers.insert(remap[to]);
    }
  }
};

}  // namespace

ControlFlowGraph build_cfg(const std::vector<StmtId>& body, const std::vector<Stmt>& stmts,
                           std::vector<BlockId>& block_of, std::vector<uint32_t>& pos_of) {
  CfgBuilder builder(stmts);
  ControlFlowGraph cfg = builder.build(body);
  for (const BasicBlock& b : cfg.blocks) {
    for (uint32_t i = 0; i < b.stmts.size(); ++i) {
      block_of[b.stmts[i]] = b.id;
      pos_of[b.stmts[i]] = i;
    }
  }
  return cfg;
}

}  // namespace ttd::lang
