#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ttd/lang/ast.hpp"
#include "ttd/lang/cfg.hpp"

namespace ttd::lang {

struct FunctionDef {
  FunctionId id = 0;
  std::string name;
  std::vector<std::string> params;
  std::vector<StmtId> body;
  // Function declarations in this body, bound at frame entry.
  std::vector<std::pair<std::string, FunctionId>> hoisted;
  ControlFlowGraph cfg;
  uint32_t script_id = 0;
  uint32_t line = 0;
  bool is_script_main = false;
};

struct Script {
  uint32_t id = 0;
  std::string name;
  std::string source;
  FunctionId main = kNone;
  uint32_t stmt_count = 0;
};

// A parsed set of scripts sharing one global scope. Immutable once built;
// sessions hold it through shared_ptr<const Program>.
class Program {
 public:
  Program() = default;
  Program(Program&&) = default;
  Program& operator=(Program&&) = default;

  // Parses `source` as the next script. Throws SyntaxError.
  const Script& add_script(std::string name, std::string source);

  const std::vector<Script>& scripts() const { return scripts_; }
  const std::vector<FunctionDef>& functions() const { return functions_; }
  const FunctionDef& function(FunctionId id) const { return functions_.at(id); }
  const std::vector<Stmt>& stmts() const { return stmts_; }
  const Stmt& stmt(StmtId id) const { return stmts_.at(id); }

  BlockId block_of(StmtId id) const { return block_of_.at(id); }
  uint32_t pos_in_block(StmtId id) const { return pos_of_.at(id); }
  bool is_block_entry(StmtId id) const { return pos_of_.at(id) == 0; }
  // Whether the statement is the condition of a `while`, i.e. the first
  // statement of a loop header block.
  bool is_loop_header(StmtId id) const;

  std::optional<StmtId> find(const SourceLocation& loc) const;
  // First statement (lowest stmt_index) starting on `line` of the script.
  std::optional<StmtId> find_line(uint32_t script_id, uint32_t line) const;

  // Stable identity of the whole program text, used in trace headers.
  uint64_t fingerprint() const;

 private:
  friend class Parser;
  friend struct ProgramBuilder;

  std::vector<Script> scripts_;
  std::vector<FunctionDef> functions_;
  std::vector<Stmt> stmts_;
  std::vector<BlockId> block_of_;
  std::vector<uint32_t> pos_of_;
  std::map<std::pair<uint32_t, uint32_t>, StmtId> by_location_;
};

// Convenience: parse a list of (name, source) scripts into one program.
Program parse_program(const std::vector<std::pair<std::string, std::string>>& scripts);

}  // namespace ttd::lang
