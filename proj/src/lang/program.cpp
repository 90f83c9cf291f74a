#include "ttd/lang/program.hpp"

namespace ttd::lang {

std::ostream& operator<<(std::ostream& s, const SourceLocation& loc) {
  return s << loc.script_id << ":" << loc.stmt_index << " (line " << loc.line << ")";
}

std::ostream& operator<<(std::ostream& s, const LogicalTime& t) {
  return s << "(" << t.call_count << "," << t.back_jumps << ")";
}

std::string to_string(const LogicalTime& t) {
  return "(" + std::to_string(t.call_count) + "," + std::to_string(t.back_jumps) + ")";
}

SyntaxError::SyntaxError(const std::string& message, uint32_t line, uint32_t col)
    : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(col) + ": " +
                         message),
      line_(line),
      col_(col) {}

bool Program::is_loop_header(StmtId id) const {
  return stmts_.at(id).kind == Stmt::Kind::While && block_of_.at(id) != kNone;
}

std::optional<StmtId> Program::find(const SourceLocation& loc) const {
  auto it = by_location_.find({loc.script_id, loc.stmt_index});
  if (it == by_location_.end()) return std::nullopt;
  return it->second;
}

std::optional<StmtId> Program::find_line(uint32_t script_id, uint32_t line) const {
  auto it = by_location_.lower_bound({script_id, 0});
  for (; it != by_location_.end() && it->first.first == script_id; ++it)
    if (stmts_[it->second].loc.line == line) return it->second;
  return std::nullopt;
}

uint64_t Program::fingerprint() const {
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    h ^= 0xff;
    h *= 0x100000001b3ull;
  };
  for (const Script& s : scripts_) {
    mix(s.name);
    mix(s.source);
  }
  return h;
}

}  // namespace ttd::lang
