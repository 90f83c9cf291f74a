#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ttd::lang {

using FunctionId = uint32_t;
using StmtId = uint32_t;
using BlockId = uint32_t;
using ObjectId = uint32_t;

inline constexpr uint32_t kNone = std::numeric_limits<uint32_t>::max();

// Position of a statement. Ordered by (script_id, stmt_index); line/col are
// informational and do not take part in comparisons.
struct SourceLocation {
  uint32_t script_id = 0;
  uint32_t stmt_index = 0;
  uint32_t line = 0;
  uint32_t col = 0;

  friend bool operator==(const SourceLocation& a, const SourceLocation& b) {
    return a.script_id == b.script_id && a.stmt_index == b.stmt_index;
  }
  friend std::strong_ordering operator<=>(const SourceLocation& a,
                                          const SourceLocation& b) {
    if (auto c = a.script_id <=> b.script_id; c != 0) return c;
    return a.stmt_index <=> b.stmt_index;
  }
};

std::ostream& operator<<(std::ostream& s, const SourceLocation& loc);

// Identifies one dynamic execution of a statement inside a frame:
// call_count is the number of calls of the frame's function since monitors
// were enabled, back_jumps the loop iterations entered in this call so far.
struct LogicalTime {
  uint64_t call_count = 0;
  uint64_t back_jumps = 0;

  friend auto operator<=>(const LogicalTime&, const LogicalTime&) = default;
};

std::ostream& operator<<(std::ostream& s, const LogicalTime& t);
std::string to_string(const LogicalTime& t);

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, uint32_t line, uint32_t col);
  uint32_t line() const { return line_; }
  uint32_t col() const { return col_; }

 private:
  uint32_t line_;
  uint32_t col_;
};

// Raised inside the interpreter for errors the guest program caused. Caught at
// the invocation boundary and reported as the event's outcome.
class GuestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal invariant violation in the engine; never caused by guest code.
class EngineFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ttd::lang
