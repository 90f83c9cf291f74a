#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ttd/lang/heap.hpp"
#include "ttd/lang/host_call.hpp"
#include "ttd/lang/program.hpp"

namespace ttd::lang {

class BudgetExceeded : public GuestError {
 public:
  using GuestError::GuestError;
};

// Branch trace store entry for one frame: the statement executed just before
// the most recent control transfer into the frame's current block.
struct BranchRecord {
  enum class Kind : uint8_t {
    Local,   // edge inside the frame
    Call,    // frame entry; source is the caller's call statement
    Return,  // callee returned; source is the callee's last statement
  };
  Kind kind = Kind::Local;
  StmtId source = kNone;
  BlockId target = kNone;
  bool via_iteration_edge = false;
  // Caller time for Call, callee exit time for Return.
  LogicalTime source_time;
  // Return only: the caller's call statement and the time it ran at.
  StmtId call_stmt = kNone;
  LogicalTime call_time;
};

struct Frame {
  FunctionId function = kNone;
  ObjectId env = kNone;
  BlockId block = 0;
  uint32_t pos = 0;
  StmtId pending_call = kNone;
  Value return_value = Null{};
  bool branch_taken = false;

  // Monitor state; meaningful only while monitors are enabled.
  LogicalTime time;
  std::optional<BranchRecord> last_branch;
  StmtId last_stmt = kNone;
  bool executed_since_branch = false;
  // Most recent statement executed in this frame or any callee it returned
  // from, with the logical time it ran at.
  StmtId tail_stmt = kNone;
  LogicalTime tail_time;
};

struct InvocationOutcome {
  std::optional<std::string> error;
  bool budget_exceeded = false;
};

inline constexpr uint64_t kDefaultStatementBudget = 10'000'000;

// CFG-walking interpreter. Execution is resumable at statement granularity:
// after begin_* the interpreter is paused before the first statement, and
// each step() executes exactly one statement.
class Interpreter {
 public:
  Interpreter(std::shared_ptr<const Program> program, Heap& heap, HostCallHandler& host);

  const Program& program() const { return *program_; }
  std::shared_ptr<const Program> program_ptr() const { return program_; }
  Heap& heap() { return *heap_; }
  const Heap& heap() const { return *heap_; }

  // Rebinds to a different heap/host (used after restore). Requires idle().
  void rebind(Heap& heap, HostCallHandler& host);

  void set_statement_budget(uint64_t budget) { budget_ = budget; }
  uint64_t statement_budget() const { return budget_; }
  // Resets the per-event statement count the budget applies to.
  void reset_event_budget() { executed_in_event_ = 0; }

  void begin_invocation(const Value& callee, std::vector<Value> args);
  void begin_script(uint32_t script_id);

  bool idle() const { return frames_.empty(); }
  void step();
  // Steps until the current invocation finishes.
  void run_to_completion();
  // Outcome of the invocation that most recently finished.
  const InvocationOutcome& last_outcome() const { return outcome_; }

  size_t depth() const { return frames_.size(); }
  const Frame& frame(size_t i) const { return frames_.at(i); }
  const std::vector<Frame>& frames() const { return frames_; }
  StmtId current_stmt() const;
  SourceLocation current_location() const;
  // Paused statement with the top frame's logical time. Throws EngineFault
  // when not paused or monitors are off.
  std::pair<SourceLocation, LogicalTime> current_position() const;

  void enable_monitors();
  void disable_monitors();
  bool monitors_enabled() const { return monitors_; }

  uint64_t statements_executed() const { return statements_executed_; }

  // Called before each statement executes (statement id, call depth).
  using StatementHook = std::function<void(StmtId, size_t)>;
  void set_statement_hook(StatementHook hook) { hook_ = std::move(hook); }

  // Value helpers shared with the host layer.
  std::string display(const Value& v) const;

 private:
  std::shared_ptr<const Program> program_;
  Heap* heap_;
  HostCallHandler* host_;
  std::vector<Frame> frames_;
  InvocationOutcome outcome_;
  uint64_t budget_ = kDefaultStatementBudget;
  uint64_t executed_in_event_ = 0;
  uint64_t statements_executed_ = 0;
  bool monitors_ = false;
  std::vector<uint64_t> call_counts_;
  StatementHook hook_;

  void push_frame(FunctionId fn, ObjectId env, const Frame* caller);
  void bind_hoisted(FunctionId fn, ObjectId env);
  void settle();
  void traverse(Frame& f, BlockId to);
  void exit_frame(Value result);
  void complete_call(Frame& caller, StmtId stmt, Value result);
  void execute(Frame& f, StmtId id);
  void abort_invocation(const GuestError& e);

  Value eval(const Expr& e, ObjectId env);
  Value eval_binary(const Expr& e, ObjectId env);
  Value eval_builtin(const Expr& e, ObjectId env);
  Value lookup(const std::string& name, ObjectId env, const Expr& at) const;
  void assign(const Expr& target, Value v, ObjectId env);
};

std::string number_to_string(double d);
// Human-readable rendering; strings are unquoted at top level only.
std::string display_value(const Program& program, const Heap& heap, const Value& v);

}  // namespace ttd::lang
