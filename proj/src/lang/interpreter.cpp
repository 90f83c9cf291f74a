#include "ttd/lang/interpreter.hpp"

#include <charconv>
#include <cmath>

namespace ttd::lang {

namespace {

[[noreturn]] void guest_fail(const Expr& at, const std::string& msg) {
  throw GuestError("line " + std::to_string(at.line) + ": " + msg);
}

double as_number(const Value& v, const Expr& at, const char* what) {
  if (auto* d = std::get_if<double>(&v)) return *d;
  guest_fail(at, std::string(what) + " expects a number, got " + type_name(v));
}

bool strict_equal(const Value& a, const Value& b) { return a == b; }

}  // namespace

std::string number_to_string(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  if (d == 0) return "0";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, p);
}

Interpreter::Interpreter(std::shared_ptr<const Program> program, Heap& heap,
                         HostCallHandler& host)
    : program_(std::move(program)), heap_(&heap), host_(&host) {
  call_counts_.assign(program_->functions().size(), 0);
}

void Interpreter::rebind(Heap& heap, HostCallHandler& host) {
  if (!idle()) throw EngineFault("rebind while a call is active");
  heap_ = &heap;
  host_ = &host;
}

void Interpreter::bind_hoisted(FunctionId fn, ObjectId env) {
  for (auto& [name, id] : program_->function(fn).hoisted) {
    ObjectId closure = heap_->make_closure(id, env);
    heap_->at(env).set(name, ObjectRef{closure});
  }
}

void Interpreter::push_frame(FunctionId fn, ObjectId env, const Frame* caller) {
  Frame f;
  f.function = fn;
  f.env = env;
  f.block = program_->function(fn).cfg.entry;
  if (monitors_) {
    f.time = LogicalTime{++call_counts_.at(fn), 0};
    if (caller) {
      BranchRecord r;
      r.kind = BranchRecord::Kind::Call;
      r.source = caller->pending_call;
      r.target = f.block;
      r.source_time = caller->time;
      f.last_branch = r;
    }
  }
  frames_.push_back(std::move(f));
}

void Interpreter::begin_invocation(const Value& callee, std::vector<Value> args) {
  if (!idle()) throw EngineFault("begin_invocation while a call is active");
  outcome_ = {};
  if (!heap_->is_closure(callee)) {
    outcome_.error = std::string("callback is not a function (") + type_name(callee) + ")";
    return;
  }
  const HeapObject& closure = heap_->at(std::get<ObjectRef>(callee).id);
  FunctionId fn = closure.function;
  ObjectId env = heap_->make_env(closure.parent);
  const FunctionDef& def = program_->function(fn);
  for (size_t i = 0; i < def.params.size(); ++i)
    heap_->at(env).set(def.params[i], i < args.size() ? std::move(args[i]) : Value{Null{}});
  bind_hoisted(fn, env);
  push_frame(fn, env, nullptr);
  try {
    settle();
  } catch (const GuestError& e) {
    abort_invocation(e);
  }
}

void Interpreter::begin_script(uint32_t script_id) {
  if (!idle()) throw EngineFault("begin_script while a call is active");
  outcome_ = {};
  FunctionId main = program_->scripts().at(script_id).main;
  bind_hoisted(main, heap_->globals());
  push_frame(main, heap_->globals(), nullptr);
  try {
    settle();
  } catch (const GuestError& e) {
    abort_invocation(e);
  }
}

StmtId Interpreter::current_stmt() const {
  if (frames_.empty()) throw EngineFault("interpreter is not paused at a statement");
  const Frame& f = frames_.back();
  return program_->function(f.function).cfg.blocks[f.block].stmts.at(f.pos);
}

SourceLocation Interpreter::current_location() const {
  return program_->stmt(current_stmt()).loc;
}

std::pair<SourceLocation, LogicalTime> Interpreter::current_position() const {
  if (!monitors_) throw EngineFault("logical time requires performance monitors");
  return {current_location(), frames_.back().time};
}

void Interpreter::enable_monitors() {
  monitors_ = true;
  call_counts_.assign(program_->functions().size(), 0);
  for (Frame& f : frames_) {
    f.time = LogicalTime{++call_counts_[f.function], 0};
    f.last_branch.reset();
    f.last_stmt = kNone;
    f.executed_since_branch = false;
    f.tail_stmt = kNone;
  }
}

void Interpreter::disable_monitors() {
  monitors_ = false;
  call_counts_.assign(program_->functions().size(), 0);
  for (Frame& f : frames_) {
    f.time = {};
    f.last_branch.reset();
    f.last_stmt = kNone;
    f.executed_since_branch = false;
  }
}

void Interpreter::abort_invocation(const GuestError& e) {
  frames_.clear();
  outcome_.error = e.what();
  outcome_.budget_exceeded = dynamic_cast<const BudgetExceeded*>(&e) != nullptr;
}

void Interpreter::run_to_completion() {
  while (!idle()) step();
}

void Interpreter::step() {
  if (frames_.empty()) throw EngineFault("step with no active call");
  StmtId id = current_stmt();
  try {
    if (++executed_in_event_ > budget_)
      throw BudgetExceeded("statement budget of " + std::to_string(budget_) + " exceeded");
    ++statements_executed_;
    if (hook_) hook_(id, frames_.size());
    Frame& f = frames_.back();
    ++f.pos;
    if (monitors_) {
      f.last_stmt = id;
      f.executed_since_branch = true;
      f.tail_stmt = id;
      f.tail_time = f.time;
    }
    execute(f, id);
    settle();
  } catch (const GuestError& e) {
    abort_invocation(e);
  }
}

void Interpreter::traverse(Frame& f, BlockId to) {
  if (monitors_) {
    const ControlFlowGraph& cfg = program_->function(f.function).cfg;
    bool iteration = cfg.is_iteration_edge(f.block, to);
    if (f.executed_since_branch) {
      BranchRecord r;
      r.kind = BranchRecord::Kind::Local;
      r.source = f.last_stmt;
      r.target = to;
      r.via_iteration_edge = iteration;
      r.source_time = f.time;
      f.last_branch = r;
      f.executed_since_branch = false;
    } else if (f.last_branch) {
      f.last_branch->target = to;
      f.last_branch->via_iteration_edge |= iteration;
    }
    if (iteration) ++f.time.back_jumps;
  }
  f.block = to;
  f.pos = 0;
}

void Interpreter::settle() {
  while (!frames_.empty()) {
    Frame& f = frames_.back();
    const BasicBlock& b = program_->function(f.function).cfg.blocks[f.block];
    if (f.pos < b.stmts.size() || f.pending_call != kNone) return;
    switch (b.term.kind) {
      case Terminator::Kind::Jump:
        traverse(f, b.term.target);
        break;
      case Terminator::Kind::Branch:
        traverse(f, f.branch_taken ? b.term.on_true : b.term.on_false);
        break;
      case Terminator::Kind::CallReturn:
        if (b.term.target == kNone)
          exit_frame(f.return_value);
        else
          traverse(f, b.term.target);
        break;
      case Terminator::Kind::Exit:
        exit_frame(f.return_value);
        break;
    }
  }
}

void Interpreter::exit_frame(Value result) {
  Frame callee = std::move(frames_.back());
  frames_.pop_back();
  if (frames_.empty()) return;
  Frame& caller = frames_.back();
  StmtId stmt = caller.pending_call;
  caller.pending_call = kNone;
  if (monitors_ && callee.tail_stmt != kNone) {
    BranchRecord r;
    r.kind = BranchRecord::Kind::Return;
    r.source = callee.tail_stmt;
    r.target = caller.block;
    r.source_time = callee.tail_time;
    r.call_stmt = stmt;
    r.call_time = caller.time;
    caller.last_branch = r;
    caller.executed_since_branch = false;
    caller.tail_stmt = callee.tail_stmt;
    caller.tail_time = callee.tail_time;
  }
  complete_call(caller, stmt, std::move(result));
}

void Interpreter::complete_call(Frame& caller, StmtId id, Value result) {
  const Stmt& s = program_->stmt(id);
  switch (s.kind) {
    case Stmt::Kind::Let:
      heap_->at(caller.env).set(s.name, std::move(result));
      break;
    case Stmt::Kind::Assign:
      assign(*s.target, std::move(result), caller.env);
      break;
    case Stmt::Kind::Return:
      caller.return_value = std::move(result);
      break;
    default:
      break;
  }
}

void Interpreter::execute(Frame& f, StmtId id) {
  const Stmt& s = program_->stmt(id);
  ObjectId env = f.env;
  if (s.is_call()) {
    const Expr& call = *s.value;
    Value callee = eval(*call.operands[0], env);
    if (!heap_->is_closure(callee))
      guest_fail(call, std::string("call of a non-function (") + type_name(callee) + ")");
    std::vector<Value> args;
    args.reserve(call.operands.size() - 1);
    for (size_t i = 1; i < call.operands.size(); ++i) args.push_back(eval(*call.operands[i], env));
    const HeapObject& closure = heap_->at(std::get<ObjectRef>(callee).id);
    FunctionId fn = closure.function;
    ObjectId callee_env = heap_->make_env(closure.parent);
    const FunctionDef& def = program_->function(fn);
    for (size_t i = 0; i < def.params.size(); ++i)
      heap_->at(callee_env).set(def.params[i], i < args.size() ? std::move(args[i]) : Value{Null{}});
    bind_hoisted(fn, callee_env);
    f.pending_call = id;
    if (frames_.size() >= 10'000) guest_fail(call, "call stack overflow");
    push_frame(fn, callee_env, &f);  // invalidates f
    return;
  }
  switch (s.kind) {
    case Stmt::Kind::Let: {
      Value v = eval(*s.value, env);
      heap_->at(env).set(s.name, std::move(v));
      break;
    }
    case Stmt::Kind::Assign:
      assign(*s.target, eval(*s.value, env), env);
      break;
    case Stmt::Kind::Expr:
      eval(*s.value, env);
      break;
    case Stmt::Kind::Return:
      f.return_value = s.value ? eval(*s.value, env) : Value{Null{}};
      break;
    case Stmt::Kind::If:
    case Stmt::Kind::While:
      f.branch_taken = truthy(eval(*s.value, env));
      break;
  }
}

Value Interpreter::lookup(const std::string& name, ObjectId env, const Expr& at) const {
  for (ObjectId e = env; e != kNone; e = heap_->at(e).parent)
    if (const Value* v = heap_->at(e).find(name)) return *v;
  guest_fail(at, "undefined name '" + name + "'");
}

void Interpreter::assign(const Expr& target, Value v, ObjectId env) {
  switch (target.kind) {
    case Expr::Kind::Name:
      for (ObjectId e = env; e != kNone; e = heap_->at(e).parent) {
        if (Value* slot = heap_->at(e).find(target.text)) {
          *slot = std::move(v);
          return;
        }
      }
      guest_fail(target, "assignment to undeclared name '" + target.text + "'");
    case Expr::Kind::Member: {
      Value obj = eval(*target.operands[0], env);
      auto* ref = std::get_if<ObjectRef>(&obj);
      if (!ref || heap_->at(ref->id).kind != ObjectKind::Plain)
        guest_fail(target, std::string("cannot set property on ") + type_name(obj));
      heap_->at(ref->id).set(target.text, std::move(v));
      return;
    }
    case Expr::Kind::Index: {
      Value obj = eval(*target.operands[0], env);
      Value key = eval(*target.operands[1], env);
      auto* ref = std::get_if<ObjectRef>(&obj);
      if (!ref) guest_fail(target, std::string("cannot index ") + type_name(obj));
      HeapObject& o = heap_->at(ref->id);
      if (o.kind == ObjectKind::Array) {
        double d = as_number(key, target, "array index");
        if (d < 0 || d != std::floor(d) || d > o.elements.size())
          guest_fail(target, "array index out of range");
        size_t i = static_cast<size_t>(d);
        if (i == o.elements.size())
          o.elements.push_back(std::move(v));
        else
          o.elements[i] = std::move(v);
        return;
      }
      if (o.kind == ObjectKind::Plain) {
        if (auto* k = std::get_if<std::string>(&key)) {
          o.set(*k, std::move(v));
          return;
        }
        guest_fail(target, "object keys must be strings");
      }
      guest_fail(target, "cannot index a function");
    }
    default:
      throw EngineFault("invalid assignment target");
  }
}

Value Interpreter::eval(const Expr& e, ObjectId env) {
  switch (e.kind) {
    case Expr::Kind::Number:
      return e.number;
    case Expr::Kind::String:
      return e.text;
    case Expr::Kind::Bool:
      return e.boolean;
    case Expr::Kind::Null:
      return Null{};
    case Expr::Kind::Name:
      return lookup(e.text, env, e);
    case Expr::Kind::Member: {
      Value obj = eval(*e.operands[0], env);
      auto* ref = std::get_if<ObjectRef>(&obj);
      if (!ref) guest_fail(e, "cannot read property '" + e.text + "' of " + type_name(obj));
      const HeapObject& o = heap_->at(ref->id);
      if (o.kind != ObjectKind::Plain) guest_fail(e, "cannot read property '" + e.text + "'");
      const Value* v = o.find(e.text);
      return v ? *v : Value{Null{}};
    }
    case Expr::Kind::Index: {
      Value obj = eval(*e.operands[0], env);
      Value key = eval(*e.operands[1], env);
      if (auto* s = std::get_if<std::string>(&obj)) {
        double d = as_number(key, e, "string index");
        if (d < 0 || d != std::floor(d) || d >= s->size()) return Null{};
        return std::string(1, (*s)[static_cast<size_t>(d)]);
      }
      auto* ref = std::get_if<ObjectRef>(&obj);
      if (!ref) guest_fail(e, std::string("cannot index ") + type_name(obj));
      const HeapObject& o = heap_->at(ref->id);
      if (o.kind == ObjectKind::Array) {
        double d = as_number(key, e, "array index");
        if (d < 0 || d != std::floor(d) || d >= o.elements.size()) return Null{};
        return o.elements[static_cast<size_t>(d)];
      }
      if (o.kind == ObjectKind::Plain) {
        auto* k = std::get_if<std::string>(&key);
        if (!k) guest_fail(e, "object keys must be strings");
        const Value* v = o.find(*k);
        return v ? *v : Value{Null{}};
      }
      guest_fail(e, "cannot index a function");
    }
    case Expr::Kind::Unary: {
      Value v = eval(*e.operands[0], env);
      if (e.unary == UnaryOp::Not) return !truthy(v);
      return -as_number(v, e, "unary '-'");
    }
    case Expr::Kind::Binary:
      return eval_binary(e, env);
    case Expr::Kind::ArrayLit: {
      std::vector<Value> elems;
      elems.reserve(e.operands.size());
      for (auto& op : e.operands) elems.push_back(eval(*op, env));
      ObjectId id = heap_->allocate(ObjectKind::Array);
      heap_->at(id).elements = std::move(elems);
      return ObjectRef{id};
    }
    case Expr::Kind::ObjectLit: {
      std::vector<Value> vals;
      vals.reserve(e.operands.size());
      for (auto& op : e.operands) vals.push_back(eval(*op, env));
      ObjectId id = heap_->allocate(ObjectKind::Plain);
      for (size_t i = 0; i < vals.size(); ++i) heap_->at(id).set(e.keys[i], std::move(vals[i]));
      return ObjectRef{id};
    }
    case Expr::Kind::FunctionLit:
      return ObjectRef{heap_->make_closure(e.function, env)};
    case Expr::Kind::HostCall: {
      std::vector<Value> args;
      args.reserve(e.operands.size());
      for (auto& op : e.operands) args.push_back(eval(*op, env));
      return host_->host_call(e.host, args, *heap_);
    }
    case Expr::Kind::BuiltinCall:
      return eval_builtin(e, env);
    case Expr::Kind::Call:
      throw EngineFault("guest call in expression position");
  }
  throw EngineFault("unknown expression kind");
}

Value Interpreter::eval_binary(const Expr& e, ObjectId env) {
  if (e.binary == BinaryOp::And) {
    Value l = eval(*e.operands[0], env);
    return truthy(l) ? eval(*e.operands[1], env) : l;
  }
  if (e.binary == BinaryOp::Or) {
    Value l = eval(*e.operands[0], env);
    return truthy(l) ? l : eval(*e.operands[1], env);
  }
  Value l = eval(*e.operands[0], env);
  Value r = eval(*e.operands[1], env);
  switch (e.binary) {
    case BinaryOp::Eq:
      return strict_equal(l, r);
    case BinaryOp::Ne:
      return !strict_equal(l, r);
    case BinaryOp::Add:
      if (std::holds_alternative<std::string>(l) || std::holds_alternative<std::string>(r))
        return display(l) + display(r);
      return as_number(l, e, "'+'") + as_number(r, e, "'+'");
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: {
      int cmp;
      if (auto *a = std::get_if<std::string>(&l), *b = std::get_if<std::string>(&r); a && b) {
        cmp = a->compare(*b);
      } else {
        double x = as_number(l, e, "comparison");
        double y = as_number(r, e, "comparison");
        if (x != x || y != y) return false;
        cmp = x < y ? -1 : (x > y ? 1 : 0);
      }
      switch (e.binary) {
        case BinaryOp::Lt: return cmp < 0;
        case BinaryOp::Le: return cmp <= 0;
        case BinaryOp::Gt: return cmp > 0;
        default: return cmp >= 0;
      }
    }
    default:
      break;
  }
  double x = as_number(l, e, "arithmetic");
  double y = as_number(r, e, "arithmetic");
  switch (e.binary) {
    case BinaryOp::Sub: return x - y;
    case BinaryOp::Mul: return x * y;
    case BinaryOp::Div: return x / y;
    case BinaryOp::Mod: return std::fmod(x, y);
    default: throw EngineFault("unhandled binary operator");
  }
}

Value Interpreter::eval_builtin(const Expr& e, ObjectId env) {
  std::vector<Value> a;
  a.reserve(e.operands.size());
  for (auto& op : e.operands) a.push_back(eval(*op, env));
  auto need = [&](size_t n) {
    if (a.size() != n)
      guest_fail(e, e.text + " expects " + std::to_string(n) + " argument(s)");
  };
  auto object_arg = [&](size_t i, ObjectKind kind) -> HeapObject& {
    auto* ref = std::get_if<ObjectRef>(&a[i]);
    if (!ref || heap_->at(ref->id).kind != kind)
      guest_fail(e, e.text + ": argument " + std::to_string(i + 1) + " has the wrong type");
    return heap_->at(ref->id);
  };
  switch (e.builtin) {
    case Builtin::Len: {
      need(1);
      if (auto* s = std::get_if<std::string>(&a[0])) return static_cast<double>(s->size());
      auto* ref = std::get_if<ObjectRef>(&a[0]);
      if (!ref) guest_fail(e, "len of " + std::string(type_name(a[0])));
      const HeapObject& o = heap_->at(ref->id);
      return static_cast<double>(o.kind == ObjectKind::Array ? o.elements.size() : o.props.size());
    }
    case Builtin::Push: {
      need(2);
      HeapObject& arr = object_arg(0, ObjectKind::Array);
      arr.elements.push_back(a[1]);
      return static_cast<double>(arr.elements.size());
    }
    case Builtin::Pop: {
      need(1);
      HeapObject& arr = object_arg(0, ObjectKind::Array);
      if (arr.elements.empty()) return Null{};
      Value v = std::move(arr.elements.back());
      arr.elements.pop_back();
      return v;
    }
    case Builtin::Str:
      need(1);
      return display(a[0]);
    case Builtin::Floor:
      need(1);
      return std::floor(as_number(a[0], e, "floor"));
    case Builtin::Keys: {
      need(1);
      HeapObject& o = object_arg(0, ObjectKind::Plain);
      std::vector<Value> ks;
      for (auto& [k, _] : o.props) ks.push_back(k);
      ObjectId id = heap_->allocate(ObjectKind::Array);
      heap_->at(id).elements = std::move(ks);
      return ObjectRef{id};
    }
    case Builtin::Substr: {
      need(3);
      auto* s = std::get_if<std::string>(&a[0]);
      if (!s) guest_fail(e, "substr expects a string");
      double start = as_number(a[1], e, "substr"), len = as_number(a[2], e, "substr");
      if (start < 0) start = 0;
      if (len < 0) len = 0;
      if (start >= s->size()) return std::string();
      return s->substr(static_cast<size_t>(start), static_cast<size_t>(len));
    }
  }
  throw EngineFault("unknown builtin");
}

std::string Interpreter::display(const Value& v) const { return display_value(*program_, *heap_, v); }

namespace {

void display_into(const Program& program, const Heap& heap, std::string& out, const Value& v,
                  int depth) {
  struct Visitor {
    const Program& program;
    const Heap& heap;
    std::string& out;
    int depth;
    void operator()(Null) const { out += "null"; }
    void operator()(bool b) const { out += b ? "true" : "false"; }
    void operator()(double d) const { out += number_to_string(d); }
    void operator()(const std::string& s) const {
      if (depth == 0)
        out += s;
      else
        out += "\"" + s + "\"";
    }
    void operator()(HostRef h) const {
      out += h.kind == HostKind::Node ? "node#" : "request#";
      out += std::to_string(h.id);
    }
    void operator()(ObjectRef r) const {
      const HeapObject& o = heap.at(r.id);
      if (o.kind == ObjectKind::Closure) {
        out += "function " + program.function(o.function).name;
        return;
      }
      if (depth >= 3) {
        out += o.kind == ObjectKind::Array ? "[...]" : "{...}";
        return;
      }
      if (o.kind == ObjectKind::Array) {
        out += "[";
        for (size_t i = 0; i < o.elements.size(); ++i) {
          if (i) out += ",";
          display_into(program, heap, out, o.elements[i], depth + 1);
        }
        out += "]";
        return;
      }
      out += "{";
      for (size_t i = 0; i < o.props.size(); ++i) {
        if (i) out += ",";
        out += o.props[i].first + ":";
        display_into(program, heap, out, o.props[i].second, depth + 1);
      }
      out += "}";
    }
  };
  std::visit(Visitor{program, heap, out, depth}, v);
}

}  // namespace

std::string display_value(const Program& program, const Heap& heap, const Value& v) {
  std::string out;
  display_into(program, heap, out, v, 0);
  return out;
}

}  // namespace ttd::lang
