#include <set>
#include <string_view>

#include "lexer.hpp"
#include "ttd/lang/program.hpp"

namespace ttd::lang {

namespace {

bool is_keyword(std::string_view s) {
  static const std::set<std::string_view> kw = {
      "let", "function", "if", "else", "while", "return", "true", "false", "null", "host"};
  return kw.count(s) != 0;
}

std::optional<Builtin> builtin_from_name(std::string_view s) {
  if (s == "len") return Builtin::Len;
  if (s == "push") return Builtin::Push;
  if (s == "pop") return Builtin::Pop;
  if (s == "str") return Builtin::Str;
  if (s == "floor") return Builtin::Floor;
  if (s == "keys") return Builtin::Keys;
  if (s == "substr") return Builtin::Substr;
  return std::nullopt;
}

}  // namespace

class Parser {
 public:
  Parser(Program& prog, uint32_t script_id, std::string_view source)
      : prog_(prog), script_id_(script_id), toks_(tokenize(source)) {}

  FunctionId parse_script(const std::string& name) {
    FunctionId main = new_function("<script " + name + ">", 1);
    prog_.functions_[main].is_script_main = true;
    fn_stack_.push_back(main);
    std::vector<StmtId> body;
    while (!at_end()) parse_item(body);
    prog_.functions_[main].body = std::move(body);
    fn_stack_.pop_back();
    return main;
  }

  uint32_t stmt_count() const { return next_index_; }

 private:
  Program& prog_;
  uint32_t script_id_;
  std::vector<Token> toks_;
  size_t pos_ = 0;
  uint32_t next_index_ = 0;
  std::vector<FunctionId> fn_stack_;

  const Token& peek(size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_punct(std::string_view p, size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
  }
  bool is_word(std::string_view w, size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == w;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(msg + " near " + near, t.line, t.col);
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  void expect(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "'");
    next();
  }
  std::string expect_ident() {
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail("expected identifier");
    return next().text;
  }

  FunctionId new_function(std::string name, uint32_t line) {
    FunctionDef def;
    def.id = static_cast<FunctionId>(prog_.functions_.size());
    def.name = std::move(name);
    def.script_id = script_id_;
    def.line = line;
    prog_.functions_.push_back(std::move(def));
    return prog_.functions_.back().id;
  }

  StmtId new_stmt(Stmt::Kind kind, const Token& at) {
    Stmt s;
    s.kind = kind;
    s.owner = fn_stack_.back();
    s.loc = SourceLocation{script_id_, next_index_++, at.line, at.col};
    StmtId id = static_cast<StmtId>(prog_.stmts_.size());
    prog_.stmts_.push_back(std::move(s));
    return id;
  }

  FunctionId parse_function_rest(std::string name, const Token& at) {
    FunctionId id = new_function(std::move(name), at.line);
    expect("(");
    std::vector<std::string> params;
    std::set<std::string> seen;
    if (!is_punct(")")) {
      while (true) {
        std::string p = expect_ident();
        if (!seen.insert(p).second) fail("duplicate parameter '" + p + "'");
        params.push_back(std::move(p));
        if (is_punct(",")) {
          next();
          continue;
        }
        break;
      }
    }
    expect(")");
    fn_stack_.push_back(id);
    std::vector<StmtId> body = parse_block();
    fn_stack_.pop_back();
    prog_.functions_[id].params = std::move(params);
    prog_.functions_[id].body = std::move(body);
    return id;
  }

  std::vector<StmtId> parse_block() {
    expect("{");
    std::vector<StmtId> body;
    while (!is_punct("}")) {
      if (at_end()) fail("unterminated block");
      parse_item(body);
    }
    next();
    return body;
  }

  void parse_item(std::vector<StmtId>& body) {
    if (is_word("function") && peek(1).kind == Tok::Ident) {
      Token at = next();
      std::string name = expect_ident();
      auto& hoisted = prog_.functions_[fn_stack_.back()].hoisted;
      for (auto& [n, _] : hoisted)
        if (n == name) throw SyntaxError("duplicate function name '" + name + "'", at.line, at.col);
      FunctionId fn = parse_function_rest(name, at);
      prog_.functions_[fn_stack_.back()].hoisted.emplace_back(name, fn);
      return;
    }
    body.push_back(parse_stmt());
  }

  StmtId parse_stmt() {
    const Token at = peek();
    if (is_word("let")) {
      next();
      StmtId id = new_stmt(Stmt::Kind::Let, at);
      std::string name = expect_ident();
      expect("=");
      ExprPtr v = parse_expr();
      expect(";");
      check_call_position(*v, true);
      prog_.stmts_[id].name = std::move(name);
      prog_.stmts_[id].value = std::move(v);
      return id;
    }
    if (is_word("if")) {
      next();
      StmtId id = new_stmt(Stmt::Kind::If, at);
      expect("(");
      ExprPtr cond = parse_expr();
      expect(")");
      check_call_position(*cond, false);
      prog_.stmts_[id].value = std::move(cond);
      std::vector<StmtId> then_body = parse_block();
      std::vector<StmtId> else_body;
      if (is_word("else")) {
        next();
        if (is_word("if"))
          else_body.push_back(parse_stmt());
        else
          else_body = parse_block();
      }
      prog_.stmts_[id].body = std::move(then_body);
      prog_.stmts_[id].else_body = std::move(else_body);
      return id;
    }
    if (is_word("while")) {
      next();
      StmtId id = new_stmt(Stmt::Kind::While, at);
      expect("(");
      ExprPtr cond = parse_expr();
      expect(")");
      check_call_position(*cond, false);
      prog_.stmts_[id].value = std::move(cond);
      std::vector<StmtId> body = parse_block();
      prog_.stmts_[id].body = std::move(body);
      return id;
    }
    if (is_word("return")) {
      next();
      if (prog_.functions_[fn_stack_.back()].is_script_main)
        throw SyntaxError("return outside of a function", at.line, at.col);
      StmtId id = new_stmt(Stmt::Kind::Return, at);
      ExprPtr v;
      if (!is_punct(";")) {
        v = parse_expr();
        check_call_position(*v, true);
      }
      expect(";");
      prog_.stmts_[id].value = std::move(v);
      return id;
    }
    if (is_punct("{")) fail("bare blocks are not statements");

    StmtId id = new_stmt(Stmt::Kind::Expr, at);
    ExprPtr e = parse_expr();
    if (is_punct("=")) {
      if (e->kind != Expr::Kind::Name && e->kind != Expr::Kind::Member &&
          e->kind != Expr::Kind::Index)
        fail("invalid assignment target");
      next();
      check_call_position(*e, false);
      ExprPtr v = parse_expr();
      expect(";");
      check_call_position(*v, true);
      prog_.stmts_[id].kind = Stmt::Kind::Assign;
      prog_.stmts_[id].target = std::move(e);
      prog_.stmts_[id].value = std::move(v);
      return id;
    }
    expect(";");
    check_call_position(*e, true);
    prog_.stmts_[id].value = std::move(e);
    return id;
  }

  // Guest calls may only form the whole value of a statement.
  void check_call_position(const Expr& e, bool top_allowed) {
    if (e.kind == Expr::Kind::Call) {
      if (!top_allowed)
        throw SyntaxError("guest function calls must be the whole value of a statement",
                          e.line, e.col);
      for (auto& op : e.operands) check_call_position(*op, false);
      return;
    }
    if (e.kind == Expr::Kind::FunctionLit) return;
    for (auto& op : e.operands) check_call_position(*op, false);
  }

  ExprPtr make(Expr::Kind kind, const Token& at) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->line = at.line;
    e->col = at.col;
    return e;
  }

  ExprPtr parse_expr() { return parse_binary(0); }

  struct OpInfo {
    int prec;
    BinaryOp op;
  };
  static std::optional<OpInfo> binary_info(const Token& t) {
    if (t.kind != Tok::Punct) return std::nullopt;
    const std::string& s = t.text;
    if (s == "||") return OpInfo{1, BinaryOp::Or};
    if (s == "&&") return OpInfo{2, BinaryOp::And};
    if (s == "==") return OpInfo{3, BinaryOp::Eq};
    if (s == "!=") return OpInfo{3, BinaryOp::Ne};
    if (s == "<") return OpInfo{4, BinaryOp::Lt};
    if (s == "<=") return OpInfo{4, BinaryOp::Le};
    if (s == ">") return OpInfo{4, BinaryOp::Gt};
    if (s == ">=") return OpInfo{4, BinaryOp::Ge};
    if (s == "+") return OpInfo{5, BinaryOp::Add};
    if (s == "-") return OpInfo{5, BinaryOp::Sub};
    if (s == "*") return OpInfo{6, BinaryOp::Mul};
    if (s == "/") return OpInfo{6, BinaryOp::Div};
    if (s == "%") return OpInfo{6, BinaryOp::Mod};
    return std::nullopt;
  }

  ExprPtr parse_binary(int min_prec) {
    ExprPtr lhs = parse_unary();
    while (true) {
      auto info = binary_info(peek());
      if (!info || info->prec <= min_prec) break;
      Token at = next();
      ExprPtr rhs = parse_binary(info->prec);
      ExprPtr e = make(Expr::Kind::Binary, at);
      e->binary = info->op;
      e->operands.push_back(std::move(lhs));
      e->operands.push_back(std::move(rhs));
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (is_punct("!") || is_punct("-")) {
      Token at = next();
      ExprPtr e = make(Expr::Kind::Unary, at);
      e->unary = at.text == "!" ? UnaryOp::Not : UnaryOp::Neg;
      e->operands.push_back(parse_unary());
      return e;
    }
    return parse_postfix();
  }

  std::vector<ExprPtr> parse_args() {
    expect("(");
    std::vector<ExprPtr> args;
    if (!is_punct(")")) {
      while (true) {
        args.push_back(parse_expr());
        if (is_punct(",")) {
          next();
          continue;
        }
        break;
      }
    }
    expect(")");
    return args;
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_primary();
    while (true) {
      if (is_punct(".")) {
        Token at = next();
        if (peek().kind != Tok::Ident) fail("expected property name");
        ExprPtr m = make(Expr::Kind::Member, at);
        m->text = next().text;
        m->operands.push_back(std::move(e));
        e = std::move(m);
      } else if (is_punct("[")) {
        Token at = next();
        ExprPtr ix = make(Expr::Kind::Index, at);
        ix->operands.push_back(std::move(e));
        ix->operands.push_back(parse_expr());
        expect("]");
        e = std::move(ix);
      } else if (is_punct("(")) {
        Token at = peek();
        ExprPtr call = make(Expr::Kind::Call, at);
        call->line = e->line;
        call->col = e->col;
        call->operands.push_back(std::move(e));
        for (auto& a : parse_args()) call->operands.push_back(std::move(a));
        e = std::move(call);
      } else {
        break;
      }
    }
    return e;
  }

  ExprPtr parse_primary() {
    const Token at = peek();
    if (at.kind == Tok::Number) {
      next();
      ExprPtr e = make(Expr::Kind::Number, at);
      e->number = at.number;
      return e;
    }
    if (at.kind == Tok::String) {
      next();
      ExprPtr e = make(Expr::Kind::String, at);
      e->text = at.text;
      return e;
    }
    if (at.kind == Tok::Ident) {
      if (at.text == "true" || at.text == "false") {
        next();
        ExprPtr e = make(Expr::Kind::Bool, at);
        e->boolean = at.text == "true";
        return e;
      }
      if (at.text == "null") {
        next();
        return make(Expr::Kind::Null, at);
      }
      if (at.text == "function") {
        next();
        std::string name = "<anonymous " + std::to_string(at.line) + ":" + std::to_string(at.col) + ">";
        ExprPtr e = make(Expr::Kind::FunctionLit, at);
        e->function = parse_function_rest(std::move(name), at);
        return e;
      }
      if (at.text == "host") {
        next();
        expect(".");
        if (peek().kind != Tok::Ident) fail("expected host call name");
        Token name = next();
        auto kind = host_call_from_name(name.text);
        if (!kind) throw SyntaxError("unknown host call '" + name.text + "'", name.line, name.col);
        ExprPtr e = make(Expr::Kind::HostCall, at);
        e->host = *kind;
        e->operands = parse_args();
        return e;
      }
      if (is_keyword(at.text)) fail("unexpected keyword");
      if (auto b = builtin_from_name(at.text); b && is_punct("(", 1)) {
        next();
        ExprPtr e = make(Expr::Kind::BuiltinCall, at);
        e->builtin = *b;
        e->text = at.text;
        e->operands = parse_args();
        return e;
      }
      next();
      ExprPtr e = make(Expr::Kind::Name, at);
      e->text = at.text;
      return e;
    }
    if (is_punct("(")) {
      next();
      ExprPtr e = parse_expr();
      expect(")");
      return e;
    }
    if (is_punct("[")) {
      next();
      ExprPtr e = make(Expr::Kind::ArrayLit, at);
      if (!is_punct("]")) {
        while (true) {
          e->operands.push_back(parse_expr());
          if (is_punct(",")) {
            next();
            continue;
          }
          break;
        }
      }
      expect("]");
      return e;
    }
    if (is_punct("{")) {
      next();
      ExprPtr e = make(Expr::Kind::ObjectLit, at);
      if (!is_punct("}")) {
        while (true) {
          std::string key;
          if (peek().kind == Tok::Ident || peek().kind == Tok::String)
            key = next().text;
          else
            fail("expected property key");
          expect(":");
          e->keys.push_back(std::move(key));
          e->operands.push_back(parse_expr());
          if (is_punct(",")) {
            next();
            continue;
          }
          break;
        }
      }
      expect("}");
      return e;
    }
    fail("expected expression");
  }
};

struct ProgramBuilder {
  static void finish_functions(Program& p, FunctionId first) {
    p.block_of_.resize(p.stmts_.size(), kNone);
    p.pos_of_.resize(p.stmts_.size(), kNone);
    for (FunctionId f = first; f < p.functions_.size(); ++f)
      p.functions_[f].cfg = build_cfg(p.functions_[f].body, p.stmts_, p.block_of_, p.pos_of_);
  }
};

const Script& Program::add_script(std::string name, std::string source) {
  uint32_t script_id = static_cast<uint32_t>(scripts_.size());
  // Parse into copies so a syntax error leaves the program untouched.
  size_t fn_mark = functions_.size();
  size_t stmt_mark = stmts_.size();
  Parser parser(*this, script_id, source);
  FunctionId main;
  try {
    main = parser.parse_script(name);
    // Top-level function names share the global scope across scripts.
    for (const auto& s : scripts_) {
      for (auto& [n, _] : functions_[s.main].hoisted)
        for (auto& [m, f] : functions_[main].hoisted)
          if (n == m)
            throw SyntaxError("duplicate function name '" + n + "'", functions_[f].line, 1);
    }
  } catch (...) {
    functions_.resize(fn_mark);
    stmts_.resize(stmt_mark);
    throw;
  }
  ProgramBuilder::finish_functions(*this, static_cast<FunctionId>(fn_mark));
  for (StmtId s = static_cast<StmtId>(stmt_mark); s < stmts_.size(); ++s)
    by_location_[{stmts_[s].loc.script_id, stmts_[s].loc.stmt_index}] = s;
  Script sc;
  sc.id = script_id;
  sc.name = std::move(name);
  sc.source = std::move(source);
  sc.main = main;
  sc.stmt_count = parser.stmt_count();
  scripts_.push_back(std::move(sc));
  return scripts_.back();
}

Program parse_program(const std::vector<std::pair<std::string, std::string>>& scripts) {
  Program p;
  for (auto& [name, src] : scripts) p.add_script(name, src);
  return p;
}

}  // namespace ttd::lang
