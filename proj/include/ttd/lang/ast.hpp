#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ttd/lang/host_call.hpp"
#include "ttd/lang/types.hpp"

namespace ttd::lang {

enum class BinaryOp : uint8_t { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnaryOp : uint8_t { Not, Neg };

// Pure built-in helpers. They neither touch the host nor create frames.
enum class Builtin : uint8_t { Len, Push, Pop, Str, Floor, Keys, Substr };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind : uint8_t {
    Number,
    String,
    Bool,
    Null,
    Name,
    Member,       // operands[0].text
    Index,        // operands[0][operands[1]]
    Unary,
    Binary,
    ArrayLit,
    ObjectLit,    // keys[i] : operands[i]
    FunctionLit,  // function
    HostCall,     // host.<host>(operands...)
    BuiltinCall,  // builtin(operands...)
    Call,         // operands[0](operands[1..]) -- guest call, statement level only
  };

  Kind kind = Kind::Null;
  uint32_t line = 0;
  uint32_t col = 0;
  double number = 0;
  bool boolean = false;
  std::string text;
  UnaryOp unary = UnaryOp::Not;
  BinaryOp binary = BinaryOp::Add;
  HostCallKind host = HostCallKind::Random;
  Builtin builtin = Builtin::Len;
  FunctionId function = kNone;
  std::vector<std::string> keys;
  std::vector<ExprPtr> operands;
};

struct Stmt {
  enum class Kind : uint8_t { Let, Assign, Expr, Return, If, While };

  Kind kind = Kind::Expr;
  SourceLocation loc;
  FunctionId owner = kNone;
  std::string name;      // Let
  ExprPtr target;        // Assign: Name, Member or Index
  ExprPtr value;         // initializer, assigned value, condition, returned value
  std::vector<StmtId> body;       // If: then-branch; While: loop body
  std::vector<StmtId> else_body;  // If only

  bool is_call() const { return value && value->kind == Expr::Kind::Call; }
  bool is_branch() const { return kind == Kind::If || kind == Kind::While; }
};

}  // namespace ttd::lang
