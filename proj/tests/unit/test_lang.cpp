#include <doctest.h>

#include <map>

#include "ttd/lang/interpreter.hpp"

using namespace ttd::lang;

namespace {

struct NullHost : HostCallHandler {
  std::vector<HostCallKind> calls;
  Value host_call(HostCallKind kind, std::span<const Value> args, Heap&) override {
    calls.push_back(kind);
    if (kind == HostCallKind::Random) return 0.5;
    if (!args.empty()) return args[0];
    return Null{};
  }
};

struct Run {
  std::shared_ptr<const Program> program;
  Heap heap;
  NullHost host;
  Interpreter interp;

  explicit Run(const std::string& src)
      : program(std::make_shared<Program>(parse_program({{"main", src}}))),
        interp(program, heap, host) {}

  void run_script() {
    interp.begin_script(0);
    interp.run_to_completion();
  }
  Value global(const std::string& name) const {
    const Value* v = heap.at(heap.globals()).find(name);
    REQUIRE(v != nullptr);
    return *v;
  }
  double num(const std::string& name) const { return std::get<double>(global(name)); }
  std::string str(const std::string& name) const { return interp.display(global(name)); }
};

const FunctionDef& function_named(const Program& p, const std::string& name) {
  for (const FunctionDef& f : p.functions())
    if (f.name == name) return f;
  FAIL("no function " << name);
  throw 0;
}

}  // namespace

TEST_CASE("cfg shapes") {
  SUBCASE("straight line is one block") {
    Program p = parse_program({{"m", "function f(){ let a = 1; let b = 2; a = a + b; }"}});
    const auto& cfg = function_named(p, "f").cfg;
    CHECK(cfg.blocks.size() == 1);
    CHECK(cfg.back_edges.empty());
  }
  SUBCASE("while loop has header, body and exit") {
    Program p = parse_program({{"m", "function f(i){ while (i < 3) { i = i + 1; } }"}});
    const auto& cfg = function_named(p, "f").cfg;
    CHECK(cfg.blocks.size() == 3);
    Program q = parse_program({{"m", "function f(){ let i = 0; while (i < 3) { i = i + 1; } }"}});
    CHECK(function_named(q, "f").cfg.blocks.size() == 4);
    CHECK(cfg.back_edges.size() == 1);
    CHECK(cfg.loop_headers.size() == 1);
  }
  SUBCASE("if/else gives a diamond") {
    Program p = parse_program({{"m", "function f(x){ let y = 0; if (x) { y = 1; } else { y = 2; } y = y + 1; }"}});
    const auto& cfg = function_named(p, "f").cfg;
    CHECK(cfg.blocks.size() == 4);
    CHECK(cfg.back_edges.empty());
  }
  SUBCASE("calls end blocks") {
    Program p = parse_program({{"m", "function g(){ } function f(){ let a = 1; g(); a = 2; }"}});
    const auto& cfg = function_named(p, "f").cfg;
    CHECK(cfg.blocks.size() == 2);
    CHECK(cfg.blocks[0].term.kind == Terminator::Kind::CallReturn);
  }
  SUBCASE("dead code after return is pruned") {
    Program p = parse_program({{"m", "function f(){ return 1; let a = 2; }"}});
    CHECK(function_named(p, "f").cfg.blocks.size() == 1);
  }
}

TEST_CASE("syntax errors") {
  CHECK_THROWS_AS(parse_program({{"m", "let x = ;"}}), SyntaxError);
  CHECK_THROWS_AS(parse_program({{"m", "function g(){} let x = g() + 1;"}}), SyntaxError);
  CHECK_THROWS_AS(parse_program({{"m", "return 1;"}}), SyntaxError);
  CHECK_THROWS_AS(parse_program({{"m", "function f(){} function f(){}"}}), SyntaxError);
  CHECK_THROWS_AS(parse_program({{"a", "function f(){}"}, {"b", "function f(){}"}}), SyntaxError);
  try {
    parse_program({{"m", "let a = 1;\nlet b = (;"}});
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("evaluation") {
  Run r(R"(
    let a = 7 % 3 + 2 * 3 - 1;
    let s = "n=" + 4;
    let arr = [1, 2, 3];
    push(arr, 4);
    let last = pop(arr);
    let o = {x: 1, y: "two"};
    o.z = len(arr);
    let ks = keys(o);
    function fact(n) {
      if (n <= 1) { return 1; }
      let r = fact(n - 1);
      return n * r;
    }
    let f5 = fact(5);
    function counter() {
      let c = 0;
      return function() { c = c + 1; return c; };
    }
    let next = counter();
    let c1 = next();
    let c2 = next();
    let eq = 1 == 1 && "a" != "b" && !(2 < 1);
    let fl = floor(7 / 2);
    let sub = substr("hello", 1, 3);
    let i = 0;
    let total = 0;
    while (i < 10) { total = total + i; i = i + 1; }
  )");
  r.run_script();
  CHECK(!r.interp.last_outcome().error);
  CHECK(r.num("a") == 6);
  CHECK(r.str("s") == "n=4");
  CHECK(r.num("last") == 4);
  CHECK(r.num("f5") == 120);
  CHECK(r.num("c1") == 1);
  CHECK(r.num("c2") == 2);
  CHECK(std::get<bool>(r.global("eq")));
  CHECK(r.num("fl") == 3);
  CHECK(r.str("sub") == "ell");
  CHECK(r.num("total") == 45);
  CHECK(r.str("ks") == "[\"x\",\"y\",\"z\"]");
  CHECK(r.str("o") == "{x:1,y:\"two\",z:3}");
}

TEST_CASE("guest errors abort the invocation") {
  Run r("let a = 1; b = 2; a = 3;");
  r.run_script();
  REQUIRE(r.interp.last_outcome().error);
  CHECK(r.interp.idle());
  CHECK(r.num("a") == 1);
}

TEST_CASE("statement budget") {
  Run r("let i = 0; while (true) { i = i + 1; }");
  r.interp.set_statement_budget(1000);
  r.run_script();
  CHECK(r.interp.last_outcome().budget_exceeded);
  CHECK(r.interp.statements_executed() == 1000);
}

TEST_CASE("host calls go through the handler") {
  Run r("let x = host.random(); host.log(\"hi\");");
  r.run_script();
  CHECK(r.num("x") == 0.5);
  REQUIRE(r.host.calls.size() == 2);
  CHECK(r.host.calls[1] == HostCallKind::ConsoleLog);
}

TEST_CASE("logical time: conditional time (3,2) names one dynamic instance") {
  // A bounded version of `function a(){ while(true){...} }`.
  Run r(R"(
    function a() {
      let k = 0;
      while (true) {
        k = k + 1;
        if (k >= 3) { return k; }
      }
    }
    a();
    a();
    a();
  )");
  r.interp.enable_monitors();
  const FunctionDef& a = function_named(*r.program, "a");
  const Stmt& loop = r.program->stmt(a.body[1]);
  StmtId body_first = loop.body[0];
  std::vector<LogicalTime> seen;
  r.interp.set_statement_hook([&](StmtId id, size_t) {
    if (id == body_first) seen.push_back(r.interp.current_position().second);
  });
  r.run_script();
  std::vector<LogicalTime> expected;
  for (uint64_t c = 1; c <= 3; ++c)
    for (uint64_t b = 1; b <= 3; ++b) expected.push_back({c, b});
  CHECK(seen == expected);
  CHECK(std::count(seen.begin(), seen.end(), LogicalTime{3, 2}) == 1);
}

TEST_CASE("monitors reset call counters") {
  Run r("function f(){ let z = 1; } f(); f();");
  r.run_script();
  r.interp.enable_monitors();
  std::vector<LogicalTime> times;
  const FunctionDef& f = function_named(*r.program, "f");
  r.interp.set_statement_hook([&](StmtId id, size_t) {
    if (id == f.body[0]) times.push_back(r.interp.current_position().second);
  });
  r.interp.begin_script(0);
  r.interp.run_to_completion();
  CHECK(times == std::vector<LogicalTime>{{1, 0}, {2, 0}});
}
