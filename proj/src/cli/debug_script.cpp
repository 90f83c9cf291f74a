#include "ttd/cli/debug_script.hpp"

#include <map>
#include <sstream>

#include "ttd/debugger/inspect.hpp"
#include "ttd/proto/views.hpp"

namespace ttd::cli {

using debugger::DebugSession;
using debugger::StopInfo;
using debugger::StopReason;

namespace {

struct Verb {
  size_t min_args;
  size_t max_args;
  const char* usage;
};

const std::map<std::string, Verb, std::less<>>& verbs() {
  static const std::map<std::string, Verb, std::less<>> v = {
      {"bp", {1, 4, "bp <line> [script <n>] [at <c>,<b>]"}},
      {"clear", {1, 1, "clear <breakpoint id>"}},
      {"continue", {0, 0, "continue"}},
      {"step", {0, 0, "step"}},
      {"next", {0, 0, "next"}},
      {"out", {0, 0, "out"}},
      {"stepback", {0, 0, "stepback"}},
      {"rnext", {0, 0, "rnext"}},
      {"rout", {0, 0, "rout"}},
      {"travel", {1, 5, "travel <event> [<ordinal>] | travel <event> line <n> at <c>,<b>"}},
      {"where", {0, 0, "where"}},
      {"print", {1, 1, "print <path>"}},
      {"locals", {0, 1, "locals [frame]"}},
      {"globals", {0, 0, "globals"}},
      {"stack", {0, 0, "stack"}},
      {"inspect", {1, 1, "inspect dom|timers|requests|storage|animations|console"}},
      {"timeline", {0, 0, "timeline"}},
  };
  return v;
}

const std::map<std::string, std::string, std::less<>>& aliases() {
  static const std::map<std::string, std::string, std::less<>> a = {
      {"c", "continue"}, {"s", "step"}, {"n", "next"}, {"back", "stepback"}, {"b", "bp"}, {"p", "print"}};
  return a;
}

uint64_t number(const ScriptCommand& c, const std::string& s) {
  try {
    size_t used = 0;
    unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ScriptError("line " + std::to_string(c.line) + ": expected a number, got '" + s + "'");
  }
}

lang::LogicalTime time_arg(const ScriptCommand& c, const std::string& s) {
  size_t comma = s.find(',');
  if (comma == std::string::npos)
    throw ScriptError("line " + std::to_string(c.line) + ": logical time must be <c>,<b>");
  return {number(c, s.substr(0, comma)), number(c, s.substr(comma + 1))};
}

struct ParsedBp {
  uint32_t line = 0;
  uint32_t script = 0;
  std::optional<lang::LogicalTime> when;
};

ParsedBp parse_bp(const ScriptCommand& c) {
  ParsedBp bp;
  bp.line = static_cast<uint32_t>(number(c, c.args[0]));
  for (size_t i = 1; i < c.args.size(); i += 2) {
    if (i + 1 >= c.args.size()) throw ScriptError("line " + std::to_string(c.line) + ": usage: bp <line> [script <n>] [at <c>,<b>]");
    if (c.args[i] == "script") bp.script = static_cast<uint32_t>(number(c, c.args[i + 1]));
    else if (c.args[i] == "at") bp.when = time_arg(c, c.args[i + 1]);
    else throw ScriptError("line " + std::to_string(c.line) + ": unexpected '" + c.args[i] + "'");
  }
  return bp;
}

void check_travel(const ScriptCommand& c) {
  number(c, c.args[0]);
  if (c.args.size() == 2) number(c, c.args[1]);
  else if (c.args.size() == 5 && c.args[1] == "line" && c.args[3] == "at") {
    number(c, c.args[2]);
    time_arg(c, c.args[4]);
  } else if (c.args.size() != 1) {
    throw ScriptError("line " + std::to_string(c.line) + ": usage: " + verbs().at("travel").usage);
  }
}

class Runner {
 public:
  Runner(DebugSession& d, std::ostream& out) : d_(d), out_(out) {}

  int run(const std::vector<ScriptCommand>& script) {
    report(d_.start());
    for (const ScriptCommand& c : script) {
      out_ << "> " << c.verb;
      for (const auto& a : c.args) out_ << ' ' << a;
      out_ << '\n';
      try {
        execute(c);
      } catch (const debugger::TargetNotReached& e) {
        out_ << "error: " << e.what() << '\n';
      } catch (const std::invalid_argument& e) {
        out_ << "error: " << e.what() << '\n';
      } catch (const std::out_of_range& e) {
        out_ << "error: " << e.what() << '\n';
      } catch (const std::logic_error& e) {
        out_ << "error: " << e.what() << '\n';
      }
      if (diverged_) return 1;
    }
    return 0;
  }

 private:
  DebugSession& d_;
  std::ostream& out_;
  bool diverged_ = false;

  std::string source_line(const lang::SourceLocation& loc) const {
    const std::string& src = d_.program().scripts().at(loc.script_id).source;
    size_t start = 0;
    for (uint32_t l = 1; l < loc.line && start != std::string::npos; ++l) {
      start = src.find('\n', start);
      if (start != std::string::npos) ++start;
    }
    if (start == std::string::npos) return "";
    size_t end = src.find('\n', start);
    std::string line = src.substr(start, end == std::string::npos ? std::string::npos : end - start);
    size_t first = line.find_first_not_of(" \t");
    return first == std::string::npos ? "" : line.substr(first);
  }

  void where() {
    const debugger::Position& p = d_.position();
    if (!p.at_statement) {
      out_ << "  end of trace (" << d_.trace().event_count << " events)\n";
      return;
    }
    const auto& script = d_.program().scripts().at(p.location.script_id);
    out_ << "  event " << p.event_index << " #" << p.ordinal << ' ' << script.name << ':'
         << p.location.line << " t=" << lang::to_string(p.time) << " depth " << p.depth << '\n';
    out_ << "  " << p.location.line << " | " << source_line(p.location) << '\n';
  }

  void report(const StopInfo& s) {
    switch (s.reason) {
      case StopReason::NoPredecessor:
        out_ << "no-predecessor\n";
        return;
      case StopReason::Divergence:
        out_ << "divergence: " << s.divergence->to_string() << '\n';
        diverged_ = true;
        return;
      case StopReason::Breakpoint:
        out_ << "[breakpoint " << *s.breakpoint << "]\n";
        break;
      default:
        out_ << '[' << debugger::stop_reason_name(s.reason) << "]\n";
    }
    where();
  }

  void page(const debugger::VariablePage& p) {
    for (const auto& v : p.items) out_ << "  " << v.name << " = " << v.value << " (" << v.type << ")\n";
    if (p.start + p.items.size() < p.total)
      out_ << "  ... " << p.total - p.start - p.items.size() << " more\n";
  }

  const lang::Interpreter& interp() const { return d_.replay().interpreter(); }

  bool paused() {
    if (d_.started() && d_.position().at_statement) return true;
    out_ << "error: not paused at a statement\n";
    return false;
  }

  void execute(const ScriptCommand& c) {
    const std::string& v = c.verb;
    if (v == "bp") {
      ParsedBp bp = parse_bp(c);
      uint32_t id = d_.add_breakpoint(bp.script, bp.line, bp.when);
      out_ << "breakpoint " << id << " at " << d_.program().scripts().at(bp.script).name << ':' << bp.line;
      if (bp.when) out_ << " when t=" << lang::to_string(*bp.when);
      out_ << '\n';
    } else if (v == "clear") {
      uint64_t id = number(c, c.args[0]);
      out_ << (d_.remove_breakpoint(static_cast<uint32_t>(id)) ? "cleared " : "no breakpoint ") << id << '\n';
    } else if (v == "continue") {
      report(d_.continue_forward());
    } else if (v == "step") {
      report(d_.step_into());
    } else if (v == "next") {
      report(d_.step_over());
    } else if (v == "out") {
      report(d_.step_out());
    } else if (v == "stepback") {
      report(d_.step_back());
    } else if (v == "rnext") {
      report(d_.reverse_step_over());
    } else if (v == "rout") {
      report(d_.reverse_step_out());
    } else if (v == "travel") {
      uint32_t ev = static_cast<uint32_t>(number(c, c.args[0]));
      if (c.args.size() == 5) {
        auto stmt = d_.program().find_line(0, static_cast<uint32_t>(number(c, c.args[2])));
        if (!stmt) throw std::invalid_argument("no statement on line " + c.args[2]);
        report(d_.time_travel_to(ev, d_.program().stmt(*stmt).loc, time_arg(c, c.args[4])));
      } else {
        report(d_.time_travel_to(ev, c.args.size() == 2 ? number(c, c.args[1]) : 0));
      }
    } else if (v == "where") {
      where();
    } else if (v == "print") {
      if (!d_.started()) return void(out_ << "error: not paused\n");
      auto view = debugger::inspect_path(interp(), c.args[0]);
      out_ << "  " << c.args[0] << " = " << view.value << " (" << view.type << ")\n";
    } else if (v == "locals") {
      if (!paused()) return;
      page(debugger::frame_variables(interp(), c.args.empty() ? 0 : number(c, c.args[0])));
    } else if (v == "globals") {
      if (!d_.started()) return void(out_ << "error: not paused\n");
      page(debugger::global_variables(interp()));
    } else if (v == "stack") {
      if (!paused()) return;
      for (const auto& f : debugger::stack_frames(interp())) {
        out_ << "  #" << f.index << ' ' << f.function << " line " << f.location.line;
        if (f.time) out_ << " t=" << lang::to_string(*f.time);
        out_ << '\n';
      }
    } else if (v == "inspect") {
      if (!d_.started()) return void(out_ << "error: not paused\n");
      out_ << proto::host_view(d_.replay(), c.args[0]).dump(2) << '\n';
    } else if (v == "timeline") {
      out_ << "  events " << d_.trace().event_count << ", checkpoints at";
      for (const auto& cp : d_.trace().checkpoints) out_ << ' ' << cp.event_index;
      out_ << ", opportunistic " << d_.opportunistic_checkpoints_created() << '\n';
    }
  }
};

}  // namespace

std::vector<ScriptCommand> parse_debug_script(std::string_view text) {
  std::vector<ScriptCommand> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  size_t n = 0;
  while (std::getline(in, raw)) {
    ++n;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream words(raw);
    ScriptCommand c;
    c.line = n;
    if (!(words >> c.verb)) continue;
    for (std::string w; words >> w;) c.args.push_back(w);
    if (auto a = aliases().find(c.verb); a != aliases().end()) c.verb = a->second;
    auto it = verbs().find(c.verb);
    if (it == verbs().end()) throw ScriptError("line " + std::to_string(n) + ": unknown command '" + c.verb + "'");
    if (c.args.size() < it->second.min_args || c.args.size() > it->second.max_args)
      throw ScriptError("line " + std::to_string(n) + ": usage: " + it->second.usage);
    if (c.verb == "bp") parse_bp(c);
    if (c.verb == "travel") check_travel(c);
    if (c.verb == "clear") number(c, c.args[0]);
    if (c.verb == "locals" && !c.args.empty()) number(c, c.args[0]);
    out.push_back(std::move(c));
  }
  return out;
}

int run_debug_script(DebugSession& session, const std::vector<ScriptCommand>& script,
                     std::ostream& out) {
  return Runner(session, out).run(script);
}

std::string debug_script_help() {
  std::string s = "debug script commands:\n";
  for (const auto& [name, v] : verbs()) s += "  " + std::string(v.usage) + "\n";
  s += "aliases: c=continue s=step n=next back=stepback b=bp p=print\n";
  return s;
}

}  // namespace ttd::cli
