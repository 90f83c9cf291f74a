#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ttd/debugger/debug_session.hpp"

namespace ttd::cli {

// One line of a debug script, e.g. `bp 12 at 3,2`, `stepback`, `print globals.items[0]`.
struct ScriptCommand {
  size_t line = 0;
  std::string verb;
  std::vector<std::string> args;
};

class ScriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Validates the whole script before anything runs. Throws ScriptError.
std::vector<ScriptCommand> parse_debug_script(std::string_view text);

// Output is a pure function of the trace and the script. Returns the exit
// code: 1 if replay diverged, 0 otherwise.
int run_debug_script(debugger::DebugSession& session, const std::vector<ScriptCommand>& script,
                     std::ostream& out);

// Help text listing the commands.
std::string debug_script_help();

}  // namespace ttd::cli
