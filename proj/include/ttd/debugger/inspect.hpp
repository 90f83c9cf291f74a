#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ttd/lang/interpreter.hpp"

namespace ttd::debugger {

inline constexpr size_t kPageSize = 256;

struct VariableView {
  std::string name;
  std::string type;
  std::string value;
  size_t child_count = 0;
};

struct VariablePage {
  std::vector<VariableView> items;
  size_t start = 0;
  size_t total = 0;
};

struct FrameView {
  size_t index = 0;  // 0 is the innermost frame
  std::string function;
  lang::SourceLocation location;
  std::optional<lang::LogicalTime> time;
};

std::vector<FrameView> stack_frames(const lang::Interpreter& interp);

// Names visible in a frame's own scopes, innermost binding first, globals excluded.
VariablePage frame_variables(const lang::Interpreter& interp, size_t frame_index,
                             size_t start = 0, size_t count = kPageSize);
VariablePage global_variables(const lang::Interpreter& interp, size_t start = 0,
                              size_t count = kPageSize);

// Paths look like `globals.config.items[2]`, `locals.x`, `frame1.acc.total`,
// or a bare name resolved from the innermost frame outwards.
VariableView inspect_path(const lang::Interpreter& interp, std::string_view path);
VariablePage path_children(const lang::Interpreter& interp, std::string_view path,
                           size_t start = 0, size_t count = kPageSize);

}  // namespace ttd::debugger
