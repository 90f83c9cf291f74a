#pragma once

#include <cstdint>
#include <vector>

#include "ttd/record/trace.hpp"

namespace ttd::testing {

struct ExecutedStatement {
  uint32_t stmt = 0;
  uint32_t depth = 0;
};

// Every statement of every event in execution order, observed through the
// interpreter's statement hook during a plain replay. Knows nothing about
// logical time or branch records.
struct StatementTrace {
  std::vector<std::vector<ExecutedStatement>> events;

  // (event, ordinal) of the statement executed just before (event, ordinal),
  // or nothing at the very first statement.
  struct Point {
    uint32_t event = 0;
    uint64_t ordinal = 0;
    friend bool operator==(const Point&, const Point&) = default;
  };
  std::optional<Point> predecessor(Point p) const;
};

StatementTrace statement_trace(const record::Trace& trace);

}  // namespace ttd::testing
