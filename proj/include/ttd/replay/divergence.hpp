#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ttd::replay {

enum class DivergenceKind : uint8_t {
  UnexpectedHostCall,
  MissingLogEntry,
  LeftoverEntries,
  StateMismatch,
};

const char* divergence_kind_name(DivergenceKind k);

struct DivergenceReport {
  DivergenceKind kind = DivergenceKind::StateMismatch;
  uint32_t event_index = 0;
  uint64_t interaction = 0;
  std::string expected;
  std::string observed;

  std::string to_string() const;
};

class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(DivergenceReport report)
      : std::runtime_error(report.to_string()), report_(std::move(report)) {}
  const DivergenceReport& report() const { return report_; }

 private:
  DivergenceReport report_;
};

}  // namespace ttd::replay
