#pragma once

#include <string>
#include <string_view>

#include "ttd/record/trace.hpp"

namespace ttd::record {

struct TraceFileOptions {
  // zlib-compress the log, each checkpoint and the audit independently.
  bool compress = true;
};

std::string serialize_trace(const Trace& trace, const TraceFileOptions& options = {});
// Throws IntegrityError for bad magic, version mismatch, checksum failure or
// truncation; never returns a partial trace.
Trace deserialize_trace(std::string_view bytes);

void save_trace(const Trace& trace, const std::string& path, const TraceFileOptions& options = {});
Trace load_trace(const std::string& path);

}  // namespace ttd::record
