#include "ttd/record/trace_file.hpp"

#include <zlib.h>

#include <fstream>
#include <sstream>

#include "ttd/util/fnv.hpp"

namespace ttd::record {

namespace {

constexpr std::string_view kMagic = "TTDT";

enum BlobMethod : uint8_t { kRaw = 0, kZlib = 1 };

void put_blob(Writer& w, const std::string& data, bool compress) {
  if (compress && !data.empty()) {
    uLongf cap = compressBound(static_cast<uLong>(data.size()));
    std::string out(cap, '\0');
    int rc = compress2(reinterpret_cast<Bytef*>(out.data()), &cap,
                       reinterpret_cast<const Bytef*>(data.data()), static_cast<uLong>(data.size()),
                       Z_BEST_COMPRESSION);
    if (rc != Z_OK) throw IntegrityError("zlib compression failed");
    out.resize(cap);
    w.u8(kZlib);
    w.u64(data.size());
    w.str(out);
    return;
  }
  w.u8(kRaw);
  w.u64(data.size());
  w.str(data);
}

std::string get_blob(Reader& r) {
  uint8_t method = r.u8();
  uint64_t raw_size = r.u64();
  std::string stored = r.str();
  if (method == kRaw) {
    if (stored.size() != raw_size) throw IntegrityError("blob size mismatch");
    return stored;
  }
  if (method != kZlib) throw IntegrityError("unknown blob encoding");
  if (raw_size > (uint64_t{1} << 34)) throw IntegrityError("implausible blob size");
  std::string out(raw_size, '\0');
  uLongf len = static_cast<uLongf>(raw_size);
  int rc = uncompress(reinterpret_cast<Bytef*>(out.data()), &len,
                      reinterpret_cast<const Bytef*>(stored.data()), static_cast<uLong>(stored.size()));
  if (rc != Z_OK || len != raw_size) throw IntegrityError("corrupt compressed section");
  return out;
}

std::string encode_log(const std::vector<LogEntry>& log) {
  Writer w;
  w.u64(log.size());
  for (const LogEntry& e : log) encode_entry(w, e);
  return w.take();
}

std::string encode_audit(const Audit& a) {
  Writer w;
  w.u64(a.events.size());
  for (const EventAudit& e : a.events) {
    w.u32(e.event_index);
    w.u64(e.statements);
    w.u64(e.interactions);
    w.u64(e.host_calls);
    w.u64(e.host_digest);
    w.u64(e.errors.size());
    for (const std::string& s : e.errors) w.str(s);
  }
  w.str(a.final_dump);
  return w.take();
}

Audit decode_audit(std::string_view bytes) {
  Reader r(bytes);
  Audit a;
  size_t n = r.count(44);
  for (size_t i = 0; i < n; ++i) {
    EventAudit e;
    e.event_index = r.u32();
    e.statements = r.u64();
    e.interactions = r.u64();
    e.host_calls = r.u64();
    e.host_digest = r.u64();
    size_t ne = r.count(8);
    for (size_t k = 0; k < ne; ++k) e.errors.push_back(r.str());
    a.events.push_back(std::move(e));
  }
  a.final_dump = r.str();
  if (!r.at_end()) throw IntegrityError("trailing bytes in audit section");
  return a;
}

}  // namespace

size_t log_bytes(const std::vector<LogEntry>& log) { return encode_log(log).size(); }

std::string serialize_trace(const Trace& t, const TraceFileOptions& options) {
  Writer w;
  w.raw(kMagic);
  w.u32(kTraceFormatVersion);
  w.u64(t.scenario_hash);
  w.u64(t.scripts.size());
  for (const auto& [name, src] : t.scripts) {
    w.str(name);
    w.str(src);
  }
  w.str(t.scenario_json);
  w.u64(t.checkpoint_interval_ms);
  w.u64(t.statement_budget);
  w.u32(t.event_count);
  put_blob(w, encode_log(t.log), options.compress);
  w.u64(t.checkpoints.size());
  for (const Checkpoint& c : t.checkpoints) {
    w.u32(c.event_index);
    w.u64(c.interaction);
    w.u64(c.log_position);
    w.i64(c.now);
    put_blob(w, c.graph, options.compress);
  }
  put_blob(w, encode_audit(t.audit), options.compress);
  Fnv1a h;
  h.add(w.data());
  w.u64(h.value());
  return w.take();
}

Trace deserialize_trace(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 4 + 8 + 8) throw IntegrityError("trace file is truncated");
  if (bytes.substr(0, kMagic.size()) != kMagic) throw IntegrityError("not a trace file (bad magic)");
  std::string_view body = bytes.substr(0, bytes.size() - 8);
  Reader tail(bytes.substr(bytes.size() - 8));
  uint64_t stored = tail.u64();
  Reader r(body);
  r.raw(kMagic.size());
  uint32_t version = r.u32();
  if (version != kTraceFormatVersion)
    throw IntegrityError("unsupported trace format version " + std::to_string(version));
  Fnv1a h;
  h.add(body);
  if (h.value() != stored) throw IntegrityError("trace checksum mismatch (corrupt or truncated file)");

  Trace t;
  t.scenario_hash = r.u64();
  size_t ns = r.count(16);
  for (size_t i = 0; i < ns; ++i) {
    std::string name = r.str();
    t.scripts.emplace_back(std::move(name), r.str());
  }
  t.scenario_json = r.str();
  t.checkpoint_interval_ms = r.u64();
  t.statement_budget = r.u64();
  t.event_count = r.u32();
  {
    std::string log = get_blob(r);
    Reader lr(log);
    size_t n = lr.count(1);
    t.log.reserve(n);
    for (size_t i = 0; i < n; ++i) t.log.push_back(decode_entry(lr));
    if (!lr.at_end()) throw IntegrityError("trailing bytes in log section");
  }
  size_t nc = r.count(45);
  for (size_t i = 0; i < nc; ++i) {
    Checkpoint c;
    c.event_index = r.u32();
    c.interaction = r.u64();
    c.log_position = r.u64();
    c.now = r.i64();
    c.graph = get_blob(r);
    if (c.log_position > t.log.size()) throw IntegrityError("checkpoint log position out of range");
    t.checkpoints.push_back(std::move(c));
  }
  t.audit = decode_audit(get_blob(r));
  if (!r.at_end()) throw IntegrityError("trailing bytes in trace file");
  return t;
}

void save_trace(const Trace& trace, const std::string& path, const TraceFileOptions& options) {
  std::string bytes = serialize_trace(trace, options);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_trace(ss.str());
}

}  // namespace ttd::record
