#include "ttd/record/log.hpp"

#include "ttd/lang/interpreter.hpp"
#include "ttd/record/codec.hpp"

namespace ttd::record {

namespace {

void encode_updates(Writer& w, const std::vector<host::HostUpdate>& ups) {
  w.u64(ups.size());
  for (const auto& u : ups) encode_update(w, u);
}

std::vector<host::HostUpdate> decode_updates(Reader& r) {
  std::vector<host::HostUpdate> ups;
  size_t n = r.count(5);
  for (size_t i = 0; i < n; ++i) ups.push_back(decode_update(r));
  return ups;
}

}  // namespace

void encode_entry(Writer& w, const LogEntry& e) {
  w.u8(static_cast<uint8_t>(e.index()));
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SimpleEntry>) {
          w.u64(x.interaction);
          w.u8(static_cast<uint8_t>(x.kind));
          w.f64(x.value);
        } else if constexpr (std::is_same_v<T, EventEntry>) {
          w.u32(x.event_index);
          w.u64(x.seq);
          encode_descriptor(w, x.descriptor);
        } else if constexpr (std::is_same_v<T, InterEventEntry>) {
          w.u32(x.before_event_index);
          encode_updates(w, x.updates);
        } else {
          w.u64(x.interaction);
          encode_updates(w, x.updates);
        }
      },
      e);
}

LogEntry decode_entry(Reader& r) {
  switch (r.u8()) {
    case 0: {
      SimpleEntry s;
      s.interaction = r.u64();
      uint8_t k = r.u8();
      if (k >= lang::kHostCallKindCount) throw IntegrityError("invalid host call kind");
      s.kind = static_cast<lang::HostCallKind>(k);
      s.value = r.f64();
      return s;
    }
    case 1: {
      EventEntry e;
      e.event_index = r.u32();
      e.seq = r.u64();
      e.descriptor = decode_descriptor(r);
      return e;
    }
    case 2: {
      InterEventEntry i;
      i.before_event_index = r.u32();
      i.updates = decode_updates(r);
      return i;
    }
    case 3: {
      ConcurrentEntry c;
      c.interaction = r.u64();
      c.updates = decode_updates(r);
      return c;
    }
    default: throw IntegrityError("invalid log entry tag");
  }
}

const char* entry_kind_name(const LogEntry& e) {
  static const char* names[] = {"simple", "event", "inter-event", "concurrent"};
  return names[e.index()];
}

std::string describe(const LogEntry& e) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SimpleEntry>) {
          return "simple  #" + std::to_string(x.interaction) + " " +
                 std::string(lang::host_call_name(x.kind)) + " = " + lang::number_to_string(x.value);
        } else if constexpr (std::is_same_v<T, EventEntry>) {
          return "event   " + std::to_string(x.event_index) + " seq=" + std::to_string(x.seq) + " " +
                 host::event_kind_name(x.descriptor.kind) + ":" + x.descriptor.type + "@" +
                 std::to_string(x.descriptor.target);
        } else {
          std::string head;
          if constexpr (std::is_same_v<T, InterEventEntry>)
            head = "inter   before " + std::to_string(x.before_event_index);
          else
            head = "concur  #" + std::to_string(x.interaction);
          for (const auto& u : x.updates) head += "\n          " + host::describe(u);
          return head;
        }
      },
      e);
}

}  // namespace ttd::record
