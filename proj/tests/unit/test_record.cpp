#include <doctest.h>

#include "ttd/host/host_env.hpp"
#include "ttd/host/scenario.hpp"
#include "ttd/record/binary_io.hpp"
#include "ttd/record/graph.hpp"
#include "ttd/record/recorder.hpp"
#include "ttd/record/trace_file.hpp"

using namespace ttd::record;
using namespace ttd::host;
using ttd::lang::Program;

namespace {

std::shared_ptr<const Program> prog(const std::string& src) {
  return std::make_shared<const Program>(ttd::lang::parse_program({{"main", src}}));
}

Scenario scen(const std::string& json) { return parse_scenario(json); }

size_t count_kind(const Trace& t, size_t index) {
  size_t n = 0;
  for (const LogEntry& e : t.log) n += e.index() == index;
  return n;
}

}  // namespace

TEST_CASE("graph round trip keeps cycles and host callbacks") {
  auto p = prog(R"(
    let a = {name: "a"};
    let b = {back: a};
    a.next = b;
    function f(e) { }
    host.addEventListener(host.queryNode("root"), "click", f);
    host.setInterval(f, 40);
  )");
  Trace t = record_session(p, scen(R"({"version":1,"duration_ms":100})"), {});
  REQUIRE(t.checkpoints.size() >= 1);
  // Re-encoding a decoded graph is byte-identical.
  for (const Checkpoint& c : t.checkpoints) {
    DecodedGraph g = decode_graph(c.graph, p->functions().size());
    CHECK(encode_graph(g.heap, g.world) == c.graph);
  }
  CHECK_THROWS_AS(decode_graph(t.checkpoints[0].graph.substr(0, 10), p->functions().size()),
                  IntegrityError);
}

TEST_CASE("host state snapshot is a fixed point") {
  auto p = prog("host.setTimeout(function(){}, 5); let r = host.xhrOpen(\"/x\");");
  Trace t = record_session(p, scen(R"({"version":1,"duration_ms":1})"), {});
  DecodedGraph g = decode_graph(t.checkpoints.back().graph, p->functions().size());
  std::string s1 = snapshot_host_state(g.world);
  HostWorld w = restore_host_state(s1, g.object_count);
  CHECK(snapshot_host_state(w) == s1);
}

TEST_CASE("trace file round trip and integrity") {
  auto p = prog("let n = 0; function t() { n = n + 1; host.log(str(host.dateNow())); } host.setInterval(t, 50);");
  Trace t = record_session(p, scen(R"({"version":1,"duration_ms":3000})"), {});
  std::string packed = serialize_trace(t);
  std::string raw = serialize_trace(t, {.compress = false});
  CHECK(packed.size() < raw.size());
  CHECK(deserialize_trace(packed) == t);
  CHECK(deserialize_trace(raw) == t);
  CHECK_THROWS_AS(deserialize_trace(packed.substr(0, packed.size() - 1)), IntegrityError);
  std::string flipped = raw;
  flipped[flipped.size() / 2] ^= 0x20;
  CHECK_THROWS_AS(deserialize_trace(flipped), IntegrityError);
}

TEST_CASE("pure compute logs only event entries") {
  auto p = prog("let s = 0; let i = 0; while (i < 500) { s = s + i; i = i + 1; }");
  Trace t = record_session(p, scen(R"({"version":1})"), {});
  REQUIRE(t.log.size() == 1);
  CHECK(std::holds_alternative<EventEntry>(t.log[0]));
  CHECK(t.event_count == 1);
  CHECK(t.audit.events[0].statements > 1000);
}

TEST_CASE("date reads become simple entries") {
  auto p = prog("let a = host.dateNow(); let b = host.dateNow();");
  Trace t = record_session(p, scen(R"({"version":1})"), {});
  CHECK(count_kind(t, 0) == 2);
  auto& s0 = std::get<SimpleEntry>(t.log[1]);
  auto& s1 = std::get<SimpleEntry>(t.log[2]);
  CHECK(s0.interaction == 1);
  CHECK(s1.interaction == 2);
  CHECK(s0.kind == HostCallKind::DateNow);
}

TEST_CASE("checkpoints follow the interval and do not change the log") {
  auto p = prog("function t() { } host.setInterval(t, 100);");
  Scenario s = scen(R"({"version":1,"duration_ms":10000,"max_step_ms":16})");
  RecordingPolicy with;
  RecordingPolicy without;
  without.checkpoints = false;
  Trace a = record_session(p, s, with);
  Trace b = record_session(p, s, without);
  CHECK(a.log == b.log);
  CHECK(a.audit == b.audit);
  CHECK(b.checkpoints.empty());
  // t=0, then the first event at or past 2s, 4s, 6s, 8s and 10s.
  CHECK(a.checkpoints.size() == 6);
  for (size_t i = 1; i < a.checkpoints.size(); ++i)
    CHECK(a.checkpoints[i].now >= static_cast<int64_t>(i) * 2000);
  for (const Checkpoint& c : a.checkpoints)
    CHECK(std::get<EventEntry>(a.log[c.log_position]).event_index == c.event_index);
}

TEST_CASE("concurrent updates are keyed by the interaction counter") {
  auto p = prog(R"(
    let n = host.createElement("div");
    host.setAttribute(n, "animate", 16);
    host.appendChild(host.queryNode("root"), n);
    let i = 0;
    while (i < 200) { host.getAttribute(n, "frame"); i = i + 1; }
  )");
  Trace t = record_session(p, scen(R"({"version":1,"concurrency":0.5})"), {});
  size_t conc = 0;
  uint64_t last = 0;
  for (const LogEntry& e : t.log)
    if (auto* c = std::get_if<ConcurrentEntry>(&e)) {
      CHECK(c->interaction > last);
      last = c->interaction;
      ++conc;
    }
  CHECK(conc > 20);
}
