#include <doctest.h>

#include "ttd/host/scenario.hpp"
#include "ttd/record/recorder.hpp"
#include "ttd/replay/replay_session.hpp"
#include "ttd/replay/verify.hpp"

using namespace ttd::record;
using namespace ttd::replay;
using namespace ttd::host;
using ttd::lang::Program;

namespace {

std::shared_ptr<const Program> prog(const std::string& src) {
  return std::make_shared<const Program>(ttd::lang::parse_program({{"main", src}}));
}

const char* kApp = R"(
  let clicks = 0;
  let frames = [];
  let body = "";
  let spinner = host.createElement("div");
  host.setAttribute(spinner, "animate", 16);
  host.appendChild(host.queryNode("root"), spinner);
  function onClick(e) {
    clicks = clicks + 1;
    push(frames, host.getAttribute(spinner, "frame"));
    host.setAttribute(host.queryNode("out"), "text", str(clicks) + "@" + str(host.dateNow()));
  }
  function onComplete(e) {
    host.addEventListener(host.queryNode("btn"), "click", onClick);
  }
  host.addEventListener(host.queryNode("root"), "complete", onComplete);
  function onData(e) {
    if (e.readyState == 4) { body = host.xhrResponse(req); }
  }
  let req = host.xhrOpen("/data");
  host.xhrSend(req, onData);
  let ticks = 0;
  function tick() {
    ticks = ticks + 1;
    push(frames, host.getAttribute(spinner, "frame"));
    if (ticks == 20) { host.clearTimer(loop); }
  }
  let loop = host.setInterval(tick, 80);
)";

const char* kAppScenario = R"({"version":1,"seed":SEED,"duration_ms":4000,"concurrency":0.3,
  "documents":["<div id=\"btn\"></div><p id=\"out\"></p><img id=\"pic\" src=\"a.png\"/>"],
  "inputs":[{"at":900,"type":"click","target":"btn"},{"at":2500,"type":"click","target":"btn"}],
  "responses":{"/data":{"body":"0123456789abcdef","headers_ms":30,"chunks":[[60,8],[200,8]]}},
  "resources":{"a.png":{"delay_ms":40,"width":4,"height":3,"bytes":48}}})";

Trace record_app(uint64_t seed, RecordingPolicy policy = {}) {
  std::string s = kAppScenario;
  s.replace(s.find("SEED"), 4, std::to_string(seed));
  return record_session(prog(kApp), parse_scenario(s), policy);
}

std::optional<DivergenceReport> verify(const Trace& t) {
  return verify_replay(t).divergence;
}

}  // namespace

TEST_CASE("replay verifies across seeds and checkpoints") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    CAPTURE(seed);
    Trace t = record_app(seed);
    CHECK(t.event_count > 25);
    VerifyResult r = verify_replay(t, {.all_checkpoints = true});
    CHECK_MESSAGE(r.ok(), (r.divergence ? r.divergence->to_string() : ""));
    CHECK(r.replays == t.checkpoints.size());
    CHECK(r.checkpoints_compared + 1 == t.checkpoints.size());
  }
}

TEST_CASE("replay stepping matches whole-event replay") {
  Trace t = record_app(3);
  auto shared = std::make_shared<const Trace>(t);
  ReplaySession a(shared), b(shared);
  a.start(0);
  b.start(0);
  while (!a.finished()) {
    a.begin_event();
    while (a.in_event()) a.step();
    b.replay_event();
    CHECK(a.next_event() == b.next_event());
    CHECK(a.world().interactions == b.world().interactions);
  }
  a.run_to_end();
  CHECK(a.events_replayed() == t.event_count);
}

TEST_CASE("a concurrent entry applies at its interaction") {
  auto p = prog(R"(
    let n = host.createElement("div");
    host.setAttribute(n, "animate", 16);
    host.appendChild(host.queryNode("root"), n);
    let seen = [];
    let i = 0;
    while (i < 100) { push(seen, host.getAttribute(n, "frame")); i = i + 1; }
  )");
  Trace t = record_session(p, parse_scenario(R"({"version":1,"duration_ms":0})"), {});
  REQUIRE(t.log.size() == 1);
  // Calls 1-4 set up; loop iteration i makes call 5 + i.
  t.log.push_back(ConcurrentEntry{60, {AnimationAdvance{1, 7}}});
  t.audit.events.clear();
  ReplaySession s(std::make_shared<const Trace>(t), p);
  s.start(0);
  s.run_to_end();
  const auto& heap = s.heap();
  auto seen = std::get<ttd::lang::ObjectRef>(*heap.at(heap.globals()).find("seen")).id;
  const auto& el = heap.at(seen).elements;
  REQUIRE(el.size() == 100);
  CHECK(std::get<std::string>(el[54]) == bound_attribute_value(0));
  CHECK(std::get<std::string>(el[55]) == bound_attribute_value(7));
  CHECK(std::get<std::string>(el[99]) == bound_attribute_value(7));
}

TEST_CASE("fault-injected traces report divergence") {
  Trace base = record_app(2);
  REQUIRE(!verify(base));
  auto find = [&](auto pred) {
    for (size_t i = 0; i < base.log.size(); ++i)
      if (pred(base.log[i])) return i;
    FAIL("entry not found");
    return size_t{0};
  };

  SUBCASE("mutated date value") {
    Trace t = base;
    size_t i = find([](const LogEntry& e) {
      auto* s = std::get_if<SimpleEntry>(&e);
      return s && s->kind == HostCallKind::DateNow;
    });
    std::get<SimpleEntry>(t.log[i]).value += 1;
    auto r = verify(t);
    REQUIRE(r);
    CHECK(r->kind == DivergenceKind::StateMismatch);
  }
  SUBCASE("deleted simple entry") {
    Trace t = base;
    t.log.erase(t.log.begin() + find([](const LogEntry& e) { return e.index() == 0; }));
    auto r = verify(t);
    REQUIRE(r);
    CHECK(r->kind == DivergenceKind::MissingLogEntry);
  }
  SUBCASE("deleted inter-event entry") {
    Trace t = base;
    t.log.erase(t.log.begin() + find([](const LogEntry& e) {
      auto* ie = std::get_if<InterEventEntry>(&e);
      return ie && ie->before_event_index > 5;
    }));
    CHECK(verify(t));
  }
  SUBCASE("reordered events") {
    Trace t = base;
    size_t i = find([](const LogEntry& e) {
      auto* ev = std::get_if<EventEntry>(&e);
      return ev && ev->event_index == 3;
    });
    size_t j = find([](const LogEntry& e) {
      auto* ev = std::get_if<EventEntry>(&e);
      return ev && ev->event_index == 4;
    });
    std::swap(std::get<EventEntry>(t.log[i]).seq, std::get<EventEntry>(t.log[j]).seq);
    std::swap(std::get<EventEntry>(t.log[i]).descriptor, std::get<EventEntry>(t.log[j]).descriptor);
    auto r = verify(t);
    REQUIRE(r);
  }
  SUBCASE("illegal update") {
    Trace t = base;
    size_t i = find([](const LogEntry& e) { return std::holds_alternative<InterEventEntry>(e); });
    std::get<InterEventEntry>(t.log[i]).updates.insert(
        std::get<InterEventEntry>(t.log[i]).updates.begin(), AnimationAdvance{999, 1});
    auto r = verify(t);
    REQUIRE(r);
    CHECK(r->kind == DivergenceKind::StateMismatch);
  }
  SUBCASE("extra trailing entry") {
    Trace t = base;
    t.log.push_back(SimpleEntry{t.audit.events.back().interactions + 5, HostCallKind::DateNow, 1});
    auto r = verify(t);
    REQUIRE(r);
    CHECK(r->kind == DivergenceKind::LeftoverEntries);
  }
  SUBCASE("corrupted checkpoint graph") {
    Trace t = base;
    t.checkpoints[0].graph.resize(t.checkpoints[0].graph.size() / 2);
    CHECK(verify(t));
  }
}

TEST_CASE("captured checkpoints equal recorded ones") {
  RecordingPolicy every;
  every.checkpoint_every_event = true;
  Trace t = record_app(4, every);
  REQUIRE(t.checkpoints.size() == t.event_count);
  ReplaySession s(std::make_shared<const Trace>(t));
  s.start(0);
  for (uint32_t k = 1; k < t.event_count; k += 7) {
    s.replay_until_event(k);
    CHECK(s.capture_checkpoint() == t.checkpoints[k]);
  }
}
