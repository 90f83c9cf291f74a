#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <filesystem>
#include <random>
#include <thread>

#include "ttd/host/scenario.hpp"
#include "ttd/proto/protocol.hpp"
#include "ttd/proto/server.hpp"
#include "ttd/record/recorder.hpp"
#include "ttd/record/trace_file.hpp"

using namespace ttd;
using namespace ttd::proto;

namespace {

struct MemoryPeer : Peer {
  std::mutex mu;
  std::vector<json> out;
  void send(const json& m) override {
    std::lock_guard lock(mu);
    out.push_back(m);
  }
  std::vector<json> take() {
    std::lock_guard lock(mu);
    return std::exchange(out, {});
  }
};

const char* kSource = R"(let total = 0;
function add(x) {
  let y = x * 2;
  total = total + y;
}
function onTick(e) {
  add(e.time);
}
host.setInterval(onTick, 100);
let note = host.createElement("p");
host.appendChild(host.queryNode("root"), note);
host.storageSet("k", "v");
)";

std::string write_trace() {
  auto p = std::make_shared<const lang::Program>(lang::parse_program({{"app", kSource}}));
  record::Trace t = record::record_session(
      p, host::parse_scenario(R"({"version":1,"duration_ms":1000,"max_step_ms":20})"), {});
  auto path = std::filesystem::temp_directory_path() / ("ttd_proto_" + std::to_string(::getpid()) + ".ttdt");
  record::save_trace(t, path.string());
  return path.string();
}

json request(ProtocolEngine& e, MemoryPeer& p, int id, const std::string& method, json params = json::object()) {
  e.handle_line(p, json{{"id", id}, {"method", method}, {"params", params}}.dump());
  auto msgs = p.take();
  REQUIRE(!msgs.empty());
  for (size_t i = 0; i + 1 < msgs.size(); ++i) CHECK(!msgs[i].contains("id"));
  CHECK(msgs.back()["id"] == id);
  return msgs.back();
}

}  // namespace

TEST_CASE("session lifecycle over the engine") {
  std::string path = write_trace();
  ProtocolEngine engine;
  MemoryPeer peer;

  engine.handle_line(peer, json{{"id", 1}, {"method", "session.open"}, {"params", {{"trace", path}}}}.dump());
  auto msgs = peer.take();
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[0]["method"] == "stopped");
  CHECK(msgs[0]["params"]["reason"] == "entry");
  json open = msgs[1];
  REQUIRE(open["ok"] == true);
  std::string sid = open["result"]["session"];
  CHECK(sid == "s1");
  CHECK(open["result"]["events"] == 11);
  json s = {{"session", sid}};

  json back = request(engine, peer, 2, "exec.stepBack", s);
  CHECK(back["ok"] == false);
  CHECK(back["error"]["name"] == "no-predecessor");

  json bp = request(engine, peer, 3, "bp.set", {{"session", sid}, {"line", 4}});
  CHECK(bp["ok"] == true);
  json hit = request(engine, peer, 4, "exec.continue", s);
  CHECK(hit["result"]["reason"] == "breakpoint");
  CHECK(hit["result"]["location"]["line"] == 4);

  json locals = request(engine, peer, 5, "inspect.locals", s);
  CHECK(locals["result"]["total"] == 2);
  json stack = request(engine, peer, 6, "inspect.stack", s);
  CHECK(stack["result"].size() == 2);
  CHECK(stack["result"][0]["function"] == "add");
  json heap = request(engine, peer, 7, "inspect.heap", {{"session", sid}, {"path", "locals.y"}});
  json when = request(engine, peer, 70, "inspect.heap", {{"session", sid}, {"path", "frame1.e.time"}});
  CHECK(heap["result"]["value"]["value"] == std::to_string(2 * std::stoi(when["result"]["value"]["value"].get<std::string>())));
  json dom = request(engine, peer, 8, "inspect.dom", s);
  CHECK(dom["result"]["root"]["children"][0]["tag"] == "p");
  json storage = request(engine, peer, 9, "inspect.storage", s);
  CHECK(storage["result"][0]["key"] == "k");
  json bad = request(engine, peer, 10, "inspect.heap", {{"session", sid}, {"path", "nope.x"}});
  CHECK(bad["error"]["name"] == "invalid-params");

  json stepped = request(engine, peer, 11, "exec.stepBack", s);
  CHECK(stepped["result"]["location"]["line"] == 3);
  json travel = request(engine, peer, 12, "exec.travelTo",
                        {{"session", sid}, {"event", 3}, {"location", {{"line", 4}}}, {"logicalTime", {{"c", 1}, {"b", 0}}}});
  CHECK(travel["result"]["event"] == 3);
  CHECK(travel["result"]["reason"] == "timeTravel");
  json never = request(engine, peer, 13, "exec.travelTo",
                       {{"session", sid}, {"event", 3}, {"location", {{"line", 4}}}, {"logicalTime", {{"c", 9}, {"b", 0}}}});
  CHECK(never["error"]["name"] == "target-not-reached");

  json info = request(engine, peer, 14, "timeline.info", s);
  CHECK(info["result"]["events"] == 11);
  CHECK(info["result"]["eventList"].size() == 11);

  json closed = request(engine, peer, 15, "session.close", s);
  CHECK(closed["ok"] == true);
  CHECK(engine.session_count() == 0);
  CHECK(request(engine, peer, 16, "exec.continue", s)["error"]["name"] == "unknown-session");
  CHECK(request(engine, peer, 16, "bp.list", s)["error"]["name"] == "invalid-request");
  std::filesystem::remove(path);
}

TEST_CASE("malformed requests get error responses") {
  ProtocolEngine engine;
  MemoryPeer peer;
  engine.handle_line(peer, "{not json");
  auto m = peer.take();
  REQUIRE(m.size() == 1);
  CHECK(m[0]["error"]["code"] == -32700);
  CHECK(m[0]["id"].is_null());
  engine.handle_line(peer, "[1,2]");
  CHECK(peer.take()[0]["error"]["name"] == "invalid-request");
  engine.handle_line(peer, R"({"id":1,"method":"nope"})");
  CHECK(peer.take()[0]["error"]["name"] == "unknown-method");
  engine.handle_line(peer, R"({"id":2,"method":"session.open","params":{"trace":"/nonexistent.ttdt"}})");
  CHECK(peer.take()[0]["error"]["name"] == "trace-error");
}

TEST_CASE("concurrent stepping on one session is rejected") {
  std::string path = write_trace();
  std::mutex mu;
  std::condition_variable cv;
  bool entered = false, release = false;
  EngineOptions opts;
  opts.on_exec_start = [&] {
    std::unique_lock lock(mu);
    entered = true;
    cv.notify_all();
    cv.wait(lock, [&] { return release; });
  };
  ProtocolEngine engine(opts);
  MemoryPeer a, b;
  engine.handle_line(a, json{{"id", 1}, {"method", "session.open"}, {"params", {{"trace", path}}}}.dump());
  a.take();
  std::thread first([&] {
    engine.handle_line(a, R"({"id":2,"method":"exec.stepForward","params":{"session":"s1"}})");
  });
  {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return entered; });
  }
  engine.handle_line(b, R"({"id":1,"method":"exec.stepBack","params":{"session":"s1"}})");
  auto rejected = b.take();
  REQUIRE(rejected.size() == 1);
  CHECK(rejected[0]["error"]["name"] == "busy");
  {
    std::lock_guard lock(mu);
    release = true;
  }
  cv.notify_all();
  first.join();
  CHECK(a.take().back()["ok"] == true);
  std::filesystem::remove(path);
}

TEST_CASE("random byte streams never break the engine") {
  std::string path = write_trace();
  ProtocolEngine engine;
  MemoryPeer peer;
  engine.handle_line(peer, json{{"id", "open"}, {"method", "session.open"}, {"params", {{"trace", path}}}}.dump());
  peer.take();
  std::mt19937_64 rng(99);
  const std::vector<std::string> methods = {"exec.stepBack", "exec.stepForward", "exec.continue",
                                            "inspect.heap", "inspect.locals", "bp.set", "exec.travelTo",
                                            "timeline.info", "session.source", "inspect.dom"};
  for (int i = 0; i < 3000; ++i) {
    std::string line;
    if (i % 3 == 0) {
      size_t n = rng() % 200;
      for (size_t k = 0; k < n; ++k) line.push_back(static_cast<char>(rng() % 256));
    } else {
      json params = {{"session", rng() % 4 ? "s1" : "s9"}};
      switch (rng() % 6) {
        case 0: params["line"] = static_cast<int64_t>(rng() % 20) - 2; break;
        case 1: params["path"] = std::string(1, static_cast<char>(32 + rng() % 95)) + "x[" + std::to_string(rng() % 5); break;
        case 2: params["event"] = rng() % 15; params["ordinal"] = rng() % 10; break;
        case 3: params["logicalTime"] = {{"c", "x"}}; break;
        case 4: params["start"] = -1; break;
        default: break;
      }
      line = json{{"id", i}, {"method", methods[rng() % methods.size()]}, {"params", params}}.dump();
      if (i % 3 == 2 && !line.empty()) line[rng() % line.size()] = static_cast<char>(rng() % 256);
    }
    bool blank = line.find_first_not_of(" \t\r\n") == std::string::npos;
    CHECK_NOTHROW(engine.handle_line(peer, line));
    auto out = peer.take();
    size_t responses = 0;
    for (const json& m : out) responses += m.contains("id");
    if (!blank) CHECK(responses == 1);
  }
  std::filesystem::remove(path);
}

TEST_CASE("tcp server handshake and survival") {
  ProtocolEngine engine;
  Server server(engine);
  server.start(0);
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(server.port());
  REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  auto read_line = [&] {
    std::string s;
    char ch;
    while (::recv(fd, &ch, 1, 0) == 1 && ch != '\n') s.push_back(ch);
    return json::parse(s);
  };
  json hello = read_line();
  CHECK(hello["method"] == "hello");
  CHECK(hello["params"]["protocol"] == 1);
  std::string junk = "\x01\xff garbage\n{\"id\":7,\"method\":\"timeline.info\",\"params\":{\"session\":\"s1\"}}\n";
  ::send(fd, junk.data(), junk.size(), 0);
  CHECK(read_line()["error"]["code"] == -32700);
  json r = read_line();
  CHECK(r["id"] == 7);
  CHECK(r["error"]["name"] == "unknown-session");
  ::close(fd);
  server.stop();
}
