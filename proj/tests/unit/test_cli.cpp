#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "ttd/cli/commands.hpp"
#include "ttd/cli/config.hpp"
#include "ttd/cli/debug_script.hpp"
#include "ttd/host/canonical.hpp"
#include "ttd/host/scenario.hpp"
#include "ttd/record/trace_file.hpp"

using namespace ttd;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run ttd_run(std::vector<std::string> args) {
  args.insert(args.begin(), "ttd");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  fs::path d = fs::temp_directory_path() / ("ttd_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

std::string demo(const std::string& name, const std::string& file) {
  return std::string(TTD_SOURCE_DIR) + "/demos/" + name + "/" + file;
}

std::string write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string recorded(const std::string& name, std::vector<std::string> extra = {},
                     const std::string& tag = "") {
  fs::path out = scratch() / (name + tag + ".ttdt");
  std::vector<std::string> args = {"record", demo(name, "app.gs"), demo(name, "scenario.json"), "--out", out.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  Run r = ttd_run(args);
  REQUIRE(r.code == 0);
  return out.string();
}

size_t summary_number(const std::string& summary, const std::string& label) {
  auto at = summary.find(label);
  REQUIRE(at != std::string::npos);
  return std::stoul(summary.substr(at + label.size()));
}

}  // namespace

TEST_CASE("record writes a trace and a summary") {
  fs::path out = scratch() / "todo.ttdt";
  Run r = ttd_run({"record", demo("todo", "app.gs"), demo("todo", "scenario.json"), "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(out));
  CHECK(summary_number(r.out, "checkpoints  ") >= 1);
  CHECK(summary_number(r.out, "events       ") == 42);
  CHECK(summary_number(r.out, "trace bytes  ") == fs::file_size(out));
}

TEST_CASE("input errors exit 2") {
  CHECK(ttd_run({"record", demo("todo", "app.gs"), "/nonexistent/scenario.json"}).code == 2);
  Run missing = ttd_run({"record", demo("todo", "app.gs"), "/nonexistent/scenario.json"});
  CHECK(missing.err.find("cannot read") != std::string::npos);
  CHECK(ttd_run({"record"}).code == 2);
  CHECK(ttd_run({"frobnicate"}).code == 2);
  CHECK(ttd_run({"verify", "/nonexistent.ttdt"}).code == 2);
  fs::path bad = scratch() / "bad.gs";
  write(bad, "let x = ;\n");
  CHECK(ttd_run({"record", bad.string(), demo("todo", "scenario.json")}).code == 2);
  CHECK(ttd_run({"record", demo("todo", "app.gs"), demo("todo", "scenario.json"), "--checkpoint-interval-ms", "0",
                 "--out", (scratch() / "z.ttdt").string()})
            .code == 2);
  CHECK(ttd_run({"--help"}).code == 0);
}

TEST_CASE("verify: ok, all checkpoints, damaged") {
  std::string path = recorded("gallery");
  Run ok = ttd_run({"--no-color", "verify", path});
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("ok:", 0) == 0);
  CHECK(ttd_run({"verify", path, "--all-checkpoints"}).code == 0);

  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  for (size_t at : {bytes.size() / 3, bytes.size() / 2, bytes.size() - 3}) {
    std::string flipped = bytes;
    flipped[at] = static_cast<char>(flipped[at] ^ 0x10);
    std::string p = write(scratch() / "flipped.ttdt", flipped);
    Run r = ttd_run({"--no-color", "verify", p});
    CHECK(r.code == 1);
    CHECK(r.out.rfind("FAILED", 0) == 0);
  }

  // Valid file, wrong content: a log value changed before serialization.
  record::Trace t = record::load_trace(path);
  bool changed = false;
  for (auto& e : t.log) {
    if (auto* ev = std::get_if<record::EventEntry>(&e); ev && ev->event_index == 3) {
      ev->seq += 100;
      changed = true;
    }
  }
  REQUIRE(changed);
  fs::path mutated = scratch() / "mutated.ttdt";
  record::save_trace(t, mutated.string());
  Run r = ttd_run({"--no-color", "verify", mutated.string()});
  CHECK(r.code == 1);
  CHECK(r.out.find("state-mismatch") != std::string::npos);
}

TEST_CASE("checkpoint interval halves the spacing on the 10s demo") {
  std::string t2 = recorded("snake");
  std::string t1 = recorded("snake", {"--checkpoint-interval-ms", "1000"}, "_1000");
  record::Trace a = record::load_trace(t2), b = record::load_trace(t1);
  CHECK(a.log == b.log);

  // Oracle: clock value before each event, read off the log.
  std::map<uint32_t, int64_t> advanced;
  for (const auto& e : a.log)
    if (auto* ie = std::get_if<record::InterEventEntry>(&e))
      for (const auto& u : ie->updates)
        if (auto* c = std::get_if<host::ClockAdvance>(&u)) advanced[ie->before_event_index] = c->now;
  std::vector<int64_t> clock(a.event_count, 0);
  for (uint32_t k = 0; k < a.event_count; ++k) {
    auto it = advanced.find(k);
    clock[k] = it != advanced.end() ? it->second : (k ? clock[k - 1] : 0);
  }
  auto expected = [&](int64_t interval) {
    size_t n = 1;
    int64_t bucket = clock[0] / interval;
    for (size_t k = 1; k < clock.size(); ++k)
      if (clock[k] / interval != bucket) {
        bucket = clock[k] / interval;
        ++n;
      }
    return n;
  };
  CHECK(a.checkpoints.size() == expected(2000));
  CHECK(b.checkpoints.size() == expected(1000));
  double ratio = static_cast<double>(b.checkpoints.size()) / static_cast<double>(a.checkpoints.size());
  CHECK(ratio > 1.5);
  CHECK(ratio < 2.5);
}

TEST_CASE("debug scripts") {
  std::string path = recorded("todo");
  fs::path s1 = scratch() / "back.txt";
  write(s1, "stepback\n");
  Run back = ttd_run({"debug", path, "--script", s1.string()});
  CHECK(back.code == 0);
  CHECK(back.out.find("no-predecessor") != std::string::npos);

  fs::path bad = scratch() / "bad.txt";
  write(bad, "step\nfly away\n");
  Run r = ttd_run({"debug", path, "--script", bad.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK(r.out.empty());  // nothing ran

  fs::path golden = scratch() / "golden.txt";
  write(golden,
        "bp 66\n"
        "continue\n"
        "where\n"
        "stack\n"
        "locals\n"
        "step\n"
        "step\n"
        "stepback\n"
        "stepback\n"
        "rout\n"
        "continue\n"
        "continue\n"
        "print items[0].title\n"
        "travel 20\n"
        "stepback\n"
        "stepback\n"
        "rnext\n"
        "globals\n"
        "inspect storage\n"
        "inspect dom\n"
        "timeline\n");
  Run g1 = ttd_run({"debug", path, "--script", golden.string()});
  Run g2 = ttd_run({"debug", path, "--script", golden.string()});
  CHECK(g1.code == 0);
  CHECK(g1.out == g2.out);
  CHECK(g1.out.find("[breakpoint 1]") != std::string::npos);
  CHECK(g1.out.find("items[0].title = milk") != std::string::npos);
  CHECK(g1.out.find("error:") == std::string::npos);
}

TEST_CASE("script parser validates arguments") {
  CHECK_THROWS_AS(cli::parse_debug_script("bp x\n"), cli::ScriptError);
  CHECK_THROWS_AS(cli::parse_debug_script("bp 3 at 1\n"), cli::ScriptError);
  CHECK_THROWS_AS(cli::parse_debug_script("travel 1 line 4\n"), cli::ScriptError);
  CHECK_THROWS_AS(cli::parse_debug_script("step 2\n"), cli::ScriptError);
  auto cmds = cli::parse_debug_script("# comment\n\nb 4 at 3,2\nback   # trailing\n");
  REQUIRE(cmds.size() == 2);
  CHECK(cmds[0].verb == "bp");
  CHECK(cmds[0].line == 3);
  CHECK(cmds[1].verb == "stepback");
}

TEST_CASE("dump") {
  fs::path pure = scratch() / "pure.gs";
  write(pure, "let s = 0;\nlet i = 0;\nwhile (i < 500) {\n  s = s + i;\n  i = i + 1;\n}\n");
  fs::path sc = scratch() / "pure.json";
  write(sc, R"({"version":1,"duration_ms":100})");
  fs::path out = scratch() / "pure.ttdt";
  REQUIRE(ttd_run({"record", pure.string(), sc.string(), "--out", out.string()}).code == 0);
  Run log = ttd_run({"dump", out.string(), "--what", "log"});
  REQUIRE(log.code == 0);
  std::istringstream lines(log.out);
  size_t n = 0;
  for (std::string l; std::getline(lines, l); ++n) CHECK(l.find(" event ") != std::string::npos);
  CHECK(n == 1);

  std::string path = recorded("feed");
  record::Trace t = record::load_trace(path);
  host::Scenario scenario = host::parse_scenario(t.scenario_json);
  host::HostWorld initial = host::make_initial_world(scenario.documents, scenario.prng_seed, 1);
  lang::Program program = lang::parse_program(t.scripts);
  lang::Heap heap;
  Run d0 = ttd_run({"dump", path, "--what", "dom@0"});
  REQUIRE(d0.code == 0);
  CHECK(d0.out == host::canonical_dom(initial, program, heap));

  Run last = ttd_run({"dump", path, "--what", "dom@" + std::to_string(t.event_count)});
  REQUIRE(last.code == 0);
  const std::string& fd = t.audit.final_dump;
  auto from = fd.find("dom\n") + 4;
  auto to = fd.find("detached");
  CHECK(last.out == fd.substr(from, to - from));

  CHECK(ttd_run({"dump", path, "--what", "dom@" + std::to_string(t.event_count + 1)}).code == 2);
  CHECK(ttd_run({"dump", path, "--what", "heap"}).code == 2);
  Run cps = ttd_run({"dump", path, "--what", "checkpoints"});
  CHECK(cps.out.find("checkpoint event=0") != std::string::npos);
}

TEST_CASE(".ttdrc") {
  cli::Config c = cli::parse_config(R"({"checkpoint_interval_ms": 500, "port": 1234, "color": false})");
  CHECK(c.checkpoint_interval_ms == 500);
  CHECK(c.port == 1234);
  CHECK_FALSE(c.color);
  CHECK(c.compress);
  CHECK_THROWS_AS(cli::parse_config(R"({"colour": true})"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_config("[1]"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"checkpoint_interval_ms": "x"})"), cli::ConfigError);

  fs::path dir = scratch() / "rc";
  fs::create_directories(dir);
  write(dir / ".ttdrc", R"({"checkpoint_interval_ms": 700})");
  CHECK(cli::load_config(dir).checkpoint_interval_ms == 700);
  CHECK(cli::load_config(dir).source == dir / ".ttdrc");
  CHECK_FALSE(cli::use_color(c, false));
}

TEST_CASE("serve answers the handshake") {
  std::string path = recorded("todo");
  int probe = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  REQUIRE(::bind(probe, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  socklen_t len = sizeof addr;
  ::getsockname(probe, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(probe);
  std::string port = std::to_string(ntohs(addr.sin_port));

  Run served{};
  std::thread server([&] { served = ttd_run({"debug", path, "--serve", "--port", port}); });
  std::string hello;
  for (int attempt = 0; attempt < 200 && hello.empty(); ++attempt) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) {
      char c;
      while (::read(fd, &c, 1) == 1 && c != '\n') hello += c;
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::close(fd);
  }
  std::raise(SIGINT);
  server.join();
  CHECK(hello == R"({"method":"hello","params":{"protocol":1,"server":"ttd"}})");
  CHECK(served.code == 0);
}
