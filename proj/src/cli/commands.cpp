#include "ttd/cli/commands.hpp"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "ttd/cli/config.hpp"
#include "ttd/cli/debug_script.hpp"
#include "ttd/debugger/debug_session.hpp"
#include "ttd/host/canonical.hpp"
#include "ttd/proto/protocol.hpp"
#include "ttd/proto/server.hpp"
#include "ttd/record/recorder.hpp"
#include "ttd/record/trace_file.hpp"
#include "ttd/replay/replay_session.hpp"
#include "ttd/replay/verify.hpp"

namespace ttd::cli {

namespace {

// Input problems that map to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Paint {
  bool on = false;
  std::string operator()(const std::string& s, const char* code) const {
    return on ? std::string("\x1b[") + code + "m" + s + "\x1b[0m" : s;
  }
};

struct RecordArgs {
  std::string program;
  std::vector<std::string> extra_scripts;
  std::string scenario;
  std::string out = "trace.ttdt";
  std::optional<int64_t> interval;
  std::optional<uint64_t> seed;
  std::optional<uint64_t> budget;
  bool no_compress = false;
};

int cmd_record(const RecordArgs& a, const Config& cfg, std::ostream& out) {
  std::vector<std::pair<std::string, std::string>> sources;
  sources.emplace_back(std::filesystem::path(a.program).filename().string(), read_file(a.program));
  for (const auto& s : a.extra_scripts)
    sources.emplace_back(std::filesystem::path(s).filename().string(), read_file(s));
  std::string scenario_text = read_file(a.scenario);

  std::shared_ptr<const lang::Program> program;
  host::Scenario scenario;
  try {
    program = std::make_shared<const lang::Program>(lang::parse_program(sources));
    scenario = host::parse_scenario(scenario_text);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  if (a.seed) scenario.seed = *a.seed;

  record::RecordingPolicy policy;
  policy.checkpoint_interval_ms = a.interval.value_or(cfg.checkpoint_interval_ms);
  policy.statement_budget = a.budget.value_or(cfg.statement_budget);
  if (policy.checkpoint_interval_ms <= 0) throw InputError("--checkpoint-interval-ms must be > 0");

  record::Trace trace;
  try {
    trace = record::record_session(program, scenario, policy);
  } catch (const std::exception& e) {
    throw InputError(std::string("recording failed: ") + e.what());
  }
  record::TraceFileOptions file_opts;
  file_opts.compress = cfg.compress && !a.no_compress;
  std::string bytes = record::serialize_trace(trace, file_opts);
  {
    std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
    if (!f || !f.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
      throw InputError("cannot write " + a.out);
  }

  size_t kinds[4] = {0, 0, 0, 0};
  for (const auto& e : trace.log) ++kinds[e.index()];
  size_t cp_bytes = 0;
  for (const auto& cp : trace.checkpoints) cp_bytes += cp.graph.size();

  out << "recorded " << a.out << '\n';
  out << "  events       " << trace.event_count << '\n';
  out << "  checkpoints  " << trace.checkpoints.size() << " (events";
  for (const auto& cp : trace.checkpoints) out << ' ' << cp.event_index;
  out << ")\n";
  out << "  log entries  " << trace.log.size() << " (simple " << kinds[0] << ", event " << kinds[1]
      << ", inter-event " << kinds[2] << ", concurrent " << kinds[3] << ")\n";
  out << "  log bytes    " << record::log_bytes(trace.log) << '\n';
  out << "  checkpoint bytes " << cp_bytes << '\n';
  out << "  trace bytes  " << bytes.size() << '\n';
  return kExitOk;
}

std::shared_ptr<const record::Trace> open_trace(const std::string& path) {
  std::string bytes = read_file(path);
  try {
    return std::make_shared<const record::Trace>(record::deserialize_trace(bytes));
  } catch (const std::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

int cmd_verify(const std::string& path, bool all, const Paint& paint, std::ostream& out) {
  std::string bytes = read_file(path);
  record::Trace trace;
  try {
    trace = record::deserialize_trace(bytes);
  } catch (const std::exception& e) {
    // A damaged trace is a verification failure, not a usage error.
    out << paint("FAILED", "31") << ": trace integrity: " << e.what() << '\n';
    return kExitFailure;
  }
  replay::VerifyOptions opts;
  opts.all_checkpoints = all;
  replay::VerifyResult r = replay::verify_replay(trace, opts);
  if (!r.ok()) {
    out << paint("FAILED", "31") << ": " << r.divergence->to_string() << '\n';
    return kExitFailure;
  }
  out << paint("ok", "32") << ": " << trace.event_count << " events replayed identically";
  if (all) out << ", " << r.replays << " replays, " << r.checkpoints_compared << " checkpoints compared";
  out << '\n';
  return kExitOk;
}

int cmd_debug_script(const std::string& trace_path, const std::string& script_path, std::ostream& out,
                     std::ostream& err) {
  std::vector<ScriptCommand> script;
  try {
    script = parse_debug_script(read_file(script_path));
  } catch (const ScriptError& e) {
    err << script_path << ": " << e.what() << '\n';
    return kExitUsage;
  }
  debugger::DebugSession session(open_trace(trace_path));
  return run_debug_script(session, script, out);
}

proto::Server* g_server = nullptr;

extern "C" void on_stop_signal(int) {
  if (g_server) g_server->interrupt();
}

int cmd_serve(const std::string& trace_path, uint16_t port, std::ostream& out) {
  open_trace(trace_path);  // fail fast on a bad trace
  proto::EngineOptions opts;
  opts.default_trace = trace_path;
  proto::ProtocolEngine engine(opts);
  proto::Server server(engine);
  try {
    server.start(port);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  g_server = &server;
  std::signal(SIGINT, on_stop_signal);
  std::signal(SIGTERM, on_stop_signal);
  out << "listening on 127.0.0.1:" << server.port() << std::endl;
  server.wait();
  g_server = nullptr;
  std::signal(SIGINT, SIG_DFL);
  std::signal(SIGTERM, SIG_DFL);
  server.stop();
  return kExitOk;
}

void dump_log(const record::Trace& t, std::ostream& out) {
  for (size_t i = 0; i < t.log.size(); ++i)
    out << i << ' ' << record::entry_kind_name(t.log[i]) << ' ' << record::describe(t.log[i]) << '\n';
}

void dump_checkpoints(const record::Trace& t, std::ostream& out) {
  out << "interval_ms " << t.checkpoint_interval_ms << '\n';
  for (const auto& cp : t.checkpoints)
    out << "checkpoint event=" << cp.event_index << " interaction=" << cp.interaction
        << " log_position=" << cp.log_position << " now=" << cp.now << " bytes=" << cp.graph.size() << '\n';
}

void dump_audit(const record::Trace& t, std::ostream& out) {
  for (const auto& e : t.audit.events) {
    out << "event " << e.event_index << " statements=" << e.statements << " interactions=" << e.interactions
        << " host_calls=" << e.host_calls << " digest=" << e.host_digest;
    for (const auto& err : e.errors) out << " error=\"" << err << '"';
    out << '\n';
  }
  out << t.audit.final_dump;
}

// dom@K renders the DOM immediately before Event K is dispatched; K equal to
// the event count gives the final state.
void dump_dom(std::shared_ptr<const record::Trace> t, uint32_t k, std::ostream& out) {
  replay::ReplaySession s(t);
  size_t best = 0;
  for (size_t i = 0; i < t->checkpoints.size(); ++i)
    if (t->checkpoints[i].event_index <= k) best = i;
  s.start(best);
  if (k == t->event_count) {
    s.run_to_end();
  } else {
    s.replay_until_event(k);
    s.apply_inter_event();
  }
  out << host::canonical_dom(s.world(), s.program(), s.heap());
}

int cmd_dump(const std::string& path, const std::string& what, std::ostream& out) {
  auto t = open_trace(path);
  if (what == "log") dump_log(*t, out);
  else if (what == "checkpoints") dump_checkpoints(*t, out);
  else if (what == "audit") dump_audit(*t, out);
  else if (what.rfind("dom@", 0) == 0) {
    std::string n = what.substr(4);
    if (n.empty() || n.find_first_not_of("0123456789") != std::string::npos)
      throw InputError("dom@K needs an event number");
    unsigned long long k = std::stoull(n);
    if (k > t->event_count)
      throw InputError("event " + n + " out of range (trace has " + std::to_string(t->event_count) + " events)");
    dump_dom(t, static_cast<uint32_t>(k), out);
  } else {
    throw InputError("--what must be log, checkpoints, audit or dom@K");
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ttd: record, replay and time-travel debug guest sessions", "ttd"};
  app.require_subcommand(1);
  bool no_color = false;
  app.add_flag("--no-color", no_color, "Disable colored output");

  RecordArgs rec;
  auto* record = app.add_subcommand("record", "Record a session into a trace file");
  record->add_option("program", rec.program, "Guest program")->required();
  record->add_option("scenario", rec.scenario, "Scenario JSON")->required();
  record->add_option("--out,-o", rec.out, "Trace output path");
  record->add_option("--checkpoint-interval-ms", rec.interval, "Virtual ms between checkpoints");
  record->add_option("--seed", rec.seed, "Override the scenario scheduler seed");
  record->add_option("--extra-script", rec.extra_scripts, "Additional script, run after the program");
  record->add_option("--statement-budget", rec.budget, "Statements allowed per event");
  record->add_flag("--no-compress", rec.no_compress, "Store sections uncompressed");

  std::string trace_path;
  bool all_checkpoints = false;
  auto* verify = app.add_subcommand("verify", "Replay a trace and compare with the recording");
  verify->add_option("trace", trace_path, "Trace file")->required();
  verify->add_flag("--all-checkpoints", all_checkpoints, "Also replay from every checkpoint");

  std::string script_path;
  bool serve = false;
  std::optional<uint16_t> port;
  auto* debug = app.add_subcommand("debug", "Run a debug script or serve the debug protocol");
  debug->add_option("trace", trace_path, "Trace file")->required();
  auto* script_opt = debug->add_option("--script", script_path, "Line-oriented command script");
  auto* serve_flag = debug->add_flag("--serve", serve, "Serve the debug protocol on localhost");
  debug->add_option("--port", port, "Protocol port (0 picks a free one)");
  script_opt->excludes(serve_flag);
  debug->footer(debug_script_help());

  std::string what;
  auto* dump = app.add_subcommand("dump", "Print trace contents");
  dump->add_option("trace", trace_path, "Trace file")->required();
  dump->add_option("--what", what, "log | checkpoints | audit | dom@K")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Config cfg = load_config(std::filesystem::current_path());
    Paint paint{use_color(cfg, no_color)};
    if (record->parsed()) return cmd_record(rec, cfg, out);
    if (verify->parsed()) return cmd_verify(trace_path, all_checkpoints, paint, out);
    if (debug->parsed()) {
      if (serve) return cmd_serve(trace_path, port.value_or(cfg.port), out);
      if (script_path.empty()) {
        err << "debug: one of --script or --serve is required\n";
        return kExitUsage;
      }
      return cmd_debug_script(trace_path, script_path, out, err);
    }
    if (dump->parsed()) return cmd_dump(trace_path, what, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const replay::DivergenceError& e) {
    err << "divergence: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ttd::cli
