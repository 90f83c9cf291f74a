#include "ttd/replay/verify.hpp"

#include <memory>

#include "ttd/host/canonical.hpp"
#include "ttd/lang/program.hpp"
#include "ttd/record/binary_io.hpp"
#include "ttd/replay/replay_session.hpp"

namespace ttd::replay {

namespace {

DivergenceReport mismatch(uint32_t event, std::string expected, std::string observed) {
  DivergenceReport r;
  r.kind = DivergenceKind::StateMismatch;
  r.event_index = event;
  r.expected = std::move(expected);
  r.observed = std::move(observed);
  return r;
}

// First differing line of two dumps, for a readable report.
std::pair<std::string, std::string> first_difference(const std::string& a, const std::string& b) {
  size_t i = 0;
  while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
  size_t start = a.rfind('\n', i == 0 ? 0 : i - 1);
  start = start == std::string::npos ? 0 : start + 1;
  auto line = [&](const std::string& s) {
    if (start >= s.size()) return std::string("<end>");
    size_t end = s.find('\n', start);
    return s.substr(start, end == std::string::npos ? std::string::npos : end - start);
  };
  return {line(a), line(b)};
}

void replay_from(ReplaySession& session, size_t checkpoint, const record::Trace& trace,
                 bool compare_checkpoints, VerifyResult& result) {
  session.start(checkpoint);
  ++result.replays;
  size_t next_cp = checkpoint + 1;
  while (!session.finished()) {
    if (compare_checkpoints && next_cp < trace.checkpoints.size() &&
        trace.checkpoints[next_cp].event_index == session.next_event()) {
      const record::Checkpoint& want = trace.checkpoints[next_cp];
      record::Checkpoint got = session.capture_checkpoint();
      if (!(got == want))
        throw DivergenceError(mismatch(want.event_index,
                                       "checkpoint " + std::to_string(next_cp) + " as recorded",
                                       "different checkpoint state"));
      ++result.checkpoints_compared;
      ++next_cp;
    }
    session.replay_event();
  }
  session.run_to_end();
  std::string dump = host::canonical_dump(session.world(), session.program(), session.heap());
  if (dump != trace.audit.final_dump) {
    auto [want, got] = first_difference(trace.audit.final_dump, dump);
    throw DivergenceError(mismatch(trace.event_count, "final state '" + want + "'", "'" + got + "'"));
  }
}

}  // namespace

VerifyResult verify_replay(const record::Trace& trace, const VerifyOptions& options) {
  VerifyResult result;
  auto shared = std::make_shared<const record::Trace>(trace);
  try {
    if (trace.checkpoints.empty()) throw record::IntegrityError("trace has no checkpoints");
    ReplaySession session(shared);
    replay_from(session, 0, trace, options.all_checkpoints, result);
    if (options.all_checkpoints)
      for (size_t i = 1; i < trace.checkpoints.size(); ++i)
        replay_from(session, i, trace, false, result);
  } catch (const DivergenceError& e) {
    result.divergence = e.report();
  } catch (const std::exception& e) {
    result.divergence = mismatch(0, "replayable trace", e.what());
  }
  return result;
}

}  // namespace ttd::replay
