#include "ttd/host/scheduler.hpp"

#include <algorithm>
#include <array>

namespace ttd::host {

Scheduler::Scheduler(const Scenario& scenario, HostWorld& world)
    : scenario_(&scenario), world_(&world), rng_(scenario.seed) {
  for (const ParserStream& p : world.parsers) markup_.push_back(parse_markup(p.markup));
  missing_.status = 404;
  missing_.headers_ms = 5;
  missing_.chunks.emplace_back(6, 0);
}

uint64_t Scheduler::uniform(uint64_t lo, uint64_t hi) { return lo + rng_() % (hi - lo + 1); }

void Scheduler::apply(HostUpdate u, std::vector<HostUpdate>& out) {
  apply_update(*world_, u);
  out.push_back(std::move(u));
}

bool Scheduler::quiescent() const {
  const HostWorld& w = *world_;
  if (next_input_ < scenario_->inputs.size() || !deferred_.empty() || !w.timers.empty())
    return false;
  for (const ParserStream& p : w.parsers)
    if (p.consumed < p.markup.size()) return false;
  for (const auto& [_, a] : w.animations)
    if (a.active) return false;
  for (const DomNode& n : w.nodes)
    if (n.resource && n.resource->state == ExternalResource::State::Pending) return false;
  for (const auto& [id, r] : w.requests) {
    if (!r.sent) continue;
    auto it = net_.find(id);
    if (it == net_.end() || it->second.stage != XhrState::Done) return false;
  }
  return true;
}

std::vector<HostUpdate> Scheduler::advance() {
  std::vector<HostUpdate> out;
  apply(ClockAdvance{world_->now + static_cast<int64_t>(uniform(1, scenario_->max_step_ms))}, out);
  tick(out);
  return out;
}

bool Scheduler::roll_concurrency() {
  if (scenario_->concurrency <= 0) return false;
  double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return u < scenario_->concurrency;
}

std::vector<HostUpdate> Scheduler::concurrent_tick() {
  std::vector<HostUpdate> out;
  apply(ClockAdvance{world_->now + static_cast<int64_t>(uniform(1, 3))}, out);
  tick(out);
  return out;
}

std::vector<HostUpdate> Scheduler::take_deferred() {
  std::vector<HostUpdate> out;
  for (HostUpdate& u : deferred_) apply(std::move(u), out);
  deferred_.clear();
  return out;
}

void Scheduler::tick(std::vector<HostUpdate>& out) {
  // The per-tick process order is itself nondeterministic; this is what
  // makes same-tick effects race.
  std::array<int, 6> order{0, 1, 2, 3, 4, 5};
  std::shuffle(order.begin(), order.end(), rng_);
  for (int p : order) {
    switch (p) {
      case 0: run_inputs(out); break;
      case 1: run_timers(out); break;
      case 2: run_animations(out); break;
      case 3: run_parsers(out); break;
      case 4: run_resources(out); break;
      case 5: run_network(); break;
    }
  }
}

void Scheduler::run_inputs(std::vector<HostUpdate>& out) {
  const auto& inputs = scenario_->inputs;
  while (next_input_ < inputs.size() && inputs[next_input_].at <= world_->now) {
    const ScriptedInput& in = inputs[next_input_++];
    auto target = world_->find_by_id(in.target);
    if (!target) continue;  // element not present (yet): the input is lost
    EventDescriptor d;
    d.kind = in.kind;
    d.type = in.type;
    d.target = *target;
    d.payload = in.payload;
    apply(EventEnqueued{std::move(d)}, out);
  }
}

void Scheduler::run_timers(std::vector<HostUpdate>& out) {
  std::vector<uint32_t> due;
  for (const auto& [id, t] : world_->timers)
    if (!t.fired && t.due <= world_->now) due.push_back(id);
  for (uint32_t id : due) apply(TimerFire{id}, out);
}

void Scheduler::run_animations(std::vector<HostUpdate>& out) {
  std::vector<AnimationAdvance> ups;
  for (const auto& [node, a] : world_->animations) {
    if (!a.active || world_->now < a.started_at) continue;
    uint64_t target = static_cast<uint64_t>(world_->now - a.started_at) / a.period;
    if (target > a.frame_count) ups.push_back(AnimationAdvance{node, target});
  }
  for (AnimationAdvance& u : ups) apply(u, out);
}

void Scheduler::run_parsers(std::vector<HostUpdate>& out) {
  for (size_t i = 0; i < world_->parsers.size(); ++i) {
    const ParserStream& p = world_->parsers[i];
    if (p.consumed >= p.markup.size()) continue;
    uint64_t step = uniform(scenario_->parse_chunk_min, scenario_->parse_chunk_max);
    uint64_t offset = std::min<uint64_t>(p.markup.size(), p.consumed + step);
    uint32_t emitted = 0;
    for (const MarkupElement& e : markup_[i])
      if (e.ready_at <= offset) ++emitted;
    apply(ParseAdvance{static_cast<uint32_t>(i), offset, emitted}, out);
  }
}

void Scheduler::run_resources(std::vector<HostUpdate>& out) {
  std::vector<ResourceLoaded> ups;
  for (const DomNode& n : world_->nodes) {
    if (!n.resource || n.resource->state != ExternalResource::State::Pending) continue;
    auto it = scenario_->resources.find(n.resource->url);
    int64_t delay = it == scenario_->resources.end() ? 10 : it->second.delay_ms;
    if (world_->now < n.resource->requested_at + delay) continue;
    ResourceLoaded u;
    u.node = n.id;
    u.ok = it != scenario_->resources.end();
    if (u.ok) {
      u.width = it->second.width;
      u.height = it->second.height;
      u.bytes = it->second.bytes;
    }
    ups.push_back(u);
  }
  for (ResourceLoaded& u : ups) apply(u, out);
}

// Network transitions are only scheduled here; they take effect between
// events through take_deferred().
void Scheduler::run_network() {
  for (const auto& [id, r] : world_->requests) {
    if (!r.sent) continue;
    NetProgress& p = net_[id];
    if (p.stage == XhrState::Done) continue;
    auto it = scenario_->responses.find(r.url);
    const ScriptedResponse& resp = it == scenario_->responses.end() ? missing_ : it->second;
    int64_t elapsed = world_->now - r.sent_at;
    XhrTransition t;
    t.request = id;
    if (p.stage == XhrState::Opened) {
      if (elapsed < resp.headers_ms) continue;
      t.state = p.stage = XhrState::HeadersReceived;
      t.status = resp.status;
      t.body = resp.body;
    } else if (p.next_chunk < resp.chunks.size()) {
      if (elapsed < resp.chunks[p.next_chunk].first) continue;
      // An empty chunk after the first one carries no progress.
      if (p.stage == XhrState::Loading && resp.chunks[p.next_chunk].second == 0) {
        ++p.next_chunk;
        continue;
      }
      p.bytes += resp.chunks[p.next_chunk++].second;
      t.state = p.stage = XhrState::Loading;
      t.status = resp.status;
      t.bytes = p.bytes;
    } else {
      t.state = p.stage = XhrState::Done;
      t.status = resp.status;
      t.bytes = p.bytes;
    }
    deferred_.push_back(std::move(t));
  }
}

}  // namespace ttd::host
