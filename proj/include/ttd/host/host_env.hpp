#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "ttd/host/world.hpp"
#include "ttd/lang/host_call.hpp"
#include "ttd/lang/program.hpp"
#include "ttd/util/fnv.hpp"

namespace ttd::host {

using lang::HostCallKind;

// Calls whose return values are written to the log as simple entries.
bool is_logged_call(HostCallKind kind);

// Interposition points around every synchronous host call. The recorder and
// the replayer each implement one.
class InteractionHooks {
 public:
  virtual ~InteractionHooks() = default;
  // After the interaction counter is incremented, before the call's effect.
  virtual void before_call(uint64_t interaction, HostCallKind kind) = 0;
  // Replay supplies logged results (date values, timer ids) here.
  virtual std::optional<Value> logged_result(uint64_t, HostCallKind) { return std::nullopt; }
  virtual void after_call(uint64_t interaction, HostCallKind kind, const Value& result) = 0;
};

// The guest's view of the host world. Failures surface as guest errors.
class HostEnv : public lang::HostCallHandler {
 public:
  HostEnv(HostWorld& world, const lang::Program& program) : world_(&world), program_(&program) {}

  void set_world(HostWorld& world) { world_ = &world; }
  HostWorld& world() { return *world_; }
  void set_hooks(InteractionHooks* hooks) { hooks_ = hooks; }

  Value host_call(HostCallKind kind, std::span<const Value> args, lang::Heap& heap) override;

  // Running FNV-1a digest of (interaction, kind, rendered result) since the
  // last reset; compared between recording and replay.
  uint64_t digest() const { return digest_; }
  uint64_t calls() const { return calls_; }
  void reset_digest();

 private:
  HostWorld* world_;
  const lang::Program* program_;
  InteractionHooks* hooks_ = nullptr;
  uint64_t digest_ = Fnv1a::kOffset;
  uint64_t calls_ = 0;

  Value dispatch(HostCallKind kind, std::span<const Value> args, lang::Heap& heap,
                 std::optional<Value>& logged);
};

}  // namespace ttd::host
