#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "ttd/lang/value.hpp"

namespace ttd::lang {

class Heap;

enum class HostCallKind : uint8_t {
  Random,
  DateNow,
  SetTimeout,
  SetInterval,
  ClearTimer,
  CreateElement,
  AppendChild,
  RemoveChild,
  SetAttribute,
  GetAttribute,
  QueryNode,
  AddEventListener,
  RemoveEventListener,
  XhrOpen,
  XhrSend,
  XhrStatus,
  XhrResponse,
  StorageGet,
  StorageSet,
  StorageRemove,
  ConsoleLog,
};

inline constexpr int kHostCallKindCount = 21;

// Guest spelling, e.g. "random" for `host.random()`.
std::string_view host_call_name(HostCallKind kind);
std::optional<HostCallKind> host_call_from_name(std::string_view name);

// Everything the interpreter needs from the embedding for `host.*` calls.
class HostCallHandler {
 public:
  virtual ~HostCallHandler() = default;
  virtual Value host_call(HostCallKind kind, std::span<const Value> args,
                          Heap& heap) = 0;
};

}  // namespace ttd::lang
