#include "ttd/lang/host_call.hpp"

#include <array>

namespace ttd::lang {

namespace {

constexpr std::array<std::string_view, kHostCallKindCount> kNames = {
    "random",        "dateNow",      "setTimeout",          "setInterval", "clearTimer",
    "createElement", "appendChild",  "removeChild",         "setAttribute", "getAttribute",
    "queryNode",     "addEventListener", "removeEventListener", "xhrOpen",   "xhrSend",
    "xhrStatus",     "xhrResponse",  "storageGet",          "storageSet",  "storageRemove",
    "log",
};

}  // namespace

std::string_view host_call_name(HostCallKind kind) {
  return kNames.at(static_cast<size_t>(kind));
}

std::optional<HostCallKind> host_call_from_name(std::string_view name) {
  for (size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<HostCallKind>(i);
  return std::nullopt;
}

}  // namespace ttd::lang
