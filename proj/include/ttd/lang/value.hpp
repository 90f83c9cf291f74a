#pragma once

#include <string>
#include <variant>

#include "ttd/lang/types.hpp"

namespace ttd::lang {

enum class HostKind : uint8_t { Node = 1, Request = 2 };

struct Null {
  friend bool operator==(Null, Null) { return true; }
};

struct ObjectRef {
  ObjectId id = kNone;
  friend bool operator==(ObjectRef, ObjectRef) = default;
};

// Opaque handle into the host world. Equality is identity.
struct HostRef {
  HostKind kind = HostKind::Node;
  uint32_t id = 0;
  friend bool operator==(HostRef, HostRef) = default;
};

// Function references are ObjectRefs to closure objects.
using Value = std::variant<Null, bool, double, std::string, ObjectRef, HostRef>;

inline bool is_null(const Value& v) { return std::holds_alternative<Null>(v); }

bool truthy(const Value& v);
const char* type_name(const Value& v);

}  // namespace ttd::lang
