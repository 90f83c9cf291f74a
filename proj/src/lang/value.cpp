#include "ttd/lang/value.hpp"

namespace ttd::lang {

bool truthy(const Value& v) {
  struct Visitor {
    bool operator()(Null) const { return false; }
    bool operator()(bool b) const { return b; }
    bool operator()(double d) const { return d != 0 && d == d; }
    bool operator()(const std::string& s) const { return !s.empty(); }
    bool operator()(ObjectRef) const { return true; }
    bool operator()(HostRef) const { return true; }
  };
  return std::visit(Visitor{}, v);
}

const char* type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "null";
    case 1: return "boolean";
    case 2: return "number";
    case 3: return "string";
    case 4: return "object";
    default: return "host";
  }
}

}  // namespace ttd::lang
