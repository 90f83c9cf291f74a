#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ttd/lang/value.hpp"

namespace ttd::lang {

enum class ObjectKind : uint8_t { Plain = 0, Array = 1, Closure = 2, Env = 3 };

// One heap record. Plain objects and environments use `props` (insertion
// ordered); arrays use `elements`; closures use `function` + `parent` (the
// captured environment); environments link to their enclosing scope through
// `parent`.
struct HeapObject {
  ObjectKind kind = ObjectKind::Plain;
  std::vector<std::pair<std::string, Value>> props;
  std::vector<Value> elements;
  FunctionId function = kNone;
  ObjectId parent = kNone;

  const Value* find(std::string_view name) const;
  Value* find(std::string_view name);
  void set(std::string_view name, Value v);
  bool erase(std::string_view name);
};

// Arena heap. Objects are never freed while a session runs; checkpoints
// serialize only what is reachable from roots, so a restored heap is compact.
class Heap {
 public:
  Heap();

  ObjectId allocate(ObjectKind kind);
  ObjectId make_closure(FunctionId fn, ObjectId env);
  ObjectId make_env(ObjectId parent);

  HeapObject& at(ObjectId id);
  const HeapObject& at(ObjectId id) const;
  size_t size() const { return objects_.size(); }

  ObjectId globals() const { return globals_; }
  void set_globals(ObjectId id) { globals_ = id; }

  // Drops every object; used by restore before rebuilding.
  void reset(size_t capacity);

  bool is_closure(const Value& v) const;

 private:
  std::vector<HeapObject> objects_;
  ObjectId globals_ = kNone;
};

}  // namespace ttd::lang
