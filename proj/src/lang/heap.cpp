#include "ttd/lang/heap.hpp"

namespace ttd::lang {

const Value* HeapObject::find(std::string_view name) const {
  for (auto& [k, v] : props)
    if (k == name) return &v;
  return nullptr;
}

Value* HeapObject::find(std::string_view name) {
  for (auto& [k, v] : props)
    if (k == name) return &v;
  return nullptr;
}

void HeapObject::set(std::string_view name, Value v) {
  if (Value* slot = find(name)) {
    *slot = std::move(v);
    return;
  }
  props.emplace_back(std::string(name), std::move(v));
}

bool HeapObject::erase(std::string_view name) {
  for (auto it = props.begin(); it != props.end(); ++it) {
    if (it->first == name) {
      props.erase(it);
      return true;
    }
  }
  return false;
}

Heap::Heap() { globals_ = make_env(kNone); }

ObjectId Heap::allocate(ObjectKind kind) {
  HeapObject o;
  o.kind = kind;
  objects_.push_back(std::move(o));
  return static_cast<ObjectId>(objects_.size() - 1);
}

ObjectId Heap::make_closure(FunctionId fn, ObjectId env) {
  ObjectId id = allocate(ObjectKind::Closure);
  objects_[id].function = fn;
  objects_[id].parent = env;
  return id;
}

ObjectId Heap::make_env(ObjectId parent) {
  ObjectId id = allocate(ObjectKind::Env);
  objects_[id].parent = parent;
  return id;
}

HeapObject& Heap::at(ObjectId id) {
  if (id >= objects_.size()) throw EngineFault("dangling object reference");
  return objects_[id];
}

const HeapObject& Heap::at(ObjectId id) const {
  if (id >= objects_.size()) throw EngineFault("dangling object reference");
  return objects_[id];
}

void Heap::reset(size_t capacity) {
  objects_.clear();
  objects_.reserve(capacity);
  globals_ = kNone;
}

bool Heap::is_closure(const Value& v) const {
  auto* r = std::get_if<ObjectRef>(&v);
  return r && r->id < objects_.size() && objects_[r->id].kind == ObjectKind::Closure;
}

}  // namespace ttd::lang
