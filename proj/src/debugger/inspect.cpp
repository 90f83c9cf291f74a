#include "ttd/debugger/inspect.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <stdexcept>

namespace ttd::debugger {

using lang::Heap;
using lang::HeapObject;
using lang::ObjectKind;
using lang::ObjectRef;
using lang::Value;

namespace {

const char* kind_of(const Heap& heap, const Value& v) {
  if (auto* r = std::get_if<ObjectRef>(&v)) {
    switch (heap.at(r->id).kind) {
      case ObjectKind::Plain: return "object";
      case ObjectKind::Array: return "array";
      case ObjectKind::Closure: return "function";
      case ObjectKind::Env: return "scope";
    }
  }
  if (auto* h = std::get_if<lang::HostRef>(&v))
    return h->kind == lang::HostKind::Node ? "node" : "request";
  return lang::type_name(v);
}

size_t children_of(const Heap& heap, const Value& v) {
  auto* r = std::get_if<ObjectRef>(&v);
  if (!r) return 0;
  const HeapObject& o = heap.at(r->id);
  if (o.kind == ObjectKind::Array) return o.elements.size();
  if (o.kind == ObjectKind::Plain) return o.props.size();
  return 0;
}

VariableView view(const lang::Interpreter& in, std::string name, const Value& v) {
  VariableView out;
  out.name = std::move(name);
  out.type = kind_of(in.heap(), v);
  out.value = lang::display_value(in.program(), in.heap(), v);
  out.child_count = children_of(in.heap(), v);
  return out;
}

VariablePage page(std::vector<VariableView> all, size_t start, size_t count) {
  VariablePage p;
  p.total = all.size();
  p.start = std::min(start, all.size());
  count = std::min(count, kPageSize);
  size_t end = std::min(all.size(), p.start + count);
  p.items.assign(std::make_move_iterator(all.begin() + p.start),
                 std::make_move_iterator(all.begin() + end));
  return p;
}

std::vector<std::pair<std::string, Value>> scope_bindings(const lang::Interpreter& in,
                                                          size_t frame_index) {
  const auto& frames = in.frames();
  if (frame_index >= frames.size())
    throw std::out_of_range("no frame " + std::to_string(frame_index));
  const lang::Frame& f = frames[frames.size() - 1 - frame_index];
  const Heap& heap = in.heap();
  std::vector<std::pair<std::string, Value>> out;
  std::set<std::string, std::less<>> seen;
  for (lang::ObjectId e = f.env; e != lang::kNone && e != heap.globals(); e = heap.at(e).parent)
    for (const auto& [k, v] : heap.at(e).props)
      if (seen.insert(k).second) out.emplace_back(k, v);
  return out;
}

std::vector<VariableView> child_views(const lang::Interpreter& in, const Value& v) {
  std::vector<VariableView> out;
  auto* r = std::get_if<ObjectRef>(&v);
  if (!r) return out;
  const HeapObject& o = in.heap().at(r->id);
  if (o.kind == ObjectKind::Array)
    for (size_t i = 0; i < o.elements.size(); ++i)
      out.push_back(view(in, "[" + std::to_string(i) + "]", o.elements[i]));
  else if (o.kind == ObjectKind::Plain)
    for (const auto& [k, x] : o.props) out.push_back(view(in, k, x));
  return out;
}

struct PathCursor {
  std::string_view text;
  size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("bad path '" + std::string(text) + "': " + what);
  }
  std::string ident() {
    size_t b = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (b == pos) fail("expected a name at offset " + std::to_string(b));
    return std::string(text.substr(b, pos - b));
  }
  size_t index() {
    size_t b = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    size_t n = 0;
    if (b == pos || std::from_chars(text.data() + b, text.data() + pos, n).ec != std::errc())
      fail("expected an index at offset " + std::to_string(b));
    if (done() || text[pos] != ']') fail("missing ']'");
    ++pos;
    return n;
  }
};

std::optional<Value> find_binding(const std::vector<std::pair<std::string, Value>>& b,
                                  std::string_view name) {
  for (const auto& [k, v] : b)
    if (k == name) return v;
  return std::nullopt;
}

std::pair<std::string, Value> resolve(const lang::Interpreter& in, std::string_view path) {
  PathCursor c{path};
  const Heap& heap = in.heap();
  std::string root = c.ident();
  std::string label = root;
  Value cur;
  auto member = [&](const std::string& name) -> Value {
    auto* r = std::get_if<ObjectRef>(&cur);
    if (!r) c.fail("'" + label + "' has no members");
    const HeapObject& o = heap.at(r->id);
    if (o.kind != ObjectKind::Plain && o.kind != ObjectKind::Env)
      c.fail("'" + label + "' has no members");
    const Value* v = o.find(name);
    if (!v) c.fail("no member '" + name + "' in '" + label + "'");
    return *v;
  };

  std::optional<size_t> frame;
  if (root == "globals") {
    cur = ObjectRef{heap.globals()};
  } else if (root == "locals") {
    frame = 0;
  } else if (root.size() > 5 && root.starts_with("frame") &&
             std::all_of(root.begin() + 5, root.end(), [](char ch) { return std::isdigit(ch); })) {
    frame = std::stoul(root.substr(5));
  } else {
    std::optional<Value> v;
    if (!in.idle()) v = find_binding(scope_bindings(in, 0), root);
    if (!v) {
      const Value* g = heap.at(heap.globals()).find(root);
      if (!g) c.fail("unknown name '" + root + "'");
      v = *g;
    }
    cur = *v;
  }
  if (frame) {
    if (c.done()) c.fail("a frame path needs a variable name");
    if (c.text[c.pos] != '.') c.fail("expected '.' after '" + root + "'");
    ++c.pos;
    std::string name = c.ident();
    auto v = find_binding(scope_bindings(in, *frame), name);
    if (!v) c.fail("no variable '" + name + "' in frame " + std::to_string(*frame));
    cur = *v;
    label = name;
  }
  while (!c.done()) {
    char ch = c.text[c.pos++];
    if (ch == '.') {
      std::string name = c.ident();
      cur = member(name);
      label = name;
    } else if (ch == '[') {
      size_t i = c.index();
      auto* r = std::get_if<ObjectRef>(&cur);
      if (!r || heap.at(r->id).kind != ObjectKind::Array) c.fail("'" + label + "' is not an array");
      const auto& el = heap.at(r->id).elements;
      if (i >= el.size()) c.fail("index " + std::to_string(i) + " out of range");
      cur = el[i];
      label = "[" + std::to_string(i) + "]";
    } else {
      c.fail(std::string("unexpected '") + ch + "'");
    }
  }
  return {label, cur};
}

}  // namespace

std::vector<FrameView> stack_frames(const lang::Interpreter& interp) {
  std::vector<FrameView> out;
  const auto& frames = interp.frames();
  const lang::Program& p = interp.program();
  for (size_t i = 0; i < frames.size(); ++i) {
    const lang::Frame& f = frames[frames.size() - 1 - i];
    const lang::FunctionDef& def = p.function(f.function);
    FrameView v;
    v.index = i;
    v.function = def.name.empty() ? p.scripts().at(def.script_id).name : def.name;
    lang::StmtId at = i == 0 ? interp.current_stmt() : f.pending_call;
    if (at != lang::kNone) v.location = p.stmt(at).loc;
    if (interp.monitors_enabled()) v.time = f.time;
    out.push_back(std::move(v));
  }
  return out;
}

VariablePage frame_variables(const lang::Interpreter& interp, size_t frame_index, size_t start,
                             size_t count) {
  std::vector<VariableView> all;
  for (auto& [k, v] : scope_bindings(interp, frame_index)) all.push_back(view(interp, k, v));
  return page(std::move(all), start, count);
}

VariablePage global_variables(const lang::Interpreter& interp, size_t start, size_t count) {
  std::vector<VariableView> all;
  const Heap& heap = interp.heap();
  for (const auto& [k, v] : heap.at(heap.globals()).props) all.push_back(view(interp, k, v));
  return page(std::move(all), start, count);
}

VariableView inspect_path(const lang::Interpreter& interp, std::string_view path) {
  auto [label, v] = resolve(interp, path);
  return view(interp, label, v);
}

VariablePage path_children(const lang::Interpreter& interp, std::string_view path, size_t start,
                           size_t count) {
  auto [label, v] = resolve(interp, path);
  if (label == "globals" && path == "globals") return global_variables(interp, start, count);
  return page(child_views(interp, v), start, count);
}

}  // namespace ttd::debugger
