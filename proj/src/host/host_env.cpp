#include "ttd/host/host_env.hpp"

#include <algorithm>
#include <cmath>

#include "ttd/lang/heap.hpp"
#include "ttd/lang/interpreter.hpp"
#include "ttd/util/fnv.hpp"

namespace ttd::host {

using lang::GuestError;
using lang::HostKind;
using lang::HostRef;
using lang::Null;
using lang::ObjectRef;

bool is_logged_call(HostCallKind kind) {
  return kind == HostCallKind::DateNow || kind == HostCallKind::SetTimeout ||
         kind == HostCallKind::SetInterval;
}

namespace {

class Args {
 public:
  Args(std::span<const Value> args, const lang::Heap& heap) : args_(args), heap_(heap) {}

  const Value& at(size_t i) const {
    static const Value null = Null{};
    return i < args_.size() ? args_[i] : null;
  }
  double number(size_t i) const {
    const double* d = std::get_if<double>(&at(i));
    if (!d || !std::isfinite(*d)) fail(i, "a finite number");
    return *d;
  }
  const std::string& string(size_t i) const {
    const std::string* s = std::get_if<std::string>(&at(i));
    if (!s) fail(i, "a string");
    return *s;
  }
  const Value& function(size_t i) const {
    if (!heap_.is_closure(at(i))) fail(i, "a function");
    return at(i);
  }
  uint32_t node(size_t i, const HostWorld& w) const {
    const HostRef* h = std::get_if<HostRef>(&at(i));
    if (!h || h->kind != HostKind::Node) fail(i, "a node");
    if (!w.has_node(h->id)) throw HostError("unknown node " + std::to_string(h->id));
    return h->id;
  }
  NetRequest& request(size_t i, HostWorld& w) const {
    const HostRef* h = std::get_if<HostRef>(&at(i));
    if (!h || h->kind != HostKind::Request) fail(i, "a request");
    auto it = w.requests.find(h->id);
    if (it == w.requests.end()) throw HostError("unknown request " + std::to_string(h->id));
    return it->second;
  }
  size_t size() const { return args_.size(); }

 private:
  std::span<const Value> args_;
  const lang::Heap& heap_;

  [[noreturn]] void fail(size_t i, const char* what) const {
    throw HostError("argument " + std::to_string(i + 1) + " must be " + what + ", got " +
                    lang::type_name(at(i)));
  }
};

uint32_t to_id(double d) {
  if (d < 0 || d > 4294967295.0 || d != std::floor(d)) throw HostError("invalid id");
  return static_cast<uint32_t>(d);
}

}  // namespace

void HostEnv::reset_digest() {
  digest_ = Fnv1a::kOffset;
  calls_ = 0;
}

Value HostEnv::host_call(HostCallKind kind, std::span<const Value> args, lang::Heap& heap) {
  uint64_t interaction = ++world_->interactions;
  if (hooks_) hooks_->before_call(interaction, kind);
  Fnv1a h(digest_);
  h.add_u64(interaction);
  h.add_u64(static_cast<uint64_t>(kind));
  ++calls_;
  Value result;
  try {
    std::optional<Value> logged;
    result = dispatch(kind, args, heap, logged);
  } catch (const HostError& e) {
    std::string msg = std::string(lang::host_call_name(kind)) + ": " + e.what();
    h.add("!" + msg);
    digest_ = h.value();
    throw GuestError(msg);
  }
  h.add(lang::display_value(*program_, heap, result));
  digest_ = h.value();
  if (hooks_) hooks_->after_call(interaction, kind, result);
  return result;
}

Value HostEnv::dispatch(HostCallKind kind, std::span<const Value> raw, lang::Heap& heap,
                        std::optional<Value>& logged) {
  HostWorld& w = *world_;
  Args a(raw, heap);
  auto take_logged = [&]() {
    if (hooks_) logged = hooks_->logged_result(w.interactions, kind);
  };
  switch (kind) {
    case HostCallKind::Random:
      return w.prng.next_double();
    case HostCallKind::DateNow:
      take_logged();
      if (logged) return *logged;
      return static_cast<double>(w.now);
    case HostCallKind::SetTimeout:
    case HostCallKind::SetInterval: {
      const Value& f = a.function(0);
      double ms = a.size() > 1 ? a.number(1) : 0.0;
      take_logged();
      uint32_t id = w.next_timer_id;
      if (logged) {
        const double* d = std::get_if<double>(&*logged);
        if (!d) throw HostError("logged timer id is not a number");
        id = to_id(*d);
        if (w.timers.contains(id)) throw HostError("logged timer id already in use");
      }
      w.next_timer_id = std::max(w.next_timer_id, id + 1);
      Timer t;
      t.id = id;
      t.callback = f;
      int64_t delay = static_cast<int64_t>(std::max(0.0, std::floor(ms)));
      if (kind == HostCallKind::SetInterval) {
        t.period = std::max<int64_t>(1, delay);
        t.due = w.now + *t.period;
      } else {
        t.due = w.now + delay;
      }
      w.timers[id] = std::move(t);
      return static_cast<double>(id);
    }
    case HostCallKind::ClearTimer: {
      uint32_t id = to_id(a.number(0));
      if (w.timers.erase(id) == 0) throw HostError("unknown timer " + std::to_string(id));
      return Null{};
    }
    case HostCallKind::CreateElement:
      return HostRef{HostKind::Node, w.create_node(a.string(0))};
    case HostCallKind::AppendChild:
      w.append_child(a.node(0, w), a.node(1, w));
      return Null{};
    case HostCallKind::RemoveChild:
      w.remove_child(a.node(0, w), a.node(1, w));
      return Null{};
    case HostCallKind::SetAttribute: {
      uint32_t n = a.node(0, w);
      const std::string& name = a.string(1);
      const Value& v = a.at(2);
      if (name.size() > 2 && name.starts_with("on") &&
          (heap.is_closure(v) || lang::is_null(v))) {
        std::string type = name.substr(2);
        auto& ls = w.node(n).listeners;
        auto it = std::find_if(ls.begin(), ls.end(), [&](const Listener& l) {
          return l.property_style && l.type == type;
        });
        if (lang::is_null(v)) {
          if (it != ls.end()) ls.erase(it);
        } else if (it != ls.end()) {
          it->callback = v;
        } else {
          ls.push_back(Listener{type, v, true});
        }
        return Null{};
      }
      if (heap.is_closure(v) || std::holds_alternative<ObjectRef>(v) ||
          std::holds_alternative<HostRef>(v))
        throw HostError("attribute values must be scalars");
      w.apply_attribute(n, name, lang::display_value(*program_, heap, v));
      return Null{};
    }
    case HostCallKind::GetAttribute: {
      const std::string* v = w.node(a.node(0, w)).attribute(a.string(1));
      if (!v) return Null{};
      return *v;
    }
    case HostCallKind::QueryNode: {
      auto id = w.find_by_id(a.string(0));
      if (!id) return Null{};
      return HostRef{HostKind::Node, *id};
    }
    case HostCallKind::AddEventListener: {
      uint32_t n = a.node(0, w);
      const std::string& type = a.string(1);
      w.node(n).listeners.push_back(Listener{type, a.function(2), false});
      return Null{};
    }
    case HostCallKind::RemoveEventListener: {
      uint32_t n = a.node(0, w);
      const std::string& type = a.string(1);
      const Value& f = a.function(2);
      auto& ls = w.node(n).listeners;
      auto it = std::find_if(ls.begin(), ls.end(), [&](const Listener& l) {
        return !l.property_style && l.type == type && l.callback == f;
      });
      if (it == ls.end()) return false;
      ls.erase(it);
      return true;
    }
    case HostCallKind::XhrOpen: {
      NetRequest r;
      r.id = w.next_request_id++;
      r.url = a.string(0);
      r.state = XhrState::Opened;
      uint32_t id = r.id;
      w.requests[id] = std::move(r);
      return HostRef{HostKind::Request, id};
    }
    case HostCallKind::XhrSend: {
      NetRequest& r = a.request(0, w);
      const Value& cb = a.at(1);
      if (!lang::is_null(cb)) a.function(1);
      if (r.state != XhrState::Opened || r.sent) throw HostError("request already sent");
      r.sent = true;
      r.sent_at = w.now;
      r.callback = cb;
      return Null{};
    }
    case HostCallKind::XhrStatus: {
      const NetRequest& r = a.request(0, w);
      lang::ObjectId o = heap.allocate(lang::ObjectKind::Plain);
      heap.at(o).set("readyState", static_cast<double>(r.state));
      heap.at(o).set("status", static_cast<double>(r.status));
      heap.at(o).set("received", static_cast<double>(r.received));
      return ObjectRef{o};
    }
    case HostCallKind::XhrResponse: {
      const NetRequest& r = a.request(0, w);
      if (r.state < XhrState::Loading) return Null{};
      return r.response.substr(0, r.received);
    }
    case HostCallKind::StorageGet: {
      auto v = w.storage_get(a.string(0));
      if (!v) return Null{};
      return *v;
    }
    case HostCallKind::StorageSet: {
      const Value& v = a.at(1);
      if (std::holds_alternative<ObjectRef>(v) || std::holds_alternative<HostRef>(v))
        throw HostError("storage values must be scalars");
      w.storage_set(a.string(0), lang::display_value(*program_, heap, v));
      return Null{};
    }
    case HostCallKind::StorageRemove:
      return w.storage_remove(a.string(0));
    case HostCallKind::ConsoleLog: {
      std::string line;
      for (size_t i = 0; i < a.size(); ++i) {
        if (i) line += ' ';
        line += lang::display_value(*program_, heap, a.at(i));
      }
      w.console.push_back(std::move(line));
      return Null{};
    }
  }
  throw lang::EngineFault("unknown host call kind");
}

}  // namespace ttd::host
