#include "ttd/host/scenario.hpp"

#include <algorithm>
#include <json.hpp>

#include "ttd/util/fnv.hpp"

namespace ttd::host {

using nlohmann::json;

namespace {

PlainValue plain_from_json(const json& j) {
  if (j.is_null()) return lang::Null{};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ScenarioError("payload values must be scalars");
}

json plain_to_json(const PlainValue& v) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, lang::Null>)
          return nullptr;
        else
          return x;
      },
      v);
}

void normalize(ScriptedResponse& r) {
  uint64_t total = r.body.size();
  if (r.chunks.empty()) r.chunks.emplace_back(r.headers_ms + 1, total);
  std::stable_sort(r.chunks.begin(), r.chunks.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  uint64_t sum = 0;
  for (auto& [ms, bytes] : r.chunks) {
    ms = std::max(ms, r.headers_ms);
    bytes = std::min(bytes, total - sum);
    sum += bytes;
  }
  if (sum < total) r.chunks.back().second += total - sum;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object()) throw ScenarioError("scenario must be a JSON object");
    Scenario s;
    s.version = get_or<uint32_t>(j, "version", 0);
    if (s.version != 1) throw ScenarioError("unsupported scenario version " + std::to_string(s.version));
    s.seed = get_or<uint64_t>(j, "seed", s.seed);
    s.prng_seed = get_or<uint64_t>(j, "prng_seed", s.prng_seed);
    s.duration_ms = get_or<int64_t>(j, "duration_ms", s.duration_ms);
    s.max_step_ms = get_or<int64_t>(j, "max_step_ms", s.max_step_ms);
    s.concurrency = get_or<double>(j, "concurrency", s.concurrency);
    if (auto it = j.find("parse_chunk"); it != j.end()) {
      s.parse_chunk_min = it->at(0).get<uint32_t>();
      s.parse_chunk_max = it->at(1).get<uint32_t>();
    }
    if (s.duration_ms < 0) throw ScenarioError("duration_ms must be >= 0");
    if (s.max_step_ms < 1) throw ScenarioError("max_step_ms must be >= 1");
    if (s.concurrency < 0 || s.concurrency > 1) throw ScenarioError("concurrency must be in [0,1]");
    if (s.parse_chunk_min < 1 || s.parse_chunk_max < s.parse_chunk_min)
      throw ScenarioError("parse_chunk must be [min,max] with 1 <= min <= max");
    s.documents = get_or<std::vector<std::string>>(j, "documents", {});
    for (const std::string& d : s.documents) {
      try {
        make_initial_world({d}, 1);
      } catch (const HostError& e) {
        throw ScenarioError(std::string("bad document markup: ") + e.what());
      }
    }
    if (auto it = j.find("inputs"); it != j.end()) {
      for (const json& in : *it) {
        ScriptedInput si;
        si.at = in.at("at").get<int64_t>();
        si.type = in.at("type").get<std::string>();
        si.target = in.at("target").get<std::string>();
        std::string kind = get_or<std::string>(in, "kind", "user-input");
        if (kind == "user-input")
          si.kind = EventKind::UserInput;
        else if (kind == "custom")
          si.kind = EventKind::Custom;
        else
          throw ScenarioError("input kind must be user-input or custom");
        if (auto p = in.find("payload"); p != in.end()) {
          if (!p->is_object()) throw ScenarioError("payload must be an object");
          for (auto& [k, v] : p->items()) si.payload.emplace_back(k, plain_from_json(v));
        }
        s.inputs.push_back(std::move(si));
      }
      std::stable_sort(s.inputs.begin(), s.inputs.end(),
                       [](const auto& a, const auto& b) { return a.at < b.at; });
    }
    if (auto it = j.find("responses"); it != j.end()) {
      for (auto& [url, r] : it->items()) {
        ScriptedResponse sr;
        sr.status = get_or<uint32_t>(r, "status", sr.status);
        sr.body = get_or<std::string>(r, "body", "");
        sr.headers_ms = get_or<int64_t>(r, "headers_ms", sr.headers_ms);
        if (auto c = r.find("chunks"); c != r.end())
          for (const json& ch : *c) sr.chunks.emplace_back(ch.at(0).get<int64_t>(), ch.at(1).get<uint64_t>());
        normalize(sr);
        s.responses[url] = std::move(sr);
      }
    }
    if (auto it = j.find("resources"); it != j.end()) {
      for (auto& [url, r] : it->items()) {
        ScriptedResource res;
        res.delay_ms = get_or<int64_t>(r, "delay_ms", res.delay_ms);
        res.width = get_or<uint32_t>(r, "width", 0);
        res.height = get_or<uint32_t>(r, "height", 0);
        res.bytes = get_or<uint32_t>(r, "bytes", 0);
        s.resources[url] = res;
      }
    }
    return s;
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("malformed scenario: ") + e.what());
  }
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["version"] = s.version;
  j["seed"] = s.seed;
  j["prng_seed"] = s.prng_seed;
  j["duration_ms"] = s.duration_ms;
  j["max_step_ms"] = s.max_step_ms;
  j["concurrency"] = s.concurrency;
  j["parse_chunk"] = {s.parse_chunk_min, s.parse_chunk_max};
  j["documents"] = s.documents;
  json inputs = json::array();
  for (const ScriptedInput& in : s.inputs) {
    json p = json::object();
    for (const auto& [k, v] : in.payload) p[k] = plain_to_json(v);
    inputs.push_back({{"at", in.at},
                      {"type", in.type},
                      {"target", in.target},
                      {"kind", in.kind == EventKind::Custom ? "custom" : "user-input"},
                      {"payload", p}});
  }
  j["inputs"] = inputs;
  json responses = json::object();
  for (const auto& [url, r] : s.responses) {
    json chunks = json::array();
    for (const auto& [ms, bytes] : r.chunks) chunks.push_back({ms, bytes});
    responses[url] = {{"status", r.status}, {"body", r.body}, {"headers_ms", r.headers_ms}, {"chunks", chunks}};
  }
  j["responses"] = responses;
  json resources = json::object();
  for (const auto& [url, r] : s.resources)
    resources[url] = {{"delay_ms", r.delay_ms}, {"width", r.width}, {"height", r.height}, {"bytes", r.bytes}};
  j["resources"] = resources;
  return j.dump();
}

uint64_t scenario_hash(const Scenario& s) {
  Fnv1a h;
  h.add(scenario_to_json(s));
  return h.value();
}

}  // namespace ttd::host
