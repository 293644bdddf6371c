#include "qgen/backend/protocol.hpp"

#include "qgen/common/hash.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <random>

namespace qgen::backend {

std::string_view to_string(Op op) {
  switch (op) {
    case Op::qa: return "qa";
    case Op::distractors: return "distractors";
    case Op::boolq: return "boolq";
    case Op::classify: return "classify";
    case Op::vqg: return "vqg";
    case Op::embed: return "embed";
    case Op::transcribe: return "transcribe";
    case Op::reward: return "reward";
  }
  return "qa";
}

Op op_from_string(std::string_view name) {
  for (Op op : kAllOps) {
    if (to_string(op) == name) return op;
  }
  throw ProtocolError("unknown op '" + std::string(name) + "'");
}

std::string new_request_id() {
  static std::atomic<std::uint64_t> counter{0};
  static const std::uint64_t salt = std::random_device{}();
  const auto now = std::chrono::steady_clock::now().time_since_epoch().count();
  const std::string parts = std::to_string(salt) + ":" + std::to_string(now) + ":" +
                            std::to_string(counter.fetch_add(1));
  return "req-" + content_id({parts}).substr(0, 20);
}

Envelope make_envelope(Op op, json payload) {
  Envelope env;
  env.op = op;
  env.payload = std::move(payload);
  env.request_id = new_request_id();
  return env;
}

std::string encode(const Envelope& env) {
  json j;
  j["op"] = to_string(env.op);
  j["payload"] = env.payload;
  j["request_id"] = env.request_id;
  j["version"] = env.version;
  return j.dump();
}

Envelope decode(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("envelope is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("envelope must be a JSON object");
  for (const char* key : {"op", "version", "request_id"}) {
    if (!j.contains(key) || !j[key].is_string()) {
      throw ProtocolError(std::string("envelope field '") + key + "' must be a string");
    }
  }
  if (!j.contains("payload") || !j["payload"].is_object()) {
    throw ProtocolError("envelope field 'payload' must be an object");
  }
  Envelope env;
  env.op = op_from_string(j["op"].get<std::string>());
  env.version = j["version"].get<std::string>();
  if (env.version != kProtocolVersion) throw ProtocolError("unsupported version '" + env.version + "'");
  env.request_id = j["request_id"].get<std::string>();
  env.payload = j["payload"];
  return env;
}

namespace {

void need_string(const json& p, const char* field) {
  if (!p.contains(field) || !p[field].is_string()) {
    throw ProtocolError(std::string("request field '") + field + "' must be a string");
  }
}

void need_image(const json& p) {
  const bool ref = p.contains("image_ref") && p["image_ref"].is_string();
  const bool b64 = p.contains("image_b64") && p["image_b64"].is_string();
  if (!ref && !b64) throw ProtocolError("request needs 'image_ref' or 'image_b64'");
}

void optional_variant(const json& p) {
  if (p.contains("variant") && !(p["variant"].is_number_integer() && p["variant"].get<long>() >= 0)) {
    throw ProtocolError("request field 'variant' must be a non-negative integer");
  }
}

struct ResponseCheck {
  const std::string op;
  const json& body;

  [[noreturn]] void fail(const std::string& field, const std::string& why) const {
    throw MalformedResponse(op, field, why);
  }
  const json& field(const char* name) const {
    if (!body.contains(name)) fail(name, "is missing");
    return body[name];
  }
  std::string string_field(const char* name) const {
    const json& v = field(name);
    if (!v.is_string()) fail(name, "must be a string");
    return v.get<std::string>();
  }
  double number_field(const char* name) const {
    const json& v = field(name);
    if (!v.is_number() || !std::isfinite(v.get<double>())) fail(name, "must be a finite number");
    return v.get<double>();
  }
};

}  // namespace

void validate_request(Op op, const json& p) {
  if (!p.is_object()) throw ProtocolError("payload must be a JSON object");
  switch (op) {
    case Op::qa:
      need_string(p, "context");
      optional_variant(p);
      break;
    case Op::distractors:
      need_string(p, "context");
      need_string(p, "question");
      need_string(p, "answer");
      if (!p.contains("n") || !p["n"].is_number_integer() || p["n"].get<long>() < 1 ||
          p["n"].get<long>() > 64) {
        throw ProtocolError("request field 'n' must be an integer in [1, 64]");
      }
      break;
    case Op::boolq:
      need_string(p, "context");
      optional_variant(p);
      break;
    case Op::classify:
      need_image(p);
      break;
    case Op::vqg: {
      need_image(p);
      need_string(p, "mode");
      const std::string mode = p["mode"].get<std::string>();
      if (mode != "describe" && mode != "ask" && mode != "answer") {
        throw ProtocolError("request field 'mode' must be describe, ask or answer");
      }
      if (mode == "answer") need_string(p, "question");
      if (p.contains("prompt") && !p["prompt"].is_string()) {
        throw ProtocolError("request field 'prompt' must be a string");
      }
      break;
    }
    case Op::embed:
      if (!p.contains("texts") || !p["texts"].is_array()) {
        throw ProtocolError("request field 'texts' must be an array of strings");
      }
      for (const auto& t : p["texts"]) {
        if (!t.is_string()) throw ProtocolError("request field 'texts' must be an array of strings");
      }
      break;
    case Op::transcribe:
      need_string(p, "audio_ref");
      break;
    case Op::reward:
      need_string(p, "context");
      need_string(p, "question");
      need_string(p, "answer");
      break;
  }
}

void validate_response(Op op, const json& request, const json& r) {
  const ResponseCheck check{std::string(to_string(op)), r};
  if (!r.is_object()) check.fail("<root>", "must be a JSON object");
  switch (op) {
    case Op::qa:
      check.string_field("question");
      check.string_field("answer");
      break;
    case Op::distractors: {
      const json& d = check.field("distractors");
      if (!d.is_array()) check.fail("distractors", "must be an array");
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (!d[i].is_string()) check.fail("distractors[" + std::to_string(i) + "]", "must be a string");
      }
      break;
    }
    case Op::boolq:
      check.string_field("question");
      if (!check.field("answer").is_boolean()) check.fail("answer", "must be a boolean");
      break;
    case Op::classify: {
      const std::string label = check.string_field("label");
      if (label != "diagram" && label != "none") check.fail("label", "must be \"diagram\" or \"none\"");
      const double c = check.number_field("confidence");
      if (c < 0.0 || c > 1.0) check.fail("confidence", "must lie in [0, 1]");
      break;
    }
    case Op::vqg:
      check.string_field("text");
      break;
    case Op::embed: {
      const json& v = check.field("vectors");
      if (!v.is_array()) check.fail("vectors", "must be an array");
      const std::size_t expected = request.contains("texts") ? request["texts"].size() : v.size();
      if (v.size() != expected) check.fail("vectors", "must hold one vector per text");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string name = "vectors[" + std::to_string(i) + "]";
        if (!v[i].is_array()) check.fail(name, "must be an array of numbers");
        for (const auto& x : v[i]) {
          if (!x.is_number()) check.fail(name, "must be an array of numbers");
        }
      }
      break;
    }
    case Op::transcribe: {
      const json& segs = check.field("segments");
      if (!segs.is_array()) check.fail("segments", "must be an array");
      for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string base = "segments[" + std::to_string(i) + "]";
        const json& s = segs[i];
        if (!s.is_object()) check.fail(base, "must be an object");
        const ResponseCheck inner{check.op, s};
        try {
          const double a = inner.number_field("start_s");
          const double b = inner.number_field("end_s");
          inner.string_field("text");
          if (!(b > a)) check.fail(base + ".end_s", "must exceed start_s");
        } catch (const MalformedResponse& e) {
          if (e.field().rfind("segments[", 0) == 0) throw;
          check.fail(base + "." + e.field(), "is missing or has the wrong type");
        }
      }
      break;
    }
    case Op::reward:
      // Real reward models emit unbounded scalars; only the mock is in [0, 1].
      check.number_field("score");
      break;
  }
}

}  // namespace qgen::backend
