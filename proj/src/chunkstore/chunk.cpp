#include "qgen/chunkstore/chunk.hpp"

#include "qgen/common/error.hpp"
#include "qgen/common/hash.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace qgen::chunkstore {

std::string_view to_string(DocKind kind) {
  switch (kind) {
    case DocKind::pdf: return "pdf";
    case DocKind::pptx: return "pptx";
    case DocKind::audio: return "audio";
    case DocKind::plaintext: return "plaintext";
  }
  return "plaintext";
}

DocKind doc_kind_from_string(std::string_view name) {
  if (name == "pdf") return DocKind::pdf;
  if (name == "pptx") return DocKind::pptx;
  if (name == "audio") return DocKind::audio;
  if (name == "plaintext") return DocKind::plaintext;
  throw ValidationError("unknown document kind '" + std::string(name) + "'");
}

Locator Locator::page(int n) {
  if (n < 1) throw ValidationError("page number must be >= 1");
  Locator l;
  l.type_ = Type::page;
  l.n_ = n;
  return l;
}

Locator Locator::slide(int n) {
  if (n < 1) throw ValidationError("slide number must be >= 1");
  Locator l;
  l.type_ = Type::slide;
  l.n_ = n;
  return l;
}

Locator Locator::time(double start_s, double end_s) {
  if (!std::isfinite(start_s) || !std::isfinite(end_s) || start_s < 0.0) {
    throw ValidationError("time range must be finite with start_s >= 0");
  }
  if (!(end_s > start_s)) throw ValidationError("time range needs end_s > start_s");
  Locator l;
  l.type_ = Type::time;
  l.start_s_ = start_s;
  l.end_s_ = end_s;
  return l;
}

namespace {

std::string clock(double seconds) {
  const int minutes = static_cast<int>(seconds / 60.0);
  const double rest = seconds - minutes * 60.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d:%04.1f", minutes, rest);
  return buf;
}

}  // namespace

std::string Locator::render() const {
  switch (type_) {
    case Type::page: return "page " + std::to_string(n_);
    case Type::slide: return "slide " + std::to_string(n_);
    case Type::time: return clock(start_s_) + "-" + clock(end_s_);
    case Type::none: return "document";
  }
  return "document";
}

std::string Locator::canonical() const {
  switch (type_) {
    case Type::page: return "page:" + std::to_string(n_);
    case Type::slide: return "slide:" + std::to_string(n_);
    case Type::time: return "time:" + format_double(start_s_) + ":" + format_double(end_s_);
    case Type::none: return "none";
  }
  return "none";
}

ojson Locator::to_json() const {
  ojson j;
  switch (type_) {
    case Type::page:
      j["type"] = "page";
      j["n"] = n_;
      break;
    case Type::slide:
      j["type"] = "slide";
      j["n"] = n_;
      break;
    case Type::time:
      j["type"] = "time";
      j["start_s"] = start_s_;
      j["end_s"] = end_s_;
      break;
    case Type::none:
      j["type"] = "none";
      break;
  }
  return j;
}

Locator Locator::from_json(const ojson& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "page") return page(j.at("n").get<int>());
  if (type == "slide") return slide(j.at("n").get<int>());
  if (type == "time") return time(j.at("start_s").get<double>(), j.at("end_s").get<double>());
  if (type == "none") return none();
  throw ValidationError("unknown locator type '" + type + "'");
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string chunk_id(const std::string& doc_id, const Locator& loc, std::size_t ordinal,
                     ChunkKind kind, std::string_view payload) {
  const std::string ord = std::to_string(ordinal);
  return content_id({"chunk", doc_id, loc.canonical(), ord,
                     kind == ChunkKind::text ? "text" : "image", payload});
}

ojson to_json(const SourceDocument& doc) {
  ojson j;
  j["id"] = doc.id;
  j["kind"] = to_string(doc.kind);
  j["title"] = doc.title;
  j["uri"] = doc.uri;
  return j;
}

SourceDocument document_from_json(const ojson& j) {
  SourceDocument d;
  d.id = j.at("id").get<std::string>();
  d.kind = doc_kind_from_string(j.at("kind").get<std::string>());
  d.title = j.value("title", "");
  d.uri = j.value("uri", "");
  return d;
}

ojson to_json(const Chunk& c) {
  ojson j;
  j["id"] = c.id;
  j["doc_id"] = c.doc_id;
  j["kind"] = c.is_text() ? "text" : "image";
  if (c.is_text()) {
    j["text"] = c.text;
  } else {
    j["image_ref"] = c.image_ref;
  }
  j["locator"] = c.locator.to_json();
  j["ordinal"] = c.ordinal;
  return j;
}

Chunk chunk_from_json(const ojson& j) {
  Chunk c;
  c.id = j.at("id").get<std::string>();
  c.doc_id = j.at("doc_id").get<std::string>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "text") {
    c.kind = ChunkKind::text;
    c.text = j.at("text").get<std::string>();
  } else if (kind == "image") {
    c.kind = ChunkKind::image;
    c.image_ref = j.at("image_ref").get<std::string>();
  } else {
    throw ValidationError("unknown chunk kind '" + kind + "'");
  }
  c.locator = Locator::from_json(j.at("locator"));
  c.ordinal = j.at("ordinal").get<std::size_t>();
  return c;
}

}  // namespace qgen::chunkstore
