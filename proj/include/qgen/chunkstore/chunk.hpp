#pragma once

#include <json.hpp>

#include <cstddef>
#include <string>
#include <string_view>

namespace qgen::chunkstore {

using ojson = nlohmann::ordered_json;

enum class DocKind { pdf, pptx, audio, plaintext };

std::string_view to_string(DocKind kind);
DocKind doc_kind_from_string(std::string_view name);  // throws ValidationError

struct SourceDocument {
  std::string id;
  DocKind kind = DocKind::plaintext;
  std::string title;
  std::string uri;

  bool operator==(const SourceDocument&) const = default;
};

// Where a chunk came from: a PDF page, a slide, an audio time range, or
// nothing at all for plain text.
class Locator {
 public:
  enum class Type { none, page, slide, time };

  Locator() = default;
  static Locator none() { return {}; }
  static Locator page(int n);
  static Locator slide(int n);
  static Locator time(double start_s, double end_s);

  Type type() const noexcept { return type_; }
  int number() const noexcept { return n_; }
  double start_s() const noexcept { return start_s_; }
  double end_s() const noexcept { return end_s_; }

  // "page 2", "slide 5", "00:01.5-00:04.2", "document".
  std::string render() const;
  // Stable textual form used for hashing.
  std::string canonical() const;

  ojson to_json() const;
  static Locator from_json(const ojson& j);

  bool operator==(const Locator&) const = default;

 private:
  Type type_ = Type::none;
  int n_ = 0;
  double start_s_ = 0.0;
  double end_s_ = 0.0;
};

enum class ChunkKind { text, image };

struct Chunk {
  std::string id;
  std::string doc_id;
  ChunkKind kind = ChunkKind::text;
  std::string text;       // text chunks only
  std::string image_ref;  // image chunks only
  Locator locator;
  std::size_t ordinal = 0;

  bool is_text() const noexcept { return kind == ChunkKind::text; }
  bool operator==(const Chunk&) const = default;
};

std::string chunk_id(const std::string& doc_id, const Locator& loc, std::size_t ordinal,
                     ChunkKind kind, std::string_view payload);

ojson to_json(const SourceDocument& doc);
SourceDocument document_from_json(const ojson& j);
ojson to_json(const Chunk& chunk);
Chunk chunk_from_json(const ojson& j);

// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

}  // namespace qgen::chunkstore
