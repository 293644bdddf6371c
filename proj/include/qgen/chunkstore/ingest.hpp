#pragma once

#include "qgen/chunkstore/chunk.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qgen::chunkstore {

struct ChunkConfig {
  int target_words = 120;
  int overlap_sentences = 1;
};

const std::vector<std::string>& default_abbreviations();

struct IngestOptions {
  std::string title;
  std::string uri;
  ChunkConfig chunking;
  std::vector<std::string> abbreviations = default_abbreviations();
};

struct Ingested {
  SourceDocument document;
  std::vector<Chunk> chunks;
};

// Unicode-normalizes (NFC) and tidies extracted text: drops control
// characters except newline, collapses space/tab runs, rejoins words split by
// end-of-line hyphenation, strips leading bullet markers and trims. Throws
// IngestError carrying the byte offset of invalid UTF-8. Idempotent.
std::string clean_text(std::string_view raw);

// Splits after '.', '!' or '?' when followed by whitespace and an uppercase
// letter or digit, unless the period closes a listed abbreviation. Returned
// sentences never contain line breaks; internal whitespace is single spaces.
std::vector<std::string> segment_sentences(
    std::string_view text,
    const std::vector<std::string>& abbreviations = default_abbreviations());

// Greedy packing of sentences from one locator. The returned chunks carry the
// locator and a local ordinal; doc_id and id are assigned by the ingest step.
std::vector<Chunk> chunk_sentences(const std::vector<std::string>& sentences,
                                   const Locator& locator, const ChunkConfig& config = {});

struct ManifestRecord {
  DocKind kind = DocKind::plaintext;
  Locator locator;
  std::optional<std::string> text;
  std::optional<std::string> image_ref;
};

// Parses UTF-8 JSON Lines. Blank lines are skipped but still counted, so a
// record index is always the 0-based line number.
std::vector<std::pair<std::size_t, ManifestRecord>> parse_manifest(std::string_view bytes);

Ingested ingest_manifest(std::string_view bytes, const IngestOptions& options = {});

struct TranscriptSegment {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
};

Ingested ingest_transcript(const std::vector<TranscriptSegment>& segments,
                           const IngestOptions& options = {});

Ingested ingest_plaintext(std::string_view bytes, const IngestOptions& options = {});

}  // namespace qgen::chunkstore
