#include "qgen/chunkstore/ingest.hpp"

#include "qgen/common/error.hpp"
#include "qgen/common/hash.hpp"
#include "qgen/common/text.hpp"

#include <algorithm>

namespace qgen::chunkstore {

namespace {

constexpr char32_t kBullet = U'•';

bool is_line_break(char32_t cp) {
  return cp == U'\n' || cp == U'\u0085' || cp == U'\u2028' || cp == U'\u2029';
}

void trim_spaces(std::u32string& line) {
  std::size_t b = 0;
  while (b < line.size() && text::is_space(line[b])) ++b;
  std::size_t e = line.size();
  while (e > b && text::is_space(line[e - 1])) --e;
  line = line.substr(b, e - b);
}

// Strips any number of leading bullet markers. '-' and '*' only count as
// bullets when followed by whitespace or the end of the line.
void strip_bullets(std::u32string& line) {
  for (;;) {
    trim_spaces(line);
    if (line.empty()) return;
    const char32_t c = line[0];
    const bool spaced = line.size() == 1 || text::is_space(line[1]);
    if (c == kBullet || ((c == U'-' || c == U'*') && spaced)) {
      line.erase(0, 1);
      continue;
    }
    return;
  }
}

void collapse_spaces(std::u32string& line) {
  std::u32string out;
  out.reserve(line.size());
  for (char32_t c : line) {
    if (c == U' ' && !out.empty() && out.back() == U' ') continue;
    out.push_back(c);
  }
  line = std::move(out);
}

bool ends_with_hyphenated_word(const std::u32string& line) {
  const std::size_t n = line.size();
  return n >= 2 && line[n - 1] == U'-' && text::is_alnum(line[n - 2]);
}

std::string doc_id_for(DocKind kind, std::string_view bytes) {
  return content_id({"doc", to_string(kind), bytes});
}

bool equals_ignore_ascii_case(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; };
    if (lower(a[i]) != lower(b[i])) return false;
  }
  return true;
}

// True when text[0..=dot] ends with one of the abbreviations as a whole word.
bool ends_with_abbreviation(std::string_view text, std::size_t dot,
                            const std::vector<std::string>& abbreviations) {
  std::string_view head = text.substr(0, dot + 1);
  for (const auto& abbr : abbreviations) {
    if (abbr.empty() || abbr.size() > head.size()) continue;
    std::string_view tail = head.substr(head.size() - abbr.size());
    if (!equals_ignore_ascii_case(tail, abbr)) continue;
    const std::size_t before = head.size() - abbr.size();
    if (before == 0) return true;
    const char prev = head[before - 1];
    if (prev == ' ' || prev == '\n' || prev == '(' || prev == '[' || prev == '"') return true;
  }
  return false;
}

bool is_closer(char32_t cp) {
  return cp == U')' || cp == U']' || cp == U'"' || cp == U'\'' || cp == U'”' ||
         cp == U'’';
}

bool is_opener(char32_t cp) {
  return cp == U'(' || cp == U'[' || cp == U'"' || cp == U'\'' || cp == U'“' ||
         cp == U'‘';
}

std::string squash_whitespace(std::string_view s) {
  return text::join(text::split_whitespace(s), " ");
}

struct TimedText {
  std::size_t index;
  double start_s;
  double end_s;
  std::string text;  // cleaned, single line
};

void validate_segment_order(const std::vector<TimedText>& segs) {
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!(segs[i].end_s > segs[i].start_s) || segs[i].start_s < 0.0) {
      throw IngestError("segment " + std::to_string(segs[i].index) +
                            ": needs 0 <= start_s < end_s",
                        segs[i].index);
    }
    if (i > 0 && segs[i].start_s < segs[i - 1].start_s) {
      throw IngestError("segment " + std::to_string(segs[i].index) +
                            ": starts before the preceding segment (segments must be time-ordered)",
                        segs[i].index);
    }
  }
}

// Adjacent transcript segments are merged until the word target is reached.
std::vector<std::pair<Locator, std::string>> merge_segments(const std::vector<TimedText>& segs,
                                                            const ChunkConfig& cfg) {
  std::vector<std::pair<Locator, std::string>> out;
  std::vector<std::string> parts;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t words = 0;
  auto flush = [&] {
    if (parts.empty()) return;
    out.emplace_back(Locator::time(lo, hi), text::join(parts, " "));
    parts.clear();
    words = 0;
  };
  for (const auto& s : segs) {
    if (s.text.empty()) continue;
    if (parts.empty()) {
      lo = s.start_s;
      hi = s.end_s;
    } else {
      lo = std::min(lo, s.start_s);
      hi = std::max(hi, s.end_s);
    }
    parts.push_back(s.text);
    words += text::word_count(s.text);
    if (words >= static_cast<std::size_t>(std::max(cfg.target_words, 1))) flush();
  }
  flush();
  return out;
}

void finalize(std::vector<Chunk>& chunks, const std::string& doc_id) {
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    Chunk& c = chunks[i];
    c.doc_id = doc_id;
    c.ordinal = i;
    c.id = chunk_id(doc_id, c.locator, i, c.kind, c.is_text() ? c.text : c.image_ref);
  }
}

std::vector<Chunk> text_chunks(const std::vector<std::string>& cleaned_parts, const Locator& loc,
                               const IngestOptions& opt) {
  std::vector<std::string> sentences;
  for (const auto& part : cleaned_parts) {
    auto s = segment_sentences(part, opt.abbreviations);
    sentences.insert(sentences.end(), std::make_move_iterator(s.begin()),
                     std::make_move_iterator(s.end()));
  }
  return chunk_sentences(sentences, loc, opt.chunking);
}

void check_locator_for_kind(DocKind kind, const Locator& loc, std::size_t index) {
  bool ok = false;
  switch (kind) {
    case DocKind::pdf: ok = loc.type() == Locator::Type::page; break;
    case DocKind::pptx: ok = loc.type() == Locator::Type::slide; break;
    case DocKind::audio: ok = loc.type() == Locator::Type::time; break;
    case DocKind::plaintext: ok = loc.type() == Locator::Type::none; break;
  }
  if (!ok) {
    static constexpr const char* expected[] = {"page", "slide", "start_s/end_s", "no locator"};
    throw IngestError("record " + std::to_string(index) + ": " + std::string(to_string(kind)) +
                          " records need " + expected[static_cast<int>(kind)],
                      index);
  }
}

bool locator_before(const Locator& a, const Locator& b) {
  if (a.type() == Locator::Type::time) return a.start_s() < b.start_s();
  return a.number() < b.number();
}

}  // namespace

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> list = {"e.g.", "i.e.", "Dr.", "Fig.", "et al.", "vs."};
  return list;
}

std::string clean_text(std::string_view raw) {
  if (auto off = text::find_invalid_utf8(raw)) {
    throw IngestError("invalid UTF-8 at byte offset " + std::to_string(*off), std::nullopt, off);
  }
  const std::u32string cps = text::decode(text::nfc(raw));

  std::vector<std::u32string> lines(1);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (c == U'\r') {
      if (i + 1 < cps.size() && cps[i + 1] == U'\n') continue;
      lines.emplace_back();
    } else if (is_line_break(c)) {
      lines.emplace_back();
    } else if (c == U'\t' || c == U'\v' || c == U'\f') {
      lines.back().push_back(U' ');
    } else if (!text::is_control(c)) {
      lines.back().push_back(c);
    }
  }

  std::vector<std::u32string> kept;
  for (auto& line : lines) {
    strip_bullets(line);
    collapse_spaces(line);
    if (line.empty()) continue;
    if (!kept.empty() && ends_with_hyphenated_word(kept.back()) && text::is_alnum(line[0])) {
      kept.back().pop_back();
      kept.back() += line;
    } else {
      kept.push_back(std::move(line));
    }
  }

  std::u32string joined;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i) joined.push_back(U'\n');
    joined += kept[i];
  }
  return text::trim(text::nfc(text::encode(joined)));
}

std::vector<std::string> segment_sentences(std::string_view text,
                                           const std::vector<std::string>& abbreviations) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    ++pos;
    if (c != '.' && c != '!' && c != '?') continue;
    const std::size_t dot = pos - 1;

    std::size_t end = pos;
    while (end < text.size()) {
      std::size_t probe = end;
      if (!is_closer(text::next_codepoint(text, probe))) break;
      end = probe;
    }
    std::size_t next = end;
    bool saw_space = false;
    while (next < text.size()) {
      std::size_t probe = next;
      if (!text::is_space(text::next_codepoint(text, probe))) break;
      next = probe;
      saw_space = true;
    }
    if (!saw_space || next >= text.size()) continue;
    std::size_t probe = next;
    char32_t lead = text::next_codepoint(text, probe);
    while (is_opener(lead) && probe < text.size()) lead = text::next_codepoint(text, probe);
    if (!text::is_upper(lead) && !text::is_digit(lead)) continue;
    if (c == '.' && ends_with_abbreviation(text, dot, abbreviations)) continue;

    std::string sentence = squash_whitespace(text.substr(start, end - start));
    if (!sentence.empty()) out.push_back(std::move(sentence));
    start = next;
    pos = next;
  }
  std::string tail = squash_whitespace(text.substr(start));
  if (!tail.empty()) out.push_back(std::move(tail));
  return out;
}

std::vector<Chunk> chunk_sentences(const std::vector<std::string>& sentences,
                                   const Locator& locator, const ChunkConfig& config) {
  std::vector<Chunk> out;
  const std::size_t n = sentences.size();
  const std::size_t target = static_cast<std::size_t>(std::max(config.target_words, 1));
  const std::size_t overlap = static_cast<std::size_t>(std::max(config.overlap_sentences, 0));
  std::size_t begin = 0;
  while (begin < n) {
    std::size_t end = begin;
    std::size_t words = 0;
    while (end < n && words < target) {
      words += text::word_count(sentences[end]);
      ++end;
    }
    Chunk c;
    c.kind = ChunkKind::text;
    c.locator = locator;
    c.ordinal = out.size();
    c.text = text::join({sentences.begin() + static_cast<std::ptrdiff_t>(begin),
                         sentences.begin() + static_cast<std::ptrdiff_t>(end)},
                        " ");
    out.push_back(std::move(c));
    if (end >= n) break;
    begin = std::max(end > overlap ? end - overlap : 0, begin + 1);
  }
  return out;
}

std::vector<std::pair<std::size_t, ManifestRecord>> parse_manifest(std::string_view bytes) {
  std::vector<std::pair<std::size_t, ManifestRecord>> records;
  std::size_t line_start = 0;
  std::size_t index = 0;
  while (line_start <= bytes.size()) {
    std::size_t nl = bytes.find('\n', line_start);
    if (nl == std::string_view::npos) nl = bytes.size();
    std::string_view line = bytes.substr(line_start, nl - line_start);
    const std::size_t offset = line_start;
    line_start = nl + 1;
    const std::size_t rec = index++;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (nl == bytes.size()) break;
      continue;
    }
    const std::string where = "record " + std::to_string(rec) + " (line " +
                              std::to_string(rec + 1) + ")";
    if (auto bad = text::find_invalid_utf8(line)) {
      throw IngestError(where + ": invalid UTF-8", rec, offset + *bad);
    }
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw IngestError(where + ": invalid JSON: " + e.what(), rec);
    }
    if (!j.is_object()) throw IngestError(where + ": expected a JSON object", rec);

    ManifestRecord r;
    try {
      if (!j.contains("kind") || !j["kind"].is_string()) {
        throw IngestError(where + ": missing string field 'kind'", rec);
      }
      r.kind = doc_kind_from_string(j["kind"].get<std::string>());

      const bool has_page = j.contains("page");
      const bool has_slide = j.contains("slide");
      const bool has_time = j.contains("start_s") || j.contains("end_s");
      if (int(has_page) + int(has_slide) + int(has_time) > 1) {
        throw IngestError(where + ": more than one locator given", rec);
      }
      if (has_page) {
        r.locator = Locator::page(j["page"].get<int>());
      } else if (has_slide) {
        r.locator = Locator::slide(j["slide"].get<int>());
      } else if (has_time) {
        if (!j.contains("start_s") || !j.contains("end_s")) {
          throw IngestError(where + ": time locator needs both start_s and end_s", rec);
        }
        r.locator = Locator::time(j["start_s"].get<double>(), j["end_s"].get<double>());
      }

      const bool has_text = j.contains("text");
      const bool has_image = j.contains("image_ref");
      if (has_text == has_image) {
        throw IngestError(where + (has_text ? ": both text and image_ref given"
                                            : ": missing payload (text or image_ref)"),
                          rec);
      }
      if (has_text) {
        r.text = j["text"].get<std::string>();
      } else {
        r.image_ref = j["image_ref"].get<std::string>();
        if (r.image_ref->empty()) throw IngestError(where + ": empty image_ref", rec);
      }
    } catch (const IngestError&) {
      throw;
    } catch (const Error& e) {
      throw IngestError(where + ": " + e.what(), rec);
    } catch (const nlohmann::json::exception& e) {
      throw IngestError(where + ": " + e.what(), rec);
    }
    check_locator_for_kind(r.kind, r.locator, rec);
    records.emplace_back(rec, std::move(r));
    if (nl == bytes.size()) break;
  }
  return records;
}

Ingested ingest_manifest(std::string_view bytes, const IngestOptions& options) {
  const auto records = parse_manifest(bytes);
  if (records.empty()) throw IngestError("manifest has no records", std::nullopt);

  const DocKind kind = records.front().second.kind;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& [idx, r] = records[i];
    if (r.kind != kind) {
      throw IngestError("record " + std::to_string(idx) + ": kind '" +
                            std::string(to_string(r.kind)) + "' differs from '" +
                            std::string(to_string(kind)) + "'",
                        idx);
    }
    if (locator_before(r.locator, records[i - 1].second.locator)) {
      throw IngestError("record " + std::to_string(idx) + ": records must be ordered by locator",
                        idx);
    }
  }

  Ingested out;
  out.document.id = doc_id_for(kind, bytes);
  out.document.kind = kind;
  out.document.title = options.title;
  out.document.uri = options.uri;

  if (kind == DocKind::audio) {
    std::vector<TimedText> segs;
    for (const auto& [idx, r] : records) {
      if (!r.text) throw IngestError("record " + std::to_string(idx) + ": audio records carry text only", idx);
      std::string cleaned;
      try {
        cleaned = squash_whitespace(clean_text(*r.text));
      } catch (const IngestError& e) {
        throw IngestError("record " + std::to_string(idx) + ": " + e.what(), idx, e.byte_offset());
      }
      segs.push_back({idx, r.locator.start_s(), r.locator.end_s(), std::move(cleaned)});
    }
    validate_segment_order(segs);
    for (auto& [loc, txt] : merge_segments(segs, options.chunking)) {
      Chunk c;
      c.kind = ChunkKind::text;
      c.locator = loc;
      c.text = std::move(txt);
      out.chunks.push_back(std::move(c));
    }
    finalize(out.chunks, out.document.id);
    return out;
  }

  std::vector<std::string> group;
  std::optional<Locator> group_loc;
  auto flush = [&] {
    if (group_loc) {
      auto cs = text_chunks(group, *group_loc, options);
      out.chunks.insert(out.chunks.end(), std::make_move_iterator(cs.begin()),
                        std::make_move_iterator(cs.end()));
    }
    group.clear();
    group_loc.reset();
  };

  for (const auto& [idx, r] : records) {
    if (r.image_ref) {
      flush();
      Chunk c;
      c.kind = ChunkKind::image;
      c.image_ref = *r.image_ref;
      c.locator = r.locator;
      out.chunks.push_back(std::move(c));
      continue;
    }
    if (group_loc && !(*group_loc == r.locator)) flush();
    std::string cleaned;
    try {
      cleaned = clean_text(*r.text);
    } catch (const IngestError& e) {
      throw IngestError("record " + std::to_string(idx) + ": " + e.what(), idx, e.byte_offset());
    }
    group_loc = r.locator;
    if (!cleaned.empty()) group.push_back(std::move(cleaned));
  }
  flush();
  finalize(out.chunks, out.document.id);
  return out;
}

Ingested ingest_transcript(const std::vector<TranscriptSegment>& segments,
                           const IngestOptions& options) {
  std::vector<TimedText> segs;
  ojson canonical = ojson::array();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    std::string cleaned;
    try {
      cleaned = squash_whitespace(clean_text(s.text));
    } catch (const IngestError& e) {
      throw IngestError("segment " + std::to_string(i) + ": " + e.what(), i, e.byte_offset());
    }
    segs.push_back({i, s.start_s, s.end_s, std::move(cleaned)});
    canonical.push_back({format_double(s.start_s), format_double(s.end_s), s.text});
  }
  validate_segment_order(segs);

  Ingested out;
  out.document.id = doc_id_for(DocKind::audio, canonical.dump());
  out.document.kind = DocKind::audio;
  out.document.title = options.title;
  out.document.uri = options.uri;
  for (auto& [loc, txt] : merge_segments(segs, options.chunking)) {
    Chunk c;
    c.kind = ChunkKind::text;
    c.locator = loc;
    c.text = std::move(txt);
    out.chunks.push_back(std::move(c));
  }
  finalize(out.chunks, out.document.id);
  return out;
}

Ingested ingest_plaintext(std::string_view bytes, const IngestOptions& options) {
  const std::string cleaned = clean_text(bytes);
  Ingested out;
  out.document.id = doc_id_for(DocKind::plaintext, bytes);
  out.document.kind = DocKind::plaintext;
  out.document.title = options.title;
  out.document.uri = options.uri;
  if (!cleaned.empty()) out.chunks = text_chunks({cleaned}, Locator::none(), options);
  finalize(out.chunks, out.document.id);
  return out;
}

}  // namespace qgen::chunkstore
