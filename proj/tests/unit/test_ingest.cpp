#include "qgen/chunkstore/ingest.hpp"
#include "qgen/common/error.hpp"
#include "qgen/common/rng.hpp"
#include "qgen/common/text.hpp"

#include <doctest.h>

#include <string>
#include <vector>

using namespace qgen;
using namespace qgen::chunkstore;

namespace {

std::string words(int n, const std::string& w = "word") {
  std::string s;
  for (int i = 0; i < n; ++i) s += (i ? " " : "") + w;
  return s;
}

std::string strip_ws(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c != ' ' && c != '\n') out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("clean_text examples") {
  CHECK(clean_text("Hello\t\tworld ") == "Hello world");
  CHECK(clean_text("photo-\nsynthesis") == "photosynthesis");
  CHECK(clean_text("\xe2\x80\xa2 Light Absorption:  Chlorophyll") == "Light Absorption: Chlorophyll");
}

TEST_CASE("clean_text edge cases") {
  CHECK(clean_text("").empty());
  CHECK(clean_text(" \n\t ").empty());
  CHECK(clean_text("a\x01" "b\x7f" "c") == "abc");
  CHECK(clean_text("line one\r\nline two") == "line one\nline two");
  CHECK(clean_text("- item\n* other\n-3 degrees") == "item\nother\n-3 degrees");
  CHECK(clean_text("well-known") == "well-known");
  CHECK(clean_text("ends with -\nnext") == "ends with -\nnext");
  CHECK(clean_text("para one\n\n\npara two") == "para one\npara two");
  CHECK(clean_text("cafe\xcc\x81") == "caf\xc3\xa9");
}

TEST_CASE("clean_text rejects invalid UTF-8 with its byte offset") {
  try {
    clean_text("abc\xff");
    FAIL("expected IngestError");
  } catch (const IngestError& e) {
    CHECK(e.byte_offset() == std::optional<std::size_t>(3));
    CHECK(e.kind() == ErrorKind::validation);
  }
}

TEST_CASE("clean_text is idempotent on random inputs") {
  const std::vector<std::string> pieces = {"a",   "B",  " ",   "\t", "\n",  "-",       "*",
                                           ".",   "x-", "\r",  "\x01", "\xe2\x80\xa2", "  ",
                                           "word", "9", "e\xcc\x81", "\xc2\x85"};
  Rng rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string s;
    const auto n = rng.below(25);
    for (std::uint64_t i = 0; i < n; ++i) s += pieces[rng.below(pieces.size())];
    const std::string once = clean_text(s);
    CHECK(clean_text(once) == once);
    CHECK(text::trim(once) == once);
  }
}

TEST_CASE("segment_sentences examples") {
  CHECK(segment_sentences("A b. C d.") == std::vector<std::string>{"A b.", "C d."});
  CHECK(segment_sentences("See Fig. 5 here.") == std::vector<std::string>{"See Fig. 5 here."});
  CHECK(segment_sentences("").empty());
}

TEST_CASE("segment_sentences rules") {
  CHECK(segment_sentences("Is it? Yes! 3 more.") ==
        std::vector<std::string>{"Is it?", "Yes!", "3 more."});
  CHECK(segment_sentences("Dr. Smith arrived. He sat.") ==
        std::vector<std::string>{"Dr. Smith arrived.", "He sat."});
  CHECK(segment_sentences("Use e.g. Apples here.") ==
        std::vector<std::string>{"Use e.g. Apples here."});
  CHECK(segment_sentences("He said \"Stop.\" Then left.") ==
        std::vector<std::string>{"He said \"Stop.\"", "Then left."});
  CHECK(segment_sentences("lower. case stays") == std::vector<std::string>{"lower. case stays"});
  CHECK(segment_sentences("Line one.\nLine two.") ==
        std::vector<std::string>{"Line one.", "Line two."});
  CHECK(segment_sentences("Custom abbr. Next", {"abbr."}) ==
        std::vector<std::string>{"Custom abbr. Next"});
}

TEST_CASE("segment_sentences reconstructs the text up to whitespace") {
  const std::string text = clean_text(
      "Photosynthesis is a process. It occurs in chloroplasts! Does it need light? Yes. "
      "See Fig. 2 for details.\nCarbon dioxide is fixed. 3 steps follow.");
  const auto sentences = segment_sentences(text);
  CHECK(sentences.size() == 7);
  CHECK(strip_ws(text::join(sentences, " ")) == strip_ws(text));
}

TEST_CASE("chunk_sentences greedy packing") {
  SUBCASE("one short sentence") {
    const auto chunks = chunk_sentences({"Five words are right here."}, Locator::page(1));
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].text == "Five words are right here.");
    CHECK(chunks[0].locator == Locator::page(1));
  }
  SUBCASE("80/80/80 words, target 120, overlap 1") {
    const std::string s1 = words(80, "a"), s2 = words(80, "b"), s3 = words(80, "c");
    const auto chunks = chunk_sentences({s1, s2, s3}, Locator::page(1), {120, 1});
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].text == s1 + " " + s2);
    CHECK(chunks[1].text == s2 + " " + s3);
  }
  SUBCASE("empty input") { CHECK(chunk_sentences({}, Locator::page(1)).empty()); }
  SUBCASE("no overlap") {
    const auto chunks =
        chunk_sentences({words(60, "a"), words(60, "b"), words(60, "c")}, Locator::none(), {100, 0});
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].text == words(60, "a") + " " + words(60, "b"));
    CHECK(chunks[1].text == words(60, "c"));
  }
  SUBCASE("every sentence lands in some chunk") {
    std::vector<std::string> sentences;
    for (int i = 0; i < 30; ++i) sentences.push_back(words(3 + (i * 7) % 40, "s" + std::to_string(i)));
    for (int target : {1, 20, 120, 1000}) {
      for (int overlap : {0, 1, 2}) {
        const auto chunks = chunk_sentences(sentences, Locator::page(3), {target, overlap});
        for (const auto& s : sentences) {
          bool found = false;
          for (const auto& c : chunks) found = found || c.text.find(s) != std::string::npos;
          CHECK(found);
        }
      }
    }
  }
}

TEST_CASE("locator rendering and validation") {
  CHECK(Locator::page(2).render() == "page 2");
  CHECK(Locator::slide(5).render() == "slide 5");
  CHECK(Locator::none().render() == "document");
  CHECK(Locator::time(1.5, 64.25).render() == "00:01.5-01:04.2");
  CHECK_THROWS_AS(Locator::page(0), ValidationError);
  CHECK_THROWS_AS(Locator::time(2.0, 2.0), ValidationError);
  CHECK_THROWS_AS(Locator::time(-1.0, 2.0), ValidationError);
  for (const Locator& l : {Locator::page(3), Locator::slide(1), Locator::time(0.5, 2.75), Locator::none()}) {
    CHECK(Locator::from_json(l.to_json()) == l);
  }
}

TEST_CASE("manifest with two pdf pages carries page locators") {
  const std::string manifest =
      "{\"kind\":\"pdf\",\"page\":1,\"text\":\"First page text. It has two sentences.\"}\n"
      "{\"kind\":\"pdf\",\"page\":2,\"text\":\"Second page text.\"}\n";
  const Ingested ing = ingest_manifest(manifest);
  CHECK(ing.document.kind == DocKind::pdf);
  REQUIRE(ing.chunks.size() == 2);
  CHECK(ing.chunks[0].locator == Locator::page(1));
  CHECK(ing.chunks[1].locator == Locator::page(2));
  CHECK(ing.chunks[0].ordinal == 0);
  CHECK(ing.chunks[1].ordinal == 1);
  for (const auto& c : ing.chunks) {
    CHECK(c.doc_id == ing.document.id);
    CHECK(c.id.size() == 32);
  }
}

TEST_CASE("manifest image record becomes one image chunk") {
  const Ingested ing = ingest_manifest("{\"kind\":\"pptx\",\"slide\":4,\"image_ref\":\"img/a.png\"}\n");
  REQUIRE(ing.chunks.size() == 1);
  CHECK(ing.chunks[0].kind == ChunkKind::image);
  CHECK(ing.chunks[0].image_ref == "img/a.png");
  CHECK(ing.chunks[0].text.empty());
  CHECK(ing.chunks[0].locator == Locator::slide(4));
}

TEST_CASE("manifest errors name the record index") {
  auto index_of = [](const std::string& m) -> std::optional<std::size_t> {
    try {
      ingest_manifest(m);
    } catch (const IngestError& e) {
      return e.record_index();
    }
    return std::nullopt;
  };
  const std::string ok = "{\"kind\":\"pdf\",\"page\":1,\"text\":\"Fine.\"}\n";
  CHECK(index_of(ok + "{\"kind\":\"pdf\",\"page\":2}\n") == std::optional<std::size_t>(1));
  CHECK(index_of(ok + "\n{not json\n") == std::optional<std::size_t>(2));
  CHECK(index_of(ok + "{\"kind\":\"pdf\",\"page\":2,\"text\":\"x\",\"image_ref\":\"y\"}\n") ==
        std::optional<std::size_t>(1));
  CHECK(index_of(ok + "{\"kind\":\"pptx\",\"slide\":2,\"text\":\"x\"}\n") ==
        std::optional<std::size_t>(1));
  CHECK(index_of(ok + "{\"kind\":\"pdf\",\"slide\":2,\"text\":\"x\"}\n") ==
        std::optional<std::size_t>(1));
  CHECK(index_of("{\"kind\":\"pdf\",\"page\":2,\"text\":\"a\"}\n{\"kind\":\"pdf\",\"page\":1,\"text\":\"b\"}\n") ==
        std::optional<std::size_t>(1));
  CHECK(index_of("{\"kind\":\"scroll\",\"text\":\"a\"}\n") == std::optional<std::size_t>(0));
  CHECK_THROWS_AS(ingest_manifest(""), IngestError);
}

TEST_CASE("ingest is deterministic and chunks never cross pages") {
  const std::string manifest =
      "{\"kind\":\"pdf\",\"page\":1,\"text\":\"" + words(100, "alpha") + ". " + words(100, "beta") +
      ".\"}\n{\"kind\":\"pdf\",\"page\":2,\"text\":\"Gamma delta.\"}\n";
  const Ingested a = ingest_manifest(manifest);
  const Ingested b = ingest_manifest(manifest);
  CHECK(a.document == b.document);
  CHECK(a.chunks == b.chunks);
  for (const auto& c : a.chunks) {
    const bool page1 = c.text.find("alpha") != std::string::npos || c.text.find("beta") != std::string::npos;
    CHECK(c.locator == (page1 ? Locator::page(1) : Locator::page(2)));
  }
  for (std::size_t i = 1; i < a.chunks.size(); ++i) CHECK(a.chunks[i].ordinal > a.chunks[i - 1].ordinal);
}

TEST_CASE("plaintext coverage: every non-space character of the cleaned text is chunked") {
  std::string raw;
  for (int i = 0; i < 40; ++i) raw += "Sentence number " + std::to_string(i) + " talks about topic " + std::to_string(i * 3) + ". ";
  IngestOptions opts;
  opts.chunking = {30, 1};
  const Ingested ing = ingest_plaintext(raw, opts);
  CHECK(ing.document.kind == DocKind::plaintext);
  REQUIRE(ing.chunks.size() > 1);
  std::string joined;
  for (const auto& c : ing.chunks) {
    CHECK(c.locator == Locator::none());
    CHECK(!c.text.empty());
    CHECK(text::trim(c.text) == c.text);
    joined += c.text + " ";
  }
  for (const auto& s : segment_sentences(clean_text(raw))) CHECK(joined.find(s) != std::string::npos);
}

TEST_CASE("transcript ingest") {
  SUBCASE("single segment") {
    const Ingested ing = ingest_transcript({{0.0, 4.2, "Hello world"}});
    REQUIRE(ing.chunks.size() == 1);
    CHECK(ing.chunks[0].locator == Locator::time(0.0, 4.2));
    CHECK(ing.document.kind == DocKind::audio);
  }
  SUBCASE("two short segments merge") {
    const Ingested ing = ingest_transcript({{0.0, 2.0, "First part."}, {2.0, 5.0, "Second part."}});
    REQUIRE(ing.chunks.size() == 1);
    CHECK(ing.chunks[0].locator == Locator::time(0.0, 5.0));
    CHECK(ing.chunks[0].text == "First part. Second part.");
  }
  SUBCASE("reversed order is rejected") {
    CHECK_THROWS_AS(ingest_transcript({{2.0, 5.0, "Later."}, {0.0, 2.0, "Earlier."}}), IngestError);
  }
  SUBCASE("merging stops at the word target") {
    IngestOptions opts;
    opts.chunking.target_words = 4;
    const Ingested ing = ingest_transcript(
        {{0, 1, "one two"}, {1, 2, "three four"}, {2, 3, "five six"}, {3, 4, "seven"}}, opts);
    REQUIRE(ing.chunks.size() == 2);
    CHECK(ing.chunks[0].locator == Locator::time(0, 2));
    CHECK(ing.chunks[1].locator == Locator::time(2, 4));
  }
}
