#include "qgen/chunkstore/ingest.hpp"
#include "qgen/chunkstore/store.hpp"
#include "qgen/common/error.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <algorithm>
#include <thread>
#include <vector>

using namespace qgen;
using namespace qgen::chunkstore;
using testutil::TempDir;

TEST_CASE("store round-trips a document and its chunks") {
  TempDir tmp;
  Store store(tmp.path() / "s");
  IngestOptions opts;
  opts.title = "Biology";
  const Ingested ing = ingest_manifest(testutil::sample_manifest(), opts);
  store.put_document(ing.document, ing.chunks, testutil::sample_dir());

  CHECK(store.has_document(ing.document.id));
  const StoredDocument loaded = store.load_document(ing.document.id);
  CHECK(loaded.document == ing.document);
  CHECK(loaded.chunks == ing.chunks);
  CHECK(!loaded.ingested_at.empty());
  CHECK(store.list_documents() == std::vector<std::string>{ing.document.id});
  CHECK(loaded.find_chunk(ing.chunks.front().id) != nullptr);
  CHECK(loaded.find_chunk("nope") == nullptr);

  for (const auto& c : ing.chunks) {
    if (c.kind == ChunkKind::image) {
      CHECK(std::filesystem::exists(store.document_dir(ing.document.id) / "images" /
                                    std::filesystem::path(c.image_ref).filename()));
    }
  }
}

TEST_CASE("re-ingesting the same bytes is a conflict carrying the existing id") {
  TempDir tmp;
  Store store(tmp.path());
  const Ingested ing = ingest_plaintext("Some text. More text.");
  store.put_document(ing.document, ing.chunks);
  const Ingested again = ingest_plaintext("Some text. More text.");
  CHECK(again.document.id == ing.document.id);
  try {
    store.put_document(again.document, again.chunks);
    FAIL("expected ConflictError");
  } catch (const ConflictError& e) {
    CHECK(e.existing_id() == ing.document.id);
  }
}

TEST_CASE("missing documents and quizzes") {
  TempDir tmp;
  Store store(tmp.path());
  CHECK_THROWS_AS(store.load_document("0123456789abcdef0123456789abcdef"), NotFoundError);
  CHECK_THROWS_AS(store.load_document("../etc"), NotFoundError);
  CHECK_FALSE(store.find_quiz("0123456789abcdef0123456789abcdef").has_value());
  CHECK_THROWS_AS(store.put_quiz("0123456789abcdef0123456789abcdef", "q", "{}"), NotFoundError);
}

TEST_CASE("quizzes are stored under their document") {
  TempDir tmp;
  Store store(tmp.path());
  const Ingested ing = ingest_plaintext("Alpha beta gamma.");
  store.put_document(ing.document, ing.chunks);
  store.put_quiz(ing.document.id, "abc", "{\"x\":1}");
  CHECK(store.read_quiz(ing.document.id, "abc") == std::optional<std::string>("{\"x\":1}"));
  const auto found = store.find_quiz("abc");
  REQUIRE(found.has_value());
  CHECK(found->first == ing.document.id);
  CHECK(found->second == "{\"x\":1}");
  store.put_quiz(ing.document.id, "abc", "{\"x\":2}");
  CHECK(store.read_quiz(ing.document.id, "abc") == std::optional<std::string>("{\"x\":2}"));
}

TEST_CASE("concurrent writers of the same document produce one winner") {
  TempDir tmp;
  Store store(tmp.path());
  const Ingested ing = ingest_plaintext("Concurrent text. Written twice.");
  std::atomic<int> ok{0}, conflict{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      try {
        store.put_document(ing.document, ing.chunks);
        ++ok;
      } catch (const ConflictError&) {
        ++conflict;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(ok == 1);
  CHECK(conflict == 7);
  CHECK(store.load_document(ing.document.id).chunks == ing.chunks);
}

TEST_CASE("write_file_atomic replaces content") {
  TempDir tmp;
  const auto p = tmp.path() / "sub" / "f.txt";
  write_file_atomic(p, "one");
  write_file_atomic(p, "two");
  CHECK(read_file(p) == "two");
  CHECK_THROWS_AS(read_file(tmp.path() / "missing"), IoError);
}

TEST_CASE("write_file_atomic accepts a bare relative file name") {
  TempDir tmp;
  const auto cwd = std::filesystem::current_path();
  std::filesystem::current_path(tmp.path());
  write_file_atomic("bare.txt", "x");
  std::filesystem::current_path(cwd);
  CHECK(read_file(tmp.path() / "bare.txt") == "x");
}
