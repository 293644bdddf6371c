#include "qgen/backend/mock.hpp"
#include "qgen/chunkstore/ingest.hpp"
#include "qgen/qforge/generate.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <set>

using namespace qgen;
using namespace qgen::qforge;
using qgen::backend::BackendClient;
using qgen::backend::BackendConfig;

namespace {

chunkstore::StoredDocument sample_doc() {
  chunkstore::IngestOptions opts;
  opts.title = "biology_notes";
  const auto ing = chunkstore::ingest_manifest(testutil::sample_manifest(), opts);
  return {ing.document, ing.chunks, "2026-01-01T00:00:00.000Z"};
}

BackendClient mock_client(std::uint64_t seed) {
  BackendConfig cfg;
  cfg.seed = seed;
  return BackendClient(cfg);
}

GenerationSpec spec_of(const std::string& counts, std::uint64_t seed) {
  GenerationSpec s;
  s.counts = parse_type_counts(counts);
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("type counts and spec validation") {
  const auto c = parse_type_counts("mcq=2,tf=1,fitb=0,match=1,visual=3");
  CHECK(c.at(QType::mcq) == 2);
  CHECK(c.at(QType::truefalse) == 1);
  CHECK(c.at(QType::matching) == 1);
  CHECK(c.at(QType::visual) == 3);
  CHECK_THROWS_AS(parse_type_counts("essay=1"), ValidationError);
  CHECK_THROWS_AS(parse_type_counts("mcq=-1"), ValidationError);
  GenerationSpec s;
  s.candidates_per_item = 0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("one item of each text type from the sample document") {
  const auto doc = sample_doc();
  auto client = mock_client(42);
  const Quiz quiz = generate_quiz(doc, spec_of("mcq=1,tf=1,fitb=1,match=1", 7), client,
                                  {.created_at = "2026-01-01T00:00:00.000Z"});
  REQUIRE(quiz.items.size() == 4);
  std::set<QType> types;
  for (const auto& it : quiz.items) types.insert(it.qtype);
  CHECK(types == std::set<QType>{QType::mcq, QType::truefalse, QType::fitb, QType::matching});
  CHECK(quiz.shortfall.empty());
  CHECK(quiz.id == quiz_id_for(doc.document.id, quiz.spec));
}

TEST_CASE("generated quiz respects item invariants") {
  const auto doc = sample_doc();
  auto client = mock_client(42);
  const Quiz quiz = generate_quiz(doc, spec_of("mcq=2,tf=2,fitb=2,match=1,visual=2", 3), client);
  std::set<std::string> ids;
  for (const auto& it : quiz.items) {
    CHECK(ids.insert(it.id).second);
    CHECK(it.id.rfind(quiz.id + "-", 0) == 0);
    REQUIRE(!it.source_chunks.empty());
    for (const auto& cid : it.source_chunks) {
      const auto* c = doc.find_chunk(cid);
      REQUIRE(c != nullptr);
      CHECK(c->locator.render().find("page") == 0);
    }
    switch (it.qtype) {
      case QType::mcq:
        CHECK((it.options.size() == 4 || it.has_flag("degraded_options")));
        break;
      case QType::fitb: {
        const auto* c = doc.find_chunk(it.source_chunks[0]);
        const auto pos = it.stem.find(kBlank);
        REQUIRE(pos != std::string::npos);
        CHECK(it.stem.substr(0, pos) + std::get<std::string>(it.answer_key) +
                  it.stem.substr(pos + kBlank.size()) ==
              c->text);
        break;
      }
      case QType::matching: {
        const auto key = std::get<std::vector<std::size_t>>(it.answer_key);
        for (std::size_t i = 0; i < key.size(); ++i) CHECK(key[i] != i);
        break;
      }
      case QType::visual: {
        const auto* c = doc.find_chunk(it.source_chunks[0]);
        CHECK(c->image_ref.find("diagram") != std::string::npos);
        break;
      }
      case QType::truefalse:
        break;
    }
  }
}

TEST_CASE("generation is deterministic and seed-sensitive") {
  const auto doc = sample_doc();
  auto a = mock_client(42);
  auto b = mock_client(42);
  const GenerateOptions opts{.created_at = "2026-01-01T00:00:00.000Z"};
  const auto spec = spec_of("mcq=2,tf=2,fitb=2,match=1,visual=1", 7);
  const std::string q1 = serialize(generate_quiz(doc, spec, a, opts));
  const std::string q2 = serialize(generate_quiz(doc, spec, b, opts));
  CHECK(q1 == q2);
  const std::string q3 = serialize(generate_quiz(doc, spec_of("mcq=2,tf=2,fitb=2,match=1,visual=1", 8), a, opts));
  CHECK(q1 != q3);
  CHECK(quiz_from_json(ojson::parse(q1)).items.size() == quiz_from_json(ojson::parse(q3)).items.size());
}

TEST_CASE("serialization round-trips and hides keys on request") {
  const auto doc = sample_doc();
  auto client = mock_client(1);
  const Quiz quiz = generate_quiz(doc, spec_of("mcq=1,tf=1,fitb=1,match=1,visual=1", 2), client);
  const Quiz back = quiz_from_json(to_json(quiz));
  CHECK(serialize(back) == serialize(quiz));
  const ojson hidden = to_json(quiz, false);
  for (const auto& it : hidden["items"]) CHECK_FALSE(it.contains("answer_key"));
}

TEST_CASE("unmet counts are reported as shortfall") {
  const auto doc = sample_doc();
  auto client = mock_client(42);
  const Quiz quiz = generate_quiz(doc, spec_of("mcq=50,visual=5", 1), client);
  REQUIRE(quiz.shortfall.count(QType::mcq) == 1);
  CHECK(quiz.shortfall.at(QType::mcq) > 0);
  CHECK(quiz.shortfall.at(QType::visual) == 4);
  int mcq = 0;
  for (const auto& it : quiz.items) mcq += it.qtype == QType::mcq;
  CHECK(mcq + quiz.shortfall.at(QType::mcq) == 50);
}

TEST_CASE("reward filter keeps the highest-scoring candidate") {
  const auto doc = sample_doc();
  auto client = mock_client(42);
  GenerationSpec spec = spec_of("mcq=2,tf=2", 5);
  spec.candidates_per_item = 3;
  spec.reward_filter = true;
  const Quiz quiz = generate_quiz(doc, spec, client);
  REQUIRE(!quiz.items.empty());
  for (const auto& it : quiz.items) {
    const auto* c = doc.find_chunk(it.source_chunks[0]);
    double best = -1;
    std::string best_stem;
    for (int v = 0; v < 3; ++v) {
      backend::json req{{"context", c->text}};
      if (v > 0) req["variant"] = v;
      const auto r = backend::mock_respond(it.qtype == QType::mcq ? backend::Op::qa : backend::Op::boolq, req, 42);
      const std::string answer = it.qtype == QType::mcq ? r["answer"].get<std::string>()
                                                        : (r["answer"].get<bool>() ? "true" : "false");
      const double s = backend::mock_respond(
          backend::Op::reward, {{"context", c->text}, {"question", r["question"]}, {"answer", answer}}, 42)["score"];
      if (s > best) {
        best = s;
        best_stem = r["question"];
      }
    }
    REQUIRE(it.reward_score.has_value());
    CHECK(*it.reward_score == best);
    CHECK(it.stem == best_stem);
  }
}

TEST_CASE("document with only images yields visual items only") {
  const auto ing = chunkstore::ingest_manifest(
      "{\"kind\":\"pptx\",\"slide\":1,\"image_ref\":\"a_diagram.png\"}\n"
      "{\"kind\":\"pptx\",\"slide\":2,\"image_ref\":\"photo.png\"}\n");
  const chunkstore::StoredDocument doc{ing.document, ing.chunks, ""};
  auto client = mock_client(1);
  const Quiz quiz = generate_quiz(doc, spec_of("mcq=1,visual=2", 1), client);
  REQUIRE(quiz.items.size() == 1);
  CHECK(quiz.items[0].qtype == QType::visual);
  CHECK(quiz.items[0].locator == chunkstore::Locator::slide(1));
  CHECK(quiz.shortfall.at(QType::mcq) == 1);
  CHECK(quiz.shortfall.at(QType::visual) == 1);
}

TEST_CASE("backend embeddings can drive retrieval") {
  const auto doc = sample_doc();
  auto client = mock_client(42);
  const Quiz quiz = generate_quiz(doc, spec_of("mcq=1,tf=1", 1), client, {.created_at = "", .backend_embeddings = true});
  CHECK(quiz.items.size() == 2);
}
