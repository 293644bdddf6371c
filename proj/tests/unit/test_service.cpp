#include "qgen/server/config.hpp"
#include "qgen/server/service.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>

using namespace qgen;
using namespace qgen::server;
using qgen::qforge::QType;
using testutil::TempDir;

namespace {

qforge::QuestionItem make_item(const std::string& id, QType t, qforge::AnswerKey key) {
  qforge::QuestionItem it;
  it.id = id;
  it.qtype = t;
  it.stem = "stem";
  it.answer_key = std::move(key);
  if (t == QType::mcq) it.options = {"a", "b", "c", "d"};
  if (t == QType::matching) {
    it.matching.prompts = {"p0", "p1", "p2", "p3"};
    it.matching.answers = {"x", "y", "z", "w"};
  }
  return it;
}

qforge::Quiz toy_quiz() {
  qforge::Quiz q;
  q.id = "quiz";
  q.items = {
      make_item("quiz-000", QType::mcq, qforge::AnswerKey(std::in_place_type<std::size_t>, 2)),
      make_item("quiz-001", QType::truefalse, qforge::AnswerKey(std::in_place_type<bool>, true)),
      make_item("quiz-002", QType::fitb, qforge::AnswerKey(std::in_place_type<std::string>, "chloroplasts")),
      make_item("quiz-003", QType::matching,
                qforge::AnswerKey(std::in_place_type<std::vector<std::size_t>>, std::vector<std::size_t>{1, 0, 3, 2})),
  };
  return q;
}

}  // namespace

TEST_CASE("all-correct submission scores 1") {
  const auto r = grade_submission(toy_quiz(), {{"quiz-000", 2}, {"quiz-001", true}, {"quiz-002", "Chloroplasts "},
                                               {"quiz-003", {1, 0, 3, 2}}});
  CHECK(r.score == 1.0);
  for (const auto& g : r.items) CHECK(g.correct);
}

TEST_CASE("partial and wrong answers") {
  const auto r = grade_submission(toy_quiz(), {{"quiz-000", 1}, {"quiz-003", {1, 0, 2, 3}}});
  REQUIRE(r.items.size() == 4);
  CHECK_FALSE(r.items[0].correct);
  CHECK(r.items[1].given.is_null());
  CHECK(r.items[1].credit == 0.0);
  CHECK(r.items[3].credit == 0.5);
  CHECK_FALSE(r.items[3].correct);
  CHECK(r.score == doctest::Approx(0.125));
  CHECK(r.items[0].expected == 2);
}

TEST_CASE("type-mismatched or unknown answers are submission errors") {
  const auto q = toy_quiz();
  CHECK_THROWS_AS(grade_submission(q, {{"quiz-000", "two"}}), SubmissionError);
  CHECK_THROWS_AS(grade_submission(q, {{"quiz-000", 7}}), SubmissionError);
  CHECK_THROWS_AS(grade_submission(q, {{"quiz-001", 1}}), SubmissionError);
  CHECK_THROWS_AS(grade_submission(q, {{"quiz-002", 5}}), SubmissionError);
  CHECK_THROWS_AS(grade_submission(q, {{"quiz-003", {0, 0, 1, 2}}}), SubmissionError);
  CHECK_THROWS_AS(grade_submission(q, {{"quiz-003", {0, 1}}}), SubmissionError);
  CHECK_THROWS_AS(grade_submission(q, {{"quiz-999", 1}}), SubmissionError);
  CHECK_THROWS_AS(grade_submission(q, ojson::array()), SubmissionError);
}

TEST_CASE("config parsing, defaults and environment fallback") {
  TempDir tmp;
  const auto path = tmp.path() / "cfg.json";
  {
    std::ofstream out(path);
    out << R"({"store":"data","port":9000,"backend":{"mode":"remote","url":"http://x:1","retries":4},)"
        << R"("defaults":{"K":7,"k":2,"chunk_words":50}})";
  }
  const ServerConfig c = load_config(path);
  CHECK(c.store_root == tmp.path() / "data");
  CHECK(c.port == 9000);
  CHECK(c.backend.mode == backend::BackendConfig::Mode::remote);
  CHECK(c.backend.retries == 4);
  CHECK(c.default_K == 7);
  CHECK(c.default_k == 2);
  CHECK(c.chunking.target_words == 50);
  CHECK(config_from_json(to_json(c)).port == 9000);

  ::setenv("QGEN_CONFIG", path.c_str(), 1);
  CHECK(load_config().port == 9000);
  ::unsetenv("QGEN_CONFIG");
  CHECK(load_config().port == 8080);
  CHECK_THROWS_AS(config_from_json({{"port", -3}}), ValidationError);
  CHECK_THROWS_AS(load_config(tmp.path() / "missing.json"), IoError);
}

TEST_CASE("service pipeline end to end") {
  TempDir tmp;
  ServerConfig cfg;
  cfg.store_root = tmp.path();
  cfg.backend.seed = 42;
  Service svc(cfg);

  const auto up = svc.upload("Plants make sugar in leaves. Roots take up water from soil. Stems carry water upward.");
  CHECK(up.chunk_count >= 1);
  CHECK_THROWS_AS(svc.upload("Plants make sugar in leaves. Roots take up water from soil. Stems carry water upward."),
                  ConflictError);

  const auto spec = svc.spec_with_defaults({{"types", {{"mcq", 1}, {"truefalse", 1}}}, {"seed", 3}});
  CHECK(spec.K == cfg.default_K);
  const auto quiz = svc.generate(up.doc_id, spec);
  CHECK(std::filesystem::exists(svc.quiz_file(quiz)));
  const auto again = svc.generate(up.doc_id, spec);
  CHECK(qforge::serialize(again) == qforge::serialize(quiz));
  CHECK(qforge::serialize(svc.get_quiz(quiz.id)) == qforge::serialize(quiz));
  CHECK_THROWS_AS(svc.get_quiz("0000"), NotFoundError);
  CHECK_THROWS_AS(svc.generate("ffffffffffffffffffffffffffffffff", spec), NotFoundError);

  ojson answers = ojson::object();
  for (const auto& it : quiz.items) {
    if (it.qtype == QType::mcq) answers[it.id] = std::get<std::size_t>(it.answer_key);
    if (it.qtype == QType::truefalse) answers[it.id] = std::get<bool>(it.answer_key);
  }
  CHECK(svc.submit(quiz.id, answers).score == 1.0);
}

TEST_CASE("upload format detection") {
  TempDir tmp;
  ServerConfig cfg;
  cfg.store_root = tmp.path();
  Service svc(cfg);
  const auto m = svc.upload("{\"kind\":\"pdf\",\"page\":1,\"text\":\"A page.\"}\n");
  CHECK(svc.store().load_document(m.doc_id).document.kind == chunkstore::DocKind::pdf);
  const auto t = svc.upload("{not a manifest", UploadFormat::text);
  CHECK(svc.store().load_document(t.doc_id).document.kind == chunkstore::DocKind::plaintext);
  CHECK_THROWS_AS(svc.upload("{\"kind\":\"pdf\"}\n"), IngestError);
  CHECK_THROWS_AS(upload_format_from_string("pdf"), ValidationError);
}
