#include "qgen/feedback/feedback.hpp"
#include "qgen/server/service.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <fstream>
#include <thread>

using namespace qgen;
using namespace qgen::feedback;
using testutil::TempDir;

namespace {

struct Fixture {
  TempDir tmp;
  server::Service svc;
  qforge::Quiz quiz;

  Fixture() : svc(config(tmp.path())) {
    const auto up = svc.upload(testutil::sample_manifest(), server::UploadFormat::manifest, "bio",
                               testutil::sample_dir());
    qforge::GenerationSpec spec;
    spec.counts = qforge::parse_type_counts("mcq=1,tf=1,fitb=1,match=1");
    spec.seed = 7;
    quiz = svc.generate(up.doc_id, spec);
  }

  static server::ServerConfig config(const std::filesystem::path& root) {
    server::ServerConfig c;
    c.store_root = root / "store";
    c.backend.seed = 42;
    return c;
  }

  const qforge::QuestionItem& item(qforge::QType t) const {
    for (const auto& it : quiz.items) {
      if (it.qtype == t) return it;
    }
    throw std::runtime_error("no item of that type");
  }
};

FeedbackRecord rec(const std::string& qid, int rating, const std::string& session, const std::string& ts) {
  FeedbackRecord r;
  r.question_id = qid;
  r.qtype = "mcq";
  r.context = "ctx " + qid;
  r.question = "q " + qid;
  r.answer = "a";
  r.rating = rating;
  r.rater_session = session;
  r.timestamp = ts;
  return r;
}

}  // namespace

TEST_CASE("rating an existing item snapshots context, question and answer") {
  Fixture f;
  const auto& mcq = f.item(qforge::QType::mcq);
  const FeedbackRecord r = f.svc.rate(mcq.id, 5, "s1");
  CHECK(r.rating == 5);
  CHECK(r.question_id == mcq.id);
  CHECK(r.qtype == "mcq");
  CHECK(r.question == mcq.stem);
  CHECK(r.answer == mcq.answer_text());
  const auto doc = f.svc.store().load_document(f.quiz.doc_id);
  CHECK(r.context == doc.find_chunk(mcq.source_chunks[0])->text);
  CHECK(r.timestamp.size() == 24);
  CHECK(f.svc.feedback_log().read_all() == std::vector<FeedbackRecord>{r});
}

TEST_CASE("rating validation and unknown questions") {
  Fixture f;
  const auto& mcq = f.item(qforge::QType::mcq);
  CHECK_THROWS_AS(f.svc.rate(mcq.id, 0, "s"), ValidationError);
  CHECK_THROWS_AS(f.svc.rate(mcq.id, 6, "s"), ValidationError);
  CHECK_THROWS_AS(f.svc.rate(mcq.id, 3, ""), ValidationError);
  CHECK_THROWS_AS(f.svc.rate(f.quiz.id + "-999", 3, "s"), NotFoundError);
  CHECK_THROWS_AS(f.svc.rate("nonsense", 3, "s"), NotFoundError);
  CHECK(f.svc.feedback_log().read_all().empty());
}

TEST_CASE("latest rating per session wins") {
  Fixture f;
  const auto& tf = f.item(qforge::QType::truefalse);
  f.svc.rate(tf.id, 3, "s1");
  f.svc.rate(tf.id, 4, "s1");
  f.svc.rate(tf.id, 2, "s2");
  const auto latest = f.svc.feedback_log().latest();
  REQUIRE(latest.size() == 2);
  int s1 = 0;
  for (const auto& r : latest) {
    if (r.rater_session == "s1") s1 = r.rating;
  }
  CHECK(s1 == 4);
  CHECK(f.svc.feedback_log().read_all().size() == 3);
  const auto ex = f.svc.export_feedback();
  CHECK(ex.count == 2);
}

TEST_CASE("export: empty store warns, lines round-trip, export never mutates") {
  Fixture f;
  const auto empty = f.svc.export_feedback(1);
  CHECK(empty.ndjson.empty());
  CHECK(empty.count == 0);
  CHECK(empty.warning.has_value());

  for (const auto& it : f.quiz.items) f.svc.rate(it.id, 4, "s");
  const std::string before = chunkstore::read_file(f.svc.feedback_log().path());
  const auto ex = f.svc.export_feedback(2);
  CHECK_FALSE(ex.warning.has_value());
  CHECK(ex.count == f.quiz.items.size());
  CHECK(chunkstore::read_file(f.svc.feedback_log().path()) == before);

  std::istringstream lines(ex.ndjson);
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto j = ojson::parse(line);
    CHECK(j.size() == 4);
    const TrainingRow row = training_row_from_json(j);
    CHECK(row.rating >= 1);
    CHECK(row.rating <= 5);
    CHECK(!row.question.empty());
    CHECK(to_json(row) == j);
    ++n;
  }
  CHECK(n == ex.count);
}

TEST_CASE("export order is by timestamp then question id") {
  TempDir tmp;
  FeedbackStore log(tmp.path() / "f.jsonl");
  log.append(rec("b", 3, "s", "2026-01-02T00:00:00.000Z"));
  log.append(rec("a", 4, "s", "2026-01-02T00:00:00.000Z"));
  log.append(rec("c", 5, "s", "2026-01-01T00:00:00.000Z"));
  const auto latest = log.latest();
  REQUIRE(latest.size() == 3);
  CHECK(latest[0].question_id == "c");
  CHECK(latest[1].question_id == "a");
  CHECK(latest[2].question_id == "b");
}

TEST_CASE("stats: histogram, mean and per-qtype split") {
  TempDir tmp;
  FeedbackStore log(tmp.path() / "f.jsonl");
  CHECK_FALSE(feedback_stats(log).overall.mean.has_value());
  auto r1 = rec("q1", 5, "s", "2026-01-01T00:00:00.000Z");
  auto r2 = rec("q2", 5, "s", "2026-01-01T00:00:01.000Z");
  auto r3 = rec("q3", 3, "s", "2026-01-01T00:00:02.000Z");
  r3.qtype = "fitb";
  log.append(r1);
  log.append(r2);
  log.append(r3);
  const auto s = feedback_stats(log);
  CHECK(s.overall.total == 3);
  CHECK(s.overall.counts[4] == 2);
  CHECK(s.overall.counts[2] == 1);
  CHECK(*s.overall.mean == doctest::Approx(13.0 / 3.0).epsilon(1e-15));
  std::size_t sum = 0;
  for (const auto& [_, sub] : s.by_qtype) sum += sub.total;
  CHECK(sum == s.overall.total);
  CHECK(s.by_qtype.at("fitb").total == 1);
  const auto j = to_json(s);
  CHECK(j["total"] == 3);
  CHECK(j["by_qtype"].contains("fitb"));
}

TEST_CASE("a partial trailing line is ignored") {
  TempDir tmp;
  FeedbackStore log(tmp.path() / "f.jsonl");
  log.append(rec("q1", 2, "s", "2026-01-01T00:00:00.000Z"));
  {
    std::ofstream out(log.path(), std::ios::app | std::ios::binary);
    out << "{\"question_id\":\"q2\",\"rat";
  }
  CHECK(log.read_all().size() == 1);
}

TEST_CASE("concurrent appends and reads see whole records") {
  TempDir tmp;
  FeedbackStore log(tmp.path() / "f.jsonl");
  std::atomic<bool> done{false};
  std::atomic<bool> bad{false};
  std::thread reader([&] {
    while (!done) {
      for (const auto& r : log.read_all()) {
        if (r.rating < 1 || r.rating > 5) bad = true;
      }
    }
  });
  std::vector<std::thread> writers;
  for (int w = 0; w < 4; ++w) {
    writers.emplace_back([&, w] {
      for (int i = 0; i < 50; ++i) {
        log.append(rec("q" + std::to_string(i), 1 + (i % 5), "s" + std::to_string(w),
                       "2026-01-01T00:00:00.000Z"));
      }
    });
  }
  for (auto& t : writers) t.join();
  done = true;
  reader.join();
  CHECK_FALSE(bad);
  CHECK(log.read_all().size() == 200);
  CHECK(log.latest().size() == 200);
}

TEST_CASE("snapshots survive regeneration of the quiz") {
  Fixture f;
  const auto& mcq = f.item(qforge::QType::mcq);
  f.svc.rate(mcq.id, 2, "s");
  const std::string before = chunkstore::read_file(f.svc.feedback_log().path());
  qforge::GenerationSpec spec = f.quiz.spec;
  f.svc.generate(f.quiz.doc_id, spec);
  CHECK(chunkstore::read_file(f.svc.feedback_log().path()) == before);
}
