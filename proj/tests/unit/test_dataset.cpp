#include "qgen/evalkit/dataset.hpp"
#include "qgen/evalkit/report.hpp"

#include "testutil.hpp"

#include <doctest.h>

using namespace qgen;
using namespace qgen::evalkit;

namespace {

std::filesystem::path fx(const std::string& name) { return std::filesystem::path(QGEN_FIXTURE_DIR) / name; }

std::string location_of(std::string_view bytes, DatasetFormat f) {
  try {
    parse_qa_dataset(bytes, f, "mem");
  } catch (const DatasetError& e) {
    CHECK(e.path() == "mem");
    return e.location();
  }
  return "";
}

}  // namespace

TEST_CASE("squad file with one paragraph and two questions") {
  const auto ex = load_qa_dataset(fx("squad_ref.json"), DatasetFormat::squad_v1);
  REQUIRE(ex.size() == 2);
  CHECK(ex[0].id == "q1");
  CHECK(ex[1].id == "q2");
  CHECK(ex[0].context == ex[1].context);
  CHECK(answer_text(ex[0].reference_answer) == "in the chloroplasts");
}

TEST_CASE("boolq rows keep boolean answers") {
  const auto ex = load_qa_dataset(fx("boolq.jsonl"), DatasetFormat::boolq_jsonl);
  REQUIRE(ex.size() == 2);
  CHECK(std::get<bool>(ex[0].reference_answer) == true);
  CHECK(std::get<bool>(ex[1].reference_answer) == false);
  CHECK(ex[0].id == "0");
  CHECK(ex[1].id == "1");
  CHECK(answer_text(ex[1].reference_answer) == "false");
}

TEST_CASE("pairs jsonl") {
  const auto ex = load_qa_dataset(fx("pairs_ref.jsonl"), DatasetFormat::pairs_jsonl);
  CHECK(ex.size() >= 20);
  CHECK(ex[0].id == "p0");
}

TEST_CASE("dataset errors carry a location and return nothing partial") {
  CHECK(location_of("{\"version\":\"1\",\"data\":[", DatasetFormat::squad_v1).rfind("byte ", 0) == 0);
  CHECK(location_of("{\"data\":[{\"paragraphs\":[{\"context\":\"c\",\"qas\":[{\"question\":\"\"}]}]}]}",
                    DatasetFormat::squad_v1) == "/data/0/paragraphs/0/qas/0");
  CHECK(location_of("{\"question\":\"q\",\"passage\":\"p\",\"answer\":true}\n{\"question\":\"q\",",
                    DatasetFormat::boolq_jsonl) == "line 2");
  CHECK(location_of("{\"question\":\"q\",\"passage\":\"p\",\"answer\":\"yes\"}\n",
                    DatasetFormat::boolq_jsonl) == "line 1/answer");
  CHECK(location_of("{\"context\":\"c\",\"answer\":\"a\"}\n", DatasetFormat::pairs_jsonl) == "line 1");
  CHECK_THROWS_AS(dataset_format_from_string("csv"), ValidationError);
  CHECK(dataset_format_from_string("squad_v1") == DatasetFormat::squad_v1);
  CHECK_THROWS_AS(load_qa_dataset(fx("does_not_exist.json"), DatasetFormat::squad_v1), IoError);
}

TEST_CASE("evaluate_run: identical predictions score 1 in both columns") {
  const auto refs = load_qa_dataset(fx("pairs_ref.jsonl"), DatasetFormat::pairs_jsonl);
  const auto r = evaluate_run(predictions_from(refs), refs);
  CHECK(r.questions.bleu4 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.questions.rouge_l_f1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.answers.rouge_l_f1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evaluate_run aligns by id and reports mismatches") {
  const auto refs = load_qa_dataset(fx("squad_ref.json"), DatasetFormat::squad_v1);
  auto preds = predictions_from(load_qa_dataset(fx("squad_pred.json"), DatasetFormat::squad_v1));
  std::reverse(preds.begin(), preds.end());
  const auto r = evaluate_run(preds, refs);
  CHECK(r.questions.n_examples == 2);
  CHECK(r.questions.rouge_l_f1 < 1.0);

  preds.pop_back();
  preds.push_back({"zz", "q", "a"});
  try {
    evaluate_run(preds, refs);
    FAIL("expected AlignmentError");
  } catch (const AlignmentError& e) {
    CHECK(e.kind() == ErrorKind::alignment);
    CHECK(e.missing().size() == 1);
    CHECK(e.unknown() == std::vector<std::string>{"zz"});
  }
  auto dup = predictions_from(refs);
  dup.push_back(dup.front());
  CHECK_THROWS_AS(evaluate_run(dup, refs), ValidationError);
}

TEST_CASE("report shapes") {
  const auto refs = load_qa_dataset(fx("squad_ref.json"), DatasetFormat::squad_v1);
  const auto preds = predictions_from(load_qa_dataset(fx("squad_pred.json"), DatasetFormat::squad_v1));
  const auto before = evaluate_run(preds, refs);
  const auto after = evaluate_run(predictions_from(refs), refs);
  const std::string table = render_table(before);
  CHECK(table.find("Metric") != std::string::npos);
  CHECK(table.find("Generated Questions") != std::string::npos);
  CHECK(table.find("Generated Answers") != std::string::npos);
  CHECK(table.find("BLEU-4") != std::string::npos);
  CHECK(table.find("ROUGE-L") != std::string::npos);

  const auto j = to_json(before);
  CHECK(j.contains("questions"));
  CHECK(j["answers"].contains("bleu4"));
  const auto cmp = comparison_json(before, after);
  const std::string text = render_comparison(before, after);
  CHECK(text.find("Questions Before RL") != std::string::npos);
  CHECK(text.find("Answers After RL") != std::string::npos);
  CHECK(cmp.dump().find("questions_before") != std::string::npos);
}
