#include "qgen/server/service.hpp"

#include "qgen/chunkstore/ingest.hpp"
#include "qgen/common/text.hpp"
#include "qgen/qforge/generate.hpp"

#include <set>

namespace qgen::server {

namespace fs = std::filesystem;
using qforge::QType;

namespace {

ojson expected_json(const qforge::QuestionItem& item) {
  ojson j;
  std::visit([&](const auto& v) { j = v; }, item.answer_key);
  return j;
}

ItemGrade grade_item(const qforge::QuestionItem& item, const ojson& given) {
  ItemGrade g;
  g.question_id = item.id;
  g.qtype = std::string(qforge::to_string(item.qtype));
  g.expected = expected_json(item);
  g.given = given;
  if (given.is_null()) return g;

  auto mismatch = [&](const std::string& want) {
    return SubmissionError("answer for " + item.id + " (" + g.qtype + ") must be " + want);
  };
  switch (item.qtype) {
    case QType::mcq: {
      if (!given.is_number_integer()) throw mismatch("an option index");
      const auto idx = given.get<long long>();
      if (idx < 0 || static_cast<std::size_t>(idx) >= item.options.size()) {
        throw mismatch("an option index below " + std::to_string(item.options.size()));
      }
      g.correct = static_cast<std::size_t>(idx) == std::get<std::size_t>(item.answer_key);
      break;
    }
    case QType::truefalse:
      if (!given.is_boolean()) throw mismatch("a boolean");
      g.correct = given.get<bool>() == std::get<bool>(item.answer_key);
      break;
    case QType::fitb:
    case QType::visual:
      if (!given.is_string()) throw mismatch("a string");
      g.correct = text::normalize_answer(given.get<std::string>()) ==
                  text::normalize_answer(std::get<std::string>(item.answer_key));
      break;
    case QType::matching: {
      const auto& key = std::get<std::vector<std::size_t>>(item.answer_key);
      const std::string want = "a permutation of 0.." + std::to_string(key.size() - 1);
      if (!given.is_array() || given.size() != key.size()) throw mismatch(want);
      std::set<long long> seen;
      std::size_t placed = 0;
      for (std::size_t i = 0; i < key.size(); ++i) {
        if (!given[i].is_number_integer()) throw mismatch(want);
        const auto v = given[i].get<long long>();
        if (v < 0 || static_cast<std::size_t>(v) >= key.size() || !seen.insert(v).second) {
          throw mismatch(want);
        }
        if (static_cast<std::size_t>(v) == key[i]) ++placed;
      }
      g.credit = static_cast<double>(placed) / static_cast<double>(key.size());
      g.correct = placed == key.size();
      return g;
    }
  }
  g.credit = g.correct ? 1.0 : 0.0;
  return g;
}

}  // namespace

GradeReport grade_submission(const qforge::Quiz& quiz, const ojson& answers) {
  if (!answers.is_object()) throw SubmissionError("answers must be an object keyed by question id");
  for (const auto& [qid, _] : answers.items()) {
    if (!quiz.find_item(qid)) {
      throw SubmissionError("question " + qid + " is not part of quiz " + quiz.id);
    }
  }
  GradeReport r;
  r.quiz_id = quiz.id;
  double sum = 0.0;
  for (const auto& item : quiz.items) {
    const ojson given = answers.contains(item.id) ? answers[item.id] : ojson();
    r.items.push_back(grade_item(item, given));
    sum += r.items.back().credit;
  }
  r.score = quiz.items.empty() ? 0.0 : sum / static_cast<double>(quiz.items.size());
  return r;
}

ojson to_json(const GradeReport& r) {
  ojson items = ojson::array();
  for (const auto& g : r.items) {
    ojson j;
    j["question_id"] = g.question_id;
    j["qtype"] = g.qtype;
    j["correct"] = g.correct;
    j["credit"] = g.credit;
    j["expected"] = g.expected;
    j["given"] = g.given;
    items.push_back(std::move(j));
  }
  ojson j;
  j["quiz_id"] = r.quiz_id;
  j["score"] = r.score;
  j["items"] = std::move(items);
  return j;
}

UploadFormat upload_format_from_string(std::string_view name) {
  if (name == "detect" || name == "auto") return UploadFormat::detect;
  if (name == "manifest") return UploadFormat::manifest;
  if (name == "text") return UploadFormat::text;
  throw ValidationError("unknown upload format '" + std::string(name) + "' (manifest or text)");
}

Service::Service(ServerConfig config, std::unique_ptr<backend::BackendClient> client)
    : config_(std::move(config)),
      store_(config_.store_root),
      feedback_(store_.feedback_path()),
      client_(std::move(client)) {
  config_.validate();
  if (config_.stopwords_path) tfidf_.stopwords = keyterm::load_stopwords(*config_.stopwords_path);
  if (!client_) client_ = std::make_unique<backend::BackendClient>(config_.backend);
}

UploadResult Service::upload(std::string_view bytes, UploadFormat format, const std::string& title,
                             const std::optional<fs::path>& image_base) {
  if (format == UploadFormat::detect) {
    const auto first = bytes.find_first_not_of(" \t\r\n");
    format = first != std::string_view::npos && bytes[first] == '{' ? UploadFormat::manifest
                                                                    : UploadFormat::text;
  }
  chunkstore::IngestOptions opts;
  opts.title = title;
  opts.chunking = config_.chunking;
  const chunkstore::Ingested ing = format == UploadFormat::manifest
                                       ? chunkstore::ingest_manifest(bytes, opts)
                                       : chunkstore::ingest_plaintext(bytes, opts);
  store_.put_document(ing.document, ing.chunks, image_base);
  return {ing.document.id, ing.chunks.size()};
}

qforge::GenerationSpec Service::spec_with_defaults(const ojson& spec_json) const {
  ojson j = spec_json.is_null() ? ojson::object() : spec_json;
  if (!j.is_object()) throw ValidationError("generation spec must be a JSON object");
  if (!j.contains("K")) j["K"] = config_.default_K;
  if (!j.contains("k")) j["k"] = config_.default_k;
  return qforge::spec_from_json(j);
}

qforge::Quiz Service::generate(const std::string& doc_id, const qforge::GenerationSpec& spec,
                               const std::string& created_at) {
  if (!store_.has_document(doc_id)) throw NotFoundError("no such document '" + doc_id + "'");
  const chunkstore::StoredDocument doc = store_.load_document(doc_id);

  qforge::GenerateOptions opts;
  opts.backend_embeddings = config_.backend_embeddings;
  opts.created_at = created_at.empty() ? text::utc_now_rfc3339() : created_at;
  const std::string quiz_id = qforge::quiz_id_for(doc_id, spec);
  if (auto existing = store_.read_quiz(doc_id, quiz_id)) {
    try {
      opts.created_at = qforge::ojson::parse(*existing).value("created_at", opts.created_at);
    } catch (const nlohmann::json::exception&) {
      // An unreadable previous file is simply replaced.
    }
  }

  qforge::Quiz quiz = qforge::generate_quiz(doc, spec, *client_, opts, tfidf_);
  store_.put_quiz(doc_id, quiz.id, qforge::serialize(quiz));
  return quiz;
}

qforge::Quiz Service::get_quiz(const std::string& quiz_id) const {
  const auto found = store_.find_quiz(quiz_id);
  if (!found) throw NotFoundError("no such quiz '" + quiz_id + "'");
  try {
    return qforge::quiz_from_json(qforge::ojson::parse(found->second));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("stored quiz " + quiz_id + " is unreadable: " + e.what());
  }
}

fs::path Service::quiz_file(const qforge::Quiz& quiz) const {
  return store_.quiz_path(quiz.doc_id, quiz.id);
}

GradeReport Service::submit(const std::string& quiz_id, const ojson& answers) const {
  return grade_submission(get_quiz(quiz_id), answers);
}

feedback::FeedbackRecord Service::rate(const std::string& question_id, int stars,
                                       const std::string& session) {
  return feedback::record_rating(store_, feedback_, question_id, stars, session);
}

feedback::ExportResult Service::export_feedback(std::size_t min_records) const {
  return feedback::export_training_set(feedback_, min_records);
}

feedback::FeedbackStats Service::feedback_stats() const {
  return feedback::feedback_stats(feedback_);
}

}  // namespace qgen::server
