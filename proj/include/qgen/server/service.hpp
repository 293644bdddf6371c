#pragma once

#include "qgen/backend/client.hpp"
#include "qgen/chunkstore/store.hpp"
#include "qgen/feedback/feedback.hpp"
#include "qgen/keyterm/tfidf.hpp"
#include "qgen/qforge/question.hpp"
#include "qgen/server/config.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qgen::server {

// A submitted answer has the wrong JSON type for its item, or names an item
// that is not in the quiz.
class SubmissionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct ItemGrade {
  std::string question_id;
  std::string qtype;
  bool correct = false;
  double credit = 0.0;  // matching: fraction placed correctly; otherwise 0 or 1
  ojson expected;
  ojson given;          // null when unanswered
};

struct GradeReport {
  std::string quiz_id;
  std::vector<ItemGrade> items;
  double score = 0.0;  // mean credit over all quiz items
};

// answers: {question_id: mcq index | bool | string | permutation}.
// mcq by index, truefalse by bool, fitb and visual by normalize_answer,
// matching per slot with partial credit. Unanswered items earn 0.
GradeReport grade_submission(const qforge::Quiz& quiz, const ojson& answers);
ojson to_json(const GradeReport& r);

enum class UploadFormat { detect, manifest, text };
UploadFormat upload_format_from_string(std::string_view name);

struct UploadResult {
  std::string doc_id;
  std::size_t chunk_count = 0;
};

// Pipeline operations over one store. Thread-safe: the store serializes
// writers per document and the feedback log serializes appends.
class Service {
 public:
  explicit Service(ServerConfig config, std::unique_ptr<backend::BackendClient> client = nullptr);

  const ServerConfig& config() const noexcept { return config_; }
  chunkstore::Store& store() noexcept { return store_; }
  feedback::FeedbackStore& feedback_log() noexcept { return feedback_; }
  backend::BackendClient& backend() noexcept { return *client_; }

  // detect: JSON-Lines manifest when the first non-blank byte is '{', else text.
  // image_base: directory image_ref paths are resolved against.
  UploadResult upload(std::string_view bytes, UploadFormat format = UploadFormat::detect,
                       const std::string& title = {},
                       const std::optional<std::filesystem::path>& image_base = std::nullopt);

  // Fills K and k from the config defaults when the JSON spec omits them.
  qforge::GenerationSpec spec_with_defaults(const ojson& spec_json) const;

  // Generates and persists. Regenerating an existing quiz id keeps the stored
  // created_at, so identical inputs rewrite identical bytes. A non-empty
  // created_at pins the timestamp of a new quiz.
  qforge::Quiz generate(const std::string& doc_id, const qforge::GenerationSpec& spec,
                        const std::string& created_at = {});

  qforge::Quiz get_quiz(const std::string& quiz_id) const;  // NotFoundError
  std::filesystem::path quiz_file(const qforge::Quiz& quiz) const;

  GradeReport submit(const std::string& quiz_id, const ojson& answers) const;

  feedback::FeedbackRecord rate(const std::string& question_id, int stars,
                                const std::string& session);
  feedback::ExportResult export_feedback(std::size_t min_records = 0) const;
  feedback::FeedbackStats feedback_stats() const;

 private:
  ServerConfig config_;
  chunkstore::Store store_;
  feedback::FeedbackStore feedback_;
  keyterm::TfIdfConfig tfidf_;
  std::unique_ptr<backend::BackendClient> client_;
};

}  // namespace qgen::server
