#pragma once

#include "qgen/chunkstore/store.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace qgen::feedback {

using ojson = nlohmann::ordered_json;

inline constexpr int kMinRating = 1;
inline constexpr int kMaxRating = 5;

struct FeedbackRecord {
  std::string question_id;
  std::string qtype;
  std::string context;   // source chunk text at rating time
  std::string question;
  std::string answer;
  int rating = 0;        // 1..5
  std::string rater_session;
  std::string timestamp; // UTC, RFC 3339

  bool operator==(const FeedbackRecord&) const = default;
};

ojson to_json(const FeedbackRecord& r);
FeedbackRecord record_from_json(const ojson& j);  // throws ValidationError

// One exported training line: {"context","question","answer","rating"}.
struct TrainingRow {
  std::string context;
  std::string question;
  std::string answer;
  int rating = 0;
  bool operator==(const TrainingRow&) const = default;
};
ojson to_json(const TrainingRow& r);
TrainingRow training_row_from_json(const ojson& j);

// The stored item a rating refers to, resolved through the quiz files.
struct QuestionSnapshot {
  std::string question_id;
  std::string qtype;
  std::string context;
  std::string question;
  std::string answer;
};

// Question ids have the form "<quiz id>-<index>". Throws NotFoundError.
QuestionSnapshot snapshot_question(const chunkstore::Store& store, const std::string& question_id);

void validate_rating(int rating);  // throws ValidationError

// Append-only JSON-Lines log. Appends take a process mutex plus an advisory
// file lock and land as a single write, so a reader sees a prefix of whole
// records, possibly followed by one partial line, which is ignored.
class FeedbackStore {
 public:
  explicit FeedbackStore(std::filesystem::path file);

  const std::filesystem::path& path() const noexcept { return file_; }

  void append(const FeedbackRecord& rec);

  // Every record in file order.
  std::vector<FeedbackRecord> read_all() const;
  // One record per (rater_session, question_id), the last one appended,
  // ordered by (timestamp, question_id).
  std::vector<FeedbackRecord> latest() const;

 private:
  std::filesystem::path file_;
  std::mutex mutex_;
};

// Validates the rating, snapshots the item and appends. An empty timestamp
// means now.
FeedbackRecord record_rating(const chunkstore::Store& store, FeedbackStore& log,
                             const std::string& question_id, int rating,
                             const std::string& session, const std::string& timestamp = {});

struct ExportResult {
  std::string ndjson;
  std::size_t count = 0;
  std::optional<std::string> warning;  // set when count < min_records
};

ExportResult export_training_set(const FeedbackStore& log, std::size_t min_records = 0);

struct RatingSummary {
  std::array<std::size_t, 5> counts{};  // counts[i] = number of ratings equal to i + 1
  std::size_t total = 0;
  std::optional<double> mean;           // absent when total = 0
};

struct FeedbackStats {
  RatingSummary overall;
  std::map<std::string, RatingSummary> by_qtype;
};

FeedbackStats feedback_stats(const FeedbackStore& log);
ojson to_json(const FeedbackStats& s);

}  // namespace qgen::feedback
