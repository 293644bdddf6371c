#include "qgen/feedback/feedback.hpp"

#include "qgen/common/error.hpp"
#include "qgen/common/text.hpp"
#include "qgen/qforge/question.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace qgen::feedback {

namespace fs = std::filesystem;

ojson to_json(const FeedbackRecord& r) {
  ojson j;
  j["question_id"] = r.question_id;
  j["qtype"] = r.qtype;
  j["context"] = r.context;
  j["question"] = r.question;
  j["answer"] = r.answer;
  j["rating"] = r.rating;
  j["rater_session"] = r.rater_session;
  j["timestamp"] = r.timestamp;
  return j;
}

FeedbackRecord record_from_json(const ojson& j) {
  FeedbackRecord r;
  try {
    r.question_id = j.at("question_id").get<std::string>();
    r.qtype = j.value("qtype", "");
    r.context = j.at("context").get<std::string>();
    r.question = j.at("question").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
    r.rating = j.at("rating").get<int>();
    r.rater_session = j.at("rater_session").get<std::string>();
    r.timestamp = j.at("timestamp").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid feedback record: ") + e.what());
  }
  validate_rating(r.rating);
  return r;
}

ojson to_json(const TrainingRow& r) {
  ojson j;
  j["context"] = r.context;
  j["question"] = r.question;
  j["answer"] = r.answer;
  j["rating"] = r.rating;
  return j;
}

TrainingRow training_row_from_json(const ojson& j) {
  TrainingRow r;
  try {
    r.context = j.at("context").get<std::string>();
    r.question = j.at("question").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
    r.rating = j.at("rating").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid training row: ") + e.what());
  }
  validate_rating(r.rating);
  return r;
}

void validate_rating(int rating) {
  if (rating < kMinRating || rating > kMaxRating) {
    throw ValidationError("rating must be an integer from 1 to 5, got " + std::to_string(rating));
  }
}

QuestionSnapshot snapshot_question(const chunkstore::Store& store, const std::string& question_id) {
  const auto dash = question_id.rfind('-');
  if (dash == std::string::npos || dash == 0) {
    throw NotFoundError("no such question '" + question_id + "'");
  }
  const auto found = store.find_quiz(question_id.substr(0, dash));
  if (!found) throw NotFoundError("no such question '" + question_id + "'");
  const qforge::Quiz quiz = qforge::quiz_from_json(qforge::ojson::parse(found->second));
  const qforge::QuestionItem* item = quiz.find_item(question_id);
  if (!item) throw NotFoundError("no such question '" + question_id + "'");

  const chunkstore::StoredDocument doc = store.load_document(found->first);
  std::vector<std::string> parts;
  for (const auto& cid : item->source_chunks) {
    if (const chunkstore::Chunk* c = doc.find_chunk(cid)) {
      parts.push_back(c->is_text() ? c->text : c->image_ref);
    }
  }

  QuestionSnapshot s;
  s.question_id = question_id;
  s.qtype = std::string(qforge::to_string(item->qtype));
  s.context = text::join(parts, "\n\n");
  s.question = item->stem;
  if (item->qtype == qforge::QType::matching) {
    s.question += "\n" + text::join(item->matching.prompts, "\n");
  }
  s.answer = item->answer_text();
  return s;
}

FeedbackStore::FeedbackStore(fs::path file) : file_(std::move(file)) {}

void FeedbackStore::append(const FeedbackRecord& rec) {
  validate_rating(rec.rating);
  if (rec.question.empty()) throw ValidationError("feedback record has an empty question");
  const std::string line = to_json(rec).dump() + "\n";

  std::lock_guard<std::mutex> g(mutex_);
  if (file_.has_parent_path()) fs::create_directories(file_.parent_path());
  const int fd = ::open(file_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError("cannot open " + file_.string() + ": " + std::strerror(errno));
  if (::flock(fd, LOCK_EX) != 0) {
    ::close(fd);
    throw IoError("cannot lock " + file_.string() + ": " + std::strerror(errno));
  }
  std::size_t done = 0;
  while (done < line.size()) {
    const ssize_t n = ::write(fd, line.data() + done, line.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::flock(fd, LOCK_UN);
      ::close(fd);
      throw IoError("cannot append to " + file_.string() + ": " + std::strerror(err));
    }
    done += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::flock(fd, LOCK_UN);
  ::close(fd);
}

std::vector<FeedbackRecord> FeedbackStore::read_all() const {
  std::vector<FeedbackRecord> out;
  if (!fs::exists(file_)) return out;
  const std::string bytes = chunkstore::read_file(file_);
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < bytes.size()) {
    const std::size_t end = bytes.find('\n', start);
    if (end == std::string::npos) break;  // partial trailing line from an in-flight append
    ++line_no;
    const std::string_view line(bytes.data() + start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(record_from_json(ojson::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(file_.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<FeedbackRecord> FeedbackStore::latest() const {
  std::map<std::pair<std::string, std::string>, FeedbackRecord> last;
  for (auto& r : read_all()) {
    last[{r.rater_session, r.question_id}] = std::move(r);
  }
  std::vector<FeedbackRecord> out;
  out.reserve(last.size());
  for (auto& [_, r] : last) out.push_back(std::move(r));
  std::stable_sort(out.begin(), out.end(), [](const FeedbackRecord& a, const FeedbackRecord& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    if (a.question_id != b.question_id) return a.question_id < b.question_id;
    return a.rater_session < b.rater_session;
  });
  return out;
}

FeedbackRecord record_rating(const chunkstore::Store& store, FeedbackStore& log,
                             const std::string& question_id, int rating,
                             const std::string& session, const std::string& timestamp) {
  validate_rating(rating);
  if (session.empty()) throw ValidationError("rater session must be non-empty");
  const QuestionSnapshot s = snapshot_question(store, question_id);
  FeedbackRecord rec;
  rec.question_id = s.question_id;
  rec.qtype = s.qtype;
  rec.context = s.context;
  rec.question = s.question;
  rec.answer = s.answer;
  rec.rating = rating;
  rec.rater_session = session;
  rec.timestamp = timestamp.empty() ? text::utc_now_rfc3339() : timestamp;
  log.append(rec);
  return rec;
}

ExportResult export_training_set(const FeedbackStore& log, std::size_t min_records) {
  ExportResult out;
  for (const auto& r : log.latest()) {
    out.ndjson += to_json(TrainingRow{r.context, r.question, r.answer, r.rating}).dump() + "\n";
    ++out.count;
  }
  if (out.count < min_records) {
    out.warning = "only " + std::to_string(out.count) + " feedback records, fewer than the " +
                  std::to_string(min_records) + " requested";
  }
  return out;
}

namespace {

void add(RatingSummary& s, int rating) {
  ++s.counts[static_cast<std::size_t>(rating - 1)];
  ++s.total;
}

void finish(RatingSummary& s) {
  if (s.total == 0) return;
  double sum = 0.0;
  for (std::size_t i = 0; i < s.counts.size(); ++i) sum += static_cast<double>((i + 1) * s.counts[i]);
  s.mean = sum / static_cast<double>(s.total);
}

ojson summary_json(const RatingSummary& s) {
  ojson counts = ojson::object();
  for (std::size_t i = 0; i < s.counts.size(); ++i) counts[std::to_string(i + 1)] = s.counts[i];
  ojson j;
  j["counts"] = counts;
  j["total"] = s.total;
  if (s.mean) j["mean"] = *s.mean;
  return j;
}

}  // namespace

FeedbackStats feedback_stats(const FeedbackStore& log) {
  FeedbackStats s;
  for (const auto& r : log.latest()) {
    add(s.overall, r.rating);
    add(s.by_qtype[r.qtype.empty() ? "unknown" : r.qtype], r.rating);
  }
  finish(s.overall);
  for (auto& [_, v] : s.by_qtype) finish(v);
  return s;
}

ojson to_json(const FeedbackStats& s) {
  ojson j = summary_json(s.overall);
  ojson by = ojson::object();
  for (const auto& [t, v] : s.by_qtype) by[t] = summary_json(v);
  j["by_qtype"] = by;
  return j;
}

}  // namespace qgen::feedback
