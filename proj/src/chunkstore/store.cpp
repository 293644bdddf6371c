#include "qgen/chunkstore/store.hpp"

#include "qgen/common/error.hpp"
#include "qgen/common/text.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace fs = std::filesystem;

namespace qgen::chunkstore {

namespace {

bool is_safe_id(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id) {
    const bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

void require_safe_id(const std::string& id, const char* what) {
  if (!is_safe_id(id)) throw NotFoundError(std::string("no such ") + what + " '" + id + "'");
}

}  // namespace

const Chunk* StoredDocument::find_chunk(const std::string& chunk_id) const {
  for (const auto& c : chunks) {
    if (c.id == chunk_id) return &c;
  }
  return nullptr;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  static std::atomic<unsigned long> counter{0};
  std::error_code ec;
  if (!path.parent_path().empty()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

Store::Store(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "documents", ec);
  if (ec) throw IoError("cannot create store at " + root_.string() + ": " + ec.message());
}

fs::path Store::document_dir(const std::string& doc_id) const {
  return root_ / "documents" / doc_id;
}

fs::path Store::quiz_path(const std::string& doc_id, const std::string& quiz_id) const {
  return document_dir(doc_id) / "quizzes" / (quiz_id + ".json");
}

std::mutex& Store::writer_lock(const std::string& doc_id) {
  std::lock_guard<std::mutex> g(locks_mutex_);
  auto& slot = locks_[doc_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

bool Store::has_document(const std::string& doc_id) const {
  return is_safe_id(doc_id) && fs::exists(document_dir(doc_id) / "meta.json");
}

void Store::put_document(const SourceDocument& doc, const std::vector<Chunk>& chunks,
                         const std::optional<fs::path>& image_base) {
  if (!is_safe_id(doc.id)) throw ValidationError("invalid document id '" + doc.id + "'");
  std::lock_guard<std::mutex> g(writer_lock(doc.id));
  if (has_document(doc.id)) {
    throw ConflictError("document " + doc.id + " already exists", doc.id);
  }
  const fs::path dir = document_dir(doc.id);
  std::error_code ec;
  fs::create_directories(dir / "images", ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::string lines;
  for (const auto& c : chunks) {
    lines += to_json(c).dump();
    lines += '\n';
    if (!c.is_text() && image_base) {
      const fs::path src = image_base->empty() ? fs::path(c.image_ref) : *image_base / c.image_ref;
      if (fs::is_regular_file(src)) {
        fs::copy_file(src, dir / "images" / fs::path(c.image_ref).filename(),
                      fs::copy_options::overwrite_existing, ec);
      }
    }
  }
  write_file_atomic(dir / "chunks.jsonl", lines);

  ojson meta = to_json(doc);
  meta["chunk_count"] = chunks.size();
  meta["ingested_at"] = text::utc_now_rfc3339();
  // meta.json is written last: its presence marks the document complete.
  write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");
}

StoredDocument Store::load_document(const std::string& doc_id) const {
  require_safe_id(doc_id, "document");
  if (!has_document(doc_id)) throw NotFoundError("no such document '" + doc_id + "'");
  const fs::path dir = document_dir(doc_id);
  StoredDocument out;
  try {
    const ojson meta = ojson::parse(read_file(dir / "meta.json"));
    out.document = document_from_json(meta);
    out.ingested_at = meta.value("ingested_at", "");
    std::istringstream in(read_file(dir / "chunks.jsonl"));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      out.chunks.push_back(chunk_from_json(ojson::parse(line)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("corrupt document " + doc_id + ": " + e.what());
  }
  return out;
}

std::vector<std::string> Store::list_documents() const {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root_ / "documents", ec)) {
    const std::string id = entry.path().filename().string();
    if (has_document(id)) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void Store::put_quiz(const std::string& doc_id, const std::string& quiz_id,
                     const std::string& bytes) {
  require_safe_id(doc_id, "document");
  if (!is_safe_id(quiz_id)) throw ValidationError("invalid quiz id '" + quiz_id + "'");
  if (!has_document(doc_id)) throw NotFoundError("no such document '" + doc_id + "'");
  std::lock_guard<std::mutex> g(writer_lock(doc_id));
  write_file_atomic(quiz_path(doc_id, quiz_id), bytes);
}

std::optional<std::string> Store::read_quiz(const std::string& doc_id,
                                            const std::string& quiz_id) const {
  if (!is_safe_id(doc_id) || !is_safe_id(quiz_id)) return std::nullopt;
  const fs::path p = quiz_path(doc_id, quiz_id);
  if (!fs::exists(p)) return std::nullopt;
  return read_file(p);
}

std::optional<std::pair<std::string, std::string>> Store::find_quiz(
    const std::string& quiz_id) const {
  if (!is_safe_id(quiz_id)) return std::nullopt;
  for (const auto& doc_id : list_documents()) {
    if (auto bytes = read_quiz(doc_id, quiz_id)) return std::make_pair(doc_id, *bytes);
  }
  return std::nullopt;
}

}  // namespace qgen::chunkstore
